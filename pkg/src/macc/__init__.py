"""Secrecy rate regions and random-binning simulation for the multiple-access
channel with a confidential message."""

from .channel import (
    GaussianMaccParams,
    HalfDuplexParams,
    MaccChannel,
    build_halfduplex_channel,
    build_wiretap_channel,
    load_channel,
    marginalize,
    validate_channel,
)
from .info import (
    AuxInputPolicy,
    JointPmf,
    ProductInputPolicy,
    build_joint,
    entropy,
    mutual_information,
)
from .regions import (
    RatePolygon,
    RateTriple,
    SearchConfig,
    corollary1_triple,
    gaussian_triple,
    halfduplex_triple,
    search_inner_region,
    theorem1_triple,
    theorem2_triple,
    triple_to_polygon,
)
from .binning import (
    Codebook,
    SimConfig,
    SimStats,
    exact_equivocation,
    generate_codebook,
    run_error_trials,
    typicality_decode,
)

__version__ = "0.1.0"
