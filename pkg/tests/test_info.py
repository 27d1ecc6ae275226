import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from macc.channel import MaccChannel, build_halfduplex_channel, random_channel
from macc.info import (
    AuxInputPolicy,
    InternalConsistencyError,
    JointPmf,
    ProductInputPolicy,
    build_joint,
    entropy,
    markov_residuals,
    mutual_information,
    mutual_information_raw,
)


def bsc_joint(crossover):
    p = np.array([[1 - crossover, crossover], [crossover, 1 - crossover]]) * 0.5
    return JointPmf(("X1", "Y"), p)


def test_entropy_examples():
    assert entropy(JointPmf(("X1",), [0.5, 0.5]), "X1") == 1.0
    assert entropy(JointPmf(("X1",), [0.0, 1.0]), "X1") == 0.0
    expected = -(0.25 * math.log2(0.25) + 0.75 * math.log2(0.75))
    assert expected == pytest.approx(0.811278, abs=1e-6)
    assert entropy(JointPmf(("X1",), [0.25, 0.75]), ["X1"]) == pytest.approx(expected, abs=1e-15)


def test_entropy_unknown_axis():
    with pytest.raises(KeyError):
        entropy(bsc_joint(0.1), "Y1")


def test_bsc_mutual_information():
    value = mutual_information(bsc_joint(0.1), "X1", "Y")
    assert value == pytest.approx(1 - oracles.h2(0.1), abs=1e-12)
    assert value == pytest.approx(0.531004, abs=1e-6)


def test_independent_axes_have_zero_information():
    j = build_joint(MaccChannel(np.full((2, 3, 2, 2), 0.25)), ProductInputPolicy([0.3, 0.7], [0.2, 0.3, 0.5]))
    assert abs(mutual_information(j, "X1", "X2")) <= 1e-12
    assert abs(mutual_information(j, ["X1", "X2"], "Y")) <= 1e-12


def test_overlapping_axes_rejected():
    j = bsc_joint(0.1)
    with pytest.raises(ValueError):
        mutual_information(j, "X1", ["X1", "Y"])
    with pytest.raises(ValueError):
        mutual_information(j, "X1", "Y", "Y")
    with pytest.raises(ValueError):
        mutual_information(j, [], "Y")


def test_negative_beyond_tolerance_raises():
    # Total mass 2 is not a distribution; entropy differences go negative.
    j = JointPmf(("X1", "Y"), np.array([[2.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(InternalConsistencyError):
        mutual_information(j, "X1", "Y")


def test_halfduplex_joint_null_probability():
    d = 0.25
    j = build_joint(build_halfduplex_channel(), ProductInputPolicy([d, 0.5, 0.25], [0.5, 0.5]))
    assert j.axes == ("X1", "X2", "Y", "Y1")
    assert j.marginal("Y1")[0] == pytest.approx(1 - d, abs=1e-15)


@pytest.mark.parametrize("d", [0.0, 0.25, 0.5, 1.0])
def test_halfduplex_x2_information_matches_bruteforce(d):
    ch = build_halfduplex_channel()
    px1 = [d, 1 - d, 0.0]
    j = build_joint(ch, ProductInputPolicy(px1, [0.5, 0.5]))
    ref = oracles.joint_dict(ch.p.tolist(), [1.0], [[0.5, 0.5]], [px1], [[1, 0], [0, 1]])
    for a, b, c in [("X2", "Y", "X1"), ("X2", "Y1", "X1"), (["X1", "X2"], "Y", ())]:
        want = oracles.cmi(ref, [a] if isinstance(a, str) else a, [b], [c] if isinstance(c, str) else c)
        assert mutual_information(j, a, b, c) == pytest.approx(want, abs=1e-12)
    # H(X2) = 1 is fully recoverable from Y given X1, for every D
    assert mutual_information(j, "X2", "Y", "X1") == pytest.approx(1.0, abs=1e-12)
    assert mutual_information(j, "X2", "Y1", "X1") == pytest.approx(d, abs=1e-12)


def test_singleton_auxiliaries_reduce_to_product(rng):
    ch = random_channel(rng, 2, 3, 2, 2)
    prod = ProductInputPolicy(rng.dirichlet(np.ones(2)), rng.dirichlet(np.ones(3)))
    aux = AuxInputPolicy([1.0], [[1.0]], [prod.px1], [prod.px2])
    ja, jp = build_joint(ch, aux), build_joint(ch, prod)
    assert ja.mass.shape == (1, 1, 2, 3, 2, 2)
    assert np.allclose(ja.mass[0, 0], jp.mass, atol=1e-15)


def test_point_mass_input_concentrates():
    ch = build_halfduplex_channel()
    j = build_joint(ch, ProductInputPolicy([0.2, 0.3, 0.5], [1.0, 0.0]))
    assert j.mass[:, 1].sum() == 0.0
    assert j.mass[:, 0].sum() == pytest.approx(1.0)


def test_policy_dimension_errors():
    ch = build_halfduplex_channel()
    with pytest.raises(ValueError, match="pX1"):
        build_joint(ch, ProductInputPolicy([0.5, 0.5], [0.5, 0.5]))
    with pytest.raises(ValueError, match="pX2givenV"):
        AuxInputPolicy([1.0], [[0.5, 0.5]], [[1, 0, 0]], [[1, 0]])
    with pytest.raises(ValueError):
        ProductInputPolicy([0.5, 0.6], [1.0])


def test_build_joint_matches_bruteforce(rng):
    ch = random_channel(rng, 2, 2, 3, 2)
    pol = AuxInputPolicy.random(rng, 2, 3, 2, 2)
    j = build_joint(ch, pol)
    ref = oracles.joint_dict(ch.p.tolist(), pol.pu.tolist(), pol.pv_u.tolist(),
                             pol.px1_u.tolist(), pol.px2_v.tolist())
    for key, m in ref.items():
        assert j.mass[key] == pytest.approx(m, rel=1e-12)
    assert j.mass.sum() == pytest.approx(1.0, abs=1e-12)
    for a, b, c in [(["X1"], ["Y"], ["U", "V"]), (["V"], ["Y1"], ["U", "X1"]),
                    (["X1", "V"], ["Y"], ["U"]), (["X1", "V"], ["Y"], [])]:
        assert mutual_information(j, a, b, c) == pytest.approx(oracles.cmi(ref, a, b, c), abs=1e-12)


seeds = st.integers(0, 2**32 - 1)
cards = st.integers(1, 3)


@settings(max_examples=60, deadline=None)
@given(seeds, cards, cards)
def test_chain_rule_and_nonnegativity(seed, nu, nv):
    r = np.random.default_rng(seed)
    ch = random_channel(r, 2, 2, 2, 3)
    j = build_joint(ch, AuxInputPolicy.random(r, nu, nv, 2, 2))
    lhs = mutual_information_raw(j, ["X1", "V"], "Y", "U")
    rhs = mutual_information_raw(j, "X1", "Y", "U") + mutual_information_raw(j, "V", "Y", ["U", "X1"])
    assert abs(lhs - rhs) <= 1e-10
    for name in ("U", "V", "X1", "X2", "Y", "Y1"):
        h = entropy(j, name)
        assert -1e-12 <= h <= math.log2(j.sizes[name]) + 1e-12
    for val in markov_residuals(j).values():
        assert -1e-10 <= val <= 1e-10
