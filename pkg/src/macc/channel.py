"""Finite-alphabet MACC channels: representation, validation, I/O, builders.

A channel is a tensor ``p[x1, x2, y, y1]``. The null symbol of the half-duplex
example is index 0 of both the X1 and the Y1 alphabet.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

STOCH_TOL = 1e-12
MAX_ALPHABET = 64
NULL = 0

OUTPUT_AXES = ("Y", "Y1")


class ChannelError(ValueError):
    """Base class for malformed channel input."""


class ChannelShapeError(ChannelError):
    """Tensor dimensions disagree with the declared alphabet sizes."""


class ChannelFormatError(ChannelError):
    """A channel-spec document could not be parsed or failed validation."""


def check_pmf(probs, name="pmf", tol=STOCH_TOL):
    """Return ``probs`` as a float vector, raising if it is not a distribution."""
    arr = np.asarray(probs, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name}: expected a non-empty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError(f"{name}: entries must be finite and nonnegative")
    if abs(arr.sum() - 1.0) > tol:
        raise ValueError(f"{name}: sums to {arr.sum()!r}, not 1")
    return arr


def check_cond(rows, name="cond", tol=STOCH_TOL):
    """Return a row-stochastic matrix (one pmf per conditioning value)."""
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or 0 in arr.shape:
        raise ValueError(f"{name}: expected a non-empty 2-D matrix, got shape {arr.shape}")
    for i, row in enumerate(arr):
        check_pmf(row, f"{name}[{i}]", tol)
    return arr


@dataclass(frozen=True)
class MaccChannel:
    """Transition law p(y, y1 | x1, x2) over finite alphabets.

    Construction only checks that the tensor is 4-D and matches any declared
    sizes; stochasticity is checked by :func:`validate_channel` so that bad
    tensors can still be inspected.
    """

    p: np.ndarray
    labels: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        arr = np.array(self.p, dtype=float)
        if arr.ndim != 4:
            raise ChannelShapeError(f"channel tensor must be 4-D [x1][x2][y][y1], got {arr.ndim}-D")
        if 0 in arr.shape:
            raise ChannelShapeError(f"channel tensor has an empty axis: {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "p", arr)

    @property
    def nx1(self):
        return self.p.shape[0]

    @property
    def nx2(self):
        return self.p.shape[1]

    @property
    def ny(self):
        return self.p.shape[2]

    @property
    def ny1(self):
        return self.p.shape[3]

    @property
    def sizes(self):
        return self.p.shape


@dataclass(frozen=True)
class Violation:
    x1: int
    x2: int
    total: float

    @property
    def deficit(self):
        """1 minus the slice sum (negative when the slice carries excess mass)."""
        return 1.0 - self.total


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()
    negative_entries: int = 0

    @property
    def ok(self):
        return not self.violations and self.negative_entries == 0

    def __bool__(self):
        return self.ok

    def describe(self):
        if self.ok:
            return "ok"
        parts = [f"slice (x1={v.x1}, x2={v.x2}) sums to {v.total:.15g} (deficit {v.deficit:.3g})"
                 for v in self.violations]
        if self.negative_entries:
            parts.append(f"{self.negative_entries} negative entries")
        return "; ".join(parts)


def validate_channel(ch, sizes=None, max_alphabet=MAX_ALPHABET, tol=STOCH_TOL):
    """Check stochasticity of every (x1, x2) slice.

    ``sizes`` optionally gives the declared (nx1, nx2, ny, ny1); a mismatch
    raises :class:`ChannelShapeError` rather than producing a report.
    """
    if sizes is not None and tuple(sizes) != ch.sizes:
        raise ChannelShapeError(f"declared sizes {tuple(sizes)} but tensor has shape {ch.sizes}")
    if max(ch.sizes) > max_alphabet:
        raise ChannelShapeError(f"alphabet size {max(ch.sizes)} exceeds cap {max_alphabet}")
    p = ch.p
    neg = int(np.count_nonzero(~(p >= 0)))
    sums = p.sum(axis=(2, 3))
    bad = np.argwhere(~(np.abs(sums - 1.0) <= tol))
    viol = tuple(Violation(int(a), int(b), float(sums[a, b])) for a, b in bad)
    return ValidationReport(viol, neg)


def require_valid(ch):
    rep = validate_channel(ch)
    if not rep.ok:
        raise ChannelError(f"invalid channel: {rep.describe()}")
    return ch


def marginalize(ch, keep):
    """Conditional tensor p(kept outputs | x1, x2), e.g. ``keep={"Y"}`` gives the MAC part.

    The kept axes appear in their natural (Y, Y1) order.
    """
    keep = {keep} if isinstance(keep, str) else set(keep)
    if not keep:
        raise ValueError("keep must name at least one of Y, Y1")
    unknown = keep - set(OUTPUT_AXES)
    if unknown:
        raise ValueError(f"unknown output axes {sorted(unknown)}")
    drop = tuple(2 + i for i, name in enumerate(OUTPUT_AXES) if name not in keep)
    p = ch.p if isinstance(ch, MaccChannel) else np.asarray(ch)
    return p.sum(axis=drop) if drop else p.copy()


@dataclass(frozen=True)
class HalfDuplexParams:
    """Input law of the half-duplex example: P[X1=1], P[X1=null], P[X2=1]."""

    p_one: float
    d_listen: float
    q: float = 0.5

    def __post_init__(self):
        for name in ("p_one", "d_listen", "q"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.p_one + self.d_listen > 1.0 + 1e-12:
            raise ValueError(f"P + D = {self.p_one + self.d_listen} exceeds 1")

    @property
    def px1(self):
        """Distribution over the X1 alphabet (null, 0, 1)."""
        return np.array([self.d_listen, max(1.0 - self.p_one - self.d_listen, 0.0), self.p_one])

    @property
    def px2(self):
        return np.array([1.0 - self.q, self.q])


@dataclass(frozen=True)
class GaussianMaccParams:
    p1: float
    p2: float
    n0: float
    n1: float

    def __post_init__(self):
        if self.p1 < 0 or self.p2 < 0:
            raise ValueError("transmit powers must be nonnegative")
        if not (self.n0 > 0 and self.n1 > 0):
            raise ValueError("noise variances must be positive")


def build_halfduplex_channel():
    """Deterministic half-duplex channel.

    X1 in {null, 0, 1}, X2 in {0, 1}, Y in {0, 1}, Y1 in {null, 0, 1}. While
    user 1 listens, Y = X2 and Y1 = Y; while it transmits, Y = X1 xor X2 and
    Y1 is null.
    """
    p = np.zeros((3, 2, 2, 3))
    for x2 in range(2):
        p[NULL, x2, x2, 1 + x2] = 1.0
        for bit in (0, 1):
            p[1 + bit, x2, bit ^ x2, NULL] = 1.0
    return MaccChannel(p, labels={"X1": ["null", "0", "1"], "X2": ["0", "1"],
                                  "Y": ["0", "1"], "Y1": ["null", "0", "1"]})


def build_wiretap_channel(eve_crossover=0.3, rx_crossover=0.0):
    """Binary MAC with a leaky side link, used as a small simulation testbed.

    Y = (X1 xor A, X2 xor B) as a symbol in {0..3} with A, B ~ Bern(rx_crossover)
    independent; Y1 = X2 xor E with E ~ Bern(eve_crossover).
    """
    def bsc(e):
        return np.array([[1 - e, e], [e, 1 - e]])

    rx, eve = bsc(rx_crossover), bsc(eve_crossover)
    p = np.zeros((2, 2, 4, 2))
    for x1 in range(2):
        for x2 in range(2):
            for a in range(2):
                for b in range(2):
                    p[x1, x2, 2 * a + b, :] = rx[x1, a] * rx[x2, b] * eve[x2]
    return MaccChannel(p)


def random_channel(rng, nx1, nx2, ny, ny1):
    """Channel with Dirichlet(1) rows, for property tests and fuzzing."""
    flat = rng.dirichlet(np.ones(ny * ny1), size=(nx1, nx2))
    return MaccChannel(flat.reshape(nx1, nx2, ny, ny1))


BUILTINS = {"halfduplex": build_halfduplex_channel, "wiretap": build_wiretap_channel}


# --- channel-spec JSON -----------------------------------------------------

def _rect(obj, depth, path="p"):
    """Shape of a nested list, rejecting ragged or non-numeric structure."""
    if depth == 0:
        if isinstance(obj, bool) or not isinstance(obj, (int, float)):
            raise ChannelFormatError(f"{path}: expected a number, got {type(obj).__name__}")
        return ()
    if not isinstance(obj, list) or not obj:
        raise ChannelFormatError(f"{path}: expected a non-empty array")
    shapes = {_rect(item, depth - 1, f"{path}[{i}]") for i, item in enumerate(obj)}
    if len(shapes) != 1:
        raise ChannelFormatError(f"{path}: ragged array")
    return (len(obj),) + shapes.pop()


def channel_from_dict(doc, max_alphabet=MAX_ALPHABET):
    if not isinstance(doc, dict):
        raise ChannelFormatError("channel spec must be a JSON object")
    missing = [k for k in ("nx1", "nx2", "ny", "ny1", "p") if k not in doc]
    if missing:
        raise ChannelFormatError(f"missing fields: {', '.join(missing)}")
    sizes = []
    for k in ("nx1", "nx2", "ny", "ny1"):
        v = doc[k]
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise ChannelFormatError(f"{k} must be a positive integer")
        sizes.append(v)
    shape = _rect(doc["p"], 4)
    if shape != tuple(sizes):
        raise ChannelShapeError(f"declared sizes {tuple(sizes)} but p has shape {shape}")
    labels = doc.get("labels", {})
    if not isinstance(labels, dict):
        raise ChannelFormatError("labels must be an object")
    ch = MaccChannel(np.array(doc["p"], dtype=float), labels=labels)
    rep = validate_channel(ch, sizes, max_alphabet=max_alphabet)
    if not rep.ok:
        raise ChannelFormatError(f"channel is not stochastic: {rep.describe()}")
    return ch


def channel_to_dict(ch):
    doc = {"nx1": ch.nx1, "nx2": ch.nx2, "ny": ch.ny, "ny1": ch.ny1, "p": ch.p.tolist()}
    if ch.labels:
        doc["labels"] = ch.labels
    return doc


def load_channel(path, max_alphabet=MAX_ALPHABET):
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return channel_from_dict(doc, max_alphabet=max_alphabet)


def save_channel(ch, path):
    Path(path).write_text(json.dumps(channel_to_dict(ch)) + "\n", encoding="utf-8")
