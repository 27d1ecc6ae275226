"""Random-binning code for the MACC: generation, encoding, typicality decoding,
Monte Carlo error rate and exact small-block equivocation.

Randomness comes from Philox streams keyed by ``(seed, purpose, index)``, so a
trial's outcome depends only on the master seed and the trial number, never on
how trials are scheduled.
"""
from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .channel import marginalize, require_valid
from .info import AuxInputPolicy, ProductInputPolicy, build_joint, check_markov, mutual_information

MAX_CODEWORDS = 2**20
MAX_EQUIVOCATION_TERMS = 10**8
MAX_U_RESAMPLES = 100
ZERO_RATE_TOL = 1e-12

_CODEBOOK_STREAM = 0
_TRIAL_STREAM = 1


class GuardError(RuntimeError):
    """A computation would exceed its enumeration budget."""


def stream(seed, *keys):
    """Counter-based generator for the sub-stream ``keys`` of ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *keys])))


def _cdf(rows):
    c = np.cumsum(rows, axis=-1)
    return c / c[..., -1:]


def _draw(rng, cdf):
    """One draw per leading index of ``cdf`` (shape (..., k))."""
    r = rng.random(cdf.shape[:-1])
    return np.minimum((r[..., None] >= cdf).sum(axis=-1), cdf.shape[-1] - 1)


def codebook_size(n, rate):
    """ceil(2^(n R)), robust to the float error in exact powers of two."""
    return max(1, math.ceil(2.0 ** (n * rate) - 1e-9))


@dataclass(frozen=True)
class SimConfig:
    n: int
    r1: float = 0.0
    r2: float = 0.0
    trials: int = 1000
    epsilon: float = 0.2
    seed: int = 0
    workers: int = 1
    ensemble: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("block length must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.r1 < 0 or self.r2 < 0:
            raise ValueError("rates must be nonnegative")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    def to_dict(self):
        return {"n": self.n, "r1": self.r1, "r2": self.r2, "trials": self.trials,
                "epsilon": self.epsilon, "seed": self.seed, "ensemble": self.ensemble}


@dataclass(frozen=True, eq=False)
class Codebook:
    """Binning code of block length n.

    ``x1words[w1 - 1]`` is user 1's codeword; ``vwords[w2 - 1, l - 1]`` is the
    l-th member of bin w2. ``typical_pmf`` is p(u, x1, v, y) flattened in that
    axis order; the decoder compares joint types against it.
    """

    n: int
    u: np.ndarray
    x1words: np.ndarray
    vwords: np.ndarray
    rates: tuple
    policy: AuxInputPolicy
    typical_pmf: np.ndarray
    ny: int
    seed: int = 0
    leakage: float = 0.0
    u_resamples: int = 0

    def __post_init__(self):
        n = self.n
        if self.u.shape != (n,) or self.x1words.ndim != 2 or self.x1words.shape[1] != n:
            raise ValueError("every stored sequence must have length n")
        if self.vwords.ndim != 3 or self.vwords.shape[2] != n:
            raise ValueError("vwords must have shape (M2, L, n)")
        if self.typical_pmf.size != self.policy.nu * self.policy.nx1 * self.policy.nv * self.ny:
            raise ValueError("typical_pmf does not match the (U, X1, V, Y) alphabets")

    @property
    def m1(self):
        return self.x1words.shape[0]

    @property
    def m2(self):
        return self.vwords.shape[0]

    @property
    def bin_size(self):
        return self.vwords.shape[1]

    @property
    def collisions(self):
        """Number of x1 codewords that repeat an earlier one."""
        return self.m1 - len(np.unique(self.x1words, axis=0))

    def digest(self):
        h = hashlib.sha256()
        for arr in (self.u, self.x1words, self.vwords):
            h.update(np.ascontiguousarray(arr, dtype=np.int64).tobytes())
            h.update(repr(arr.shape).encode())
        return h.hexdigest()

    @cached_property
    def _ux1_codes(self):
        return self.u[None, :] * self.policy.nx1 + self.x1words

    @cached_property
    def _x2_cdf(self):
        return _cdf(self.policy.px2_v)


@dataclass
class SimStats:
    n: int
    pe_hat: float | None = None
    pe_stderr: float | None = None
    trials: int = 0
    errors: int = 0
    equivocation_bits: float | None = None
    equivocation_per_symbol: float | None = None
    extra: dict = field(default_factory=dict)


def _as_aux(policy):
    if isinstance(policy, ProductInputPolicy):
        return AuxInputPolicy.from_product(policy)
    return policy


def generate_codebook(ch, policy, cfg, index=0):
    """Draw a codebook; ``index`` selects an independent code from the same seed."""
    require_valid(ch)
    policy = _as_aux(policy)
    j = build_joint(ch, policy)
    check_markov(j)
    leak = mutual_information(j, "V", "Y1", ["U", "X1"])
    n = cfg.n
    m1, m2 = codebook_size(n, cfg.r1), codebook_size(n, cfg.r2)
    nl = 1 if n * leak <= ZERO_RATE_TOL else codebook_size(n, leak)
    total = m1 * m2 * nl
    if total > MAX_CODEWORDS:
        raise GuardError(
            f"codebook needs M1*M2*L = {m1}*{m2}*{nl} = {total} words; budget is {MAX_CODEWORDS}. "
            "Lower n or the rates.")
    rng = stream(cfg.seed, _CODEBOOK_STREAM, index)
    u_cdf = _cdf(policy.pu)
    resamples = 0
    u = _draw(rng, np.broadcast_to(u_cdf, (n, policy.nu)))
    while resamples < MAX_U_RESAMPLES and not _u_typical(u, policy.pu, cfg.epsilon):
        resamples += 1
        u = _draw(rng, np.broadcast_to(u_cdf, (n, policy.nu)))
    x1_cdf = _cdf(policy.px1_u)[u]
    v_cdf = _cdf(policy.pv_u)[u]
    x1words = _draw(rng, np.broadcast_to(x1_cdf, (m1, n, policy.nx1)))
    vwords = _draw(rng, np.broadcast_to(v_cdf, (m2, nl, n, policy.nv)))
    target = j.marginal(["U", "X1", "V", "Y"]).ravel()
    r3 = cfg.r2 + leak
    return Codebook(n, u, x1words, vwords, (cfg.r1, cfg.r2, r3), policy, target, ch.ny,
                    seed=cfg.seed, leakage=leak, u_resamples=resamples)


def _u_typical(u, pu, eps):
    freq = np.bincount(u, minlength=pu.size) / u.size
    return np.max(np.abs(freq - pu)) <= eps


def encode_user1(cb, w1):
    if not 1 <= w1 <= cb.m1:
        raise IndexError(f"w1 = {w1} outside 1..{cb.m1}")
    return cb.x1words[w1 - 1]


def encode_user2(cb, w2, rng):
    """Pick a uniform bin member and pass it through p(x2|v).

    Returns the 1-based member index and the channel input.
    """
    if not 1 <= w2 <= cb.m2:
        raise IndexError(f"w2 = {w2} outside 1..{cb.m2}")
    l = min(int(rng.random() * cb.bin_size), cb.bin_size - 1) + 1
    v = cb.vwords[w2 - 1, l - 1]
    return l, _draw(rng, cb._x2_cdf[v])


def transmit(ch, x1, x2, rng):
    x1, x2 = np.asarray(x1), np.asarray(x2)
    if x1.shape != x2.shape or x1.ndim != 1:
        raise ValueError(f"input sequences differ in length: {x1.shape} vs {x2.shape}")
    if x1.min(initial=0) < 0 or x1.max(initial=0) >= ch.nx1 or x2.min(initial=0) < 0 \
            or x2.max(initial=0) >= ch.nx2:
        raise ValueError("input symbol out of range")
    rows = ch.p[x1, x2].reshape(x1.size, -1)
    flat = _draw(rng, _cdf(rows))
    return flat // ch.ny1, flat % ch.ny1


def _typical_mask(cb, y, epsilon, w1_slice):
    pol = cb.policy
    k = pol.nu * pol.nx1 * pol.nv * cb.ny
    vy = (cb.vwords * cb.ny + y).reshape(-1, cb.n)        # (M2*L, n)
    codes = cb._ux1_codes[w1_slice, None, :] * (pol.nv * cb.ny) + vy[None, :, :]
    c = codes.shape[0] * codes.shape[1]
    flat = codes.reshape(c, cb.n) + (np.arange(c) * k)[:, None]
    counts = np.bincount(flat.ravel(), minlength=c * k).reshape(c, k)
    dev = np.abs(counts / cb.n - cb.typical_pmf).max(axis=1)
    # Strong typicality also forbids symbols outside the support.
    off_support = counts[:, cb.typical_pmf <= 0].any(axis=1)
    return ((dev <= epsilon + 1e-12) & ~off_support).reshape(codes.shape[0], cb.m2, cb.bin_size)


def typicality_decode(cb, y, epsilon):
    """Unique (w1, w2) with some bin member jointly typical with (u, x1(w1), y).

    A tuple is typical when its joint type on (U, X1, V, Y) is within
    ``epsilon`` of the policy-induced law in every cell and puts no mass on
    cells of probability zero.

    Returns None when no pair, or more than one distinct pair, qualifies.
    """
    y = np.asarray(y)
    if y.shape != (cb.n,):
        raise ValueError(f"received sequence must have length {cb.n}")
    per_w1 = max(1, (1 << 16) // (cb.m2 * cb.bin_size))
    found = None
    for start in range(0, cb.m1, per_w1):
        mask = _typical_mask(cb, y, epsilon, slice(start, start + per_w1)).any(axis=2)
        hits = np.argwhere(mask)
        if len(hits) > 1 or (len(hits) == 1 and found is not None):
            return None
        if len(hits) == 1:
            found = (start + int(hits[0, 0]) + 1, int(hits[0, 1]) + 1)
    return found


def _run_trials(ch, policy, cb, cfg, indices):
    errors = 0
    for t in indices:
        if cfg.ensemble:
            cb = generate_codebook(ch, policy, cfg, index=t + 1)
        rng = stream(cfg.seed, _TRIAL_STREAM, t)
        w1 = min(int(rng.random() * cb.m1), cb.m1 - 1) + 1
        w2 = min(int(rng.random() * cb.m2), cb.m2 - 1) + 1
        x1 = encode_user1(cb, w1)
        _, x2 = encode_user2(cb, w2, rng)
        y, _ = transmit(ch, x1, x2, rng)
        if typicality_decode(cb, y, cfg.epsilon) != (w1, w2):
            errors += 1
    return errors


def run_error_trials(ch, policy, cfg, codebook=None):
    """Empirical average error probability over ``cfg.trials`` uniform message pairs.

    With ``cfg.ensemble`` every trial also draws its own codebook, so the
    estimate is the random-coding ensemble average rather than the error rate
    of one fixed code; the returned collision/resample counts then describe
    the base codebook only.
    """
    cb = codebook if codebook is not None else generate_codebook(ch, policy, cfg)
    trials = range(cfg.trials)
    if cfg.workers > 1:
        parts = [trials[i::cfg.workers] for i in range(cfg.workers)]
        with ThreadPoolExecutor(cfg.workers) as pool:
            errors = sum(pool.map(lambda part: _run_trials(ch, policy, cb, cfg, part), parts))
    else:
        errors = _run_trials(ch, policy, cb, cfg, trials)
    pe = errors / cfg.trials
    return SimStats(cfg.n, pe_hat=pe, pe_stderr=math.sqrt(pe * (1 - pe) / cfg.trials),
                    trials=cfg.trials, errors=errors,
                    extra={"codewordCollisions": cb.collisions, "resampleCount": cb.u_resamples})


def _entropy_bits(p):
    p = p[p > 0]
    return -math.fsum(p * np.log2(p))


def equivocation_terms(cb, ch):
    """Size of the (w1, w2, l, x2^n, y1^n) enumeration the guard is applied to."""
    return (ch.nx2 ** cb.n) * (ch.ny1 ** cb.n) * cb.m1 * cb.m2 * cb.bin_size


def exact_equivocation(cb, ch):
    """H(W2 | W1, Y1^n) in bits for uniform messages and bin members.

    User 1 knows the codebook and its own message. Because the channel and
    p(x2|v) are memoryless, x2 is summed out symbol by symbol, which gives the
    same law as enumerating whole x2 sequences.
    """
    require_valid(ch)
    terms = equivocation_terms(cb, ch)
    if terms > MAX_EQUIVOCATION_TERMS:
        raise GuardError(f"exact equivocation needs {terms:.3g} terms (limit "
                         f"{MAX_EQUIVOCATION_TERMS:.0e}); use a smaller n or alphabets")
    py1 = marginalize(ch, "Y1")                       # (X1, X2, Y1)
    px2_v = cb.policy.px2_v
    parts = []
    for w1 in range(cb.m1):
        x1 = cb.x1words[w1]
        # q[w2, l, i, y1] = sum_x2 p(x2 | v_i) p(y1 | x1_i, x2)
        q = np.einsum("wlib,ibz->wliz", px2_v[cb.vwords], py1[x1])
        lik = q[:, :, 0, :]
        for i in range(1, cb.n):
            lik = (lik[..., :, None] * q[:, :, i, None, :]).reshape(cb.m2, cb.bin_size, -1)
        joint = lik.mean(axis=1) / cb.m2               # P(w2, y1^n | w1)
        parts.append(_entropy_bits(joint.ravel()) - _entropy_bits(joint.sum(axis=0)))
    bits = math.fsum(parts) / cb.m1
    return SimStats(cb.n, equivocation_bits=bits, equivocation_per_symbol=bits / cb.n,
                    extra={"codewordCollisions": cb.collisions})
