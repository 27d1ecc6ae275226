"""Rate bounds for the MACC and the polygons they carve out of the (R1, R2) plane.

Three bound families are evaluated on a fixed input law:

* ``theorem1_triple`` - the outer bound,
* ``theorem2_triple`` - the auxiliary-variable inner bound,
* ``corollary1_triple`` - the product-input inner bound (V = X2, trivial U),

plus closed forms for the half-duplex and Gaussian examples.
"""
from __future__ import annotations

import itertools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import require_valid
from .info import (
    AuxInputPolicy,
    JointSizeError,
    MAX_JOINT_CELLS,
    ProductInputPolicy,
    build_joint,
    check_markov,
    mutual_information as mi,
)

KINDS = ("outer_thm1", "inner_thm2", "inner_cor1", "halfduplex", "gaussian")
VERTEX_TOL = 1e-12


def h2(p):
    """Binary entropy in bits."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def gaussian_capacity(x):
    """C(x) = 1/2 log2(1 + x)."""
    return 0.5 * math.log2(1.0 + x)


@dataclass(frozen=True)
class RateTriple:
    """Bounds R1 <= c1, R2 <= c2, R1 + R2 <= c12 (raw, possibly negative c2/c12)."""

    c1: float
    c2: float
    c12: float
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown triple kind {self.kind!r}")

    @property
    def c2_clamped(self):
        return max(self.c2, 0.0)

    @property
    def c12_clamped(self):
        return max(self.c12, 0.0)

    def as_tuple(self):
        return (self.c1, self.c2, self.c12)

    def to_dict(self):
        return {"c1": self.c1, "c2_raw": self.c2, "c12_raw": self.c12, "kind": self.kind}


@dataclass(frozen=True)
class RatePolygon:
    """Convex polygon in the nonnegative quadrant, counterclockwise from (0, 0)."""

    vertices: tuple

    def __post_init__(self):
        verts = tuple((float(a), float(b)) for a, b in self.vertices)
        if not verts:
            raise ValueError("a polygon needs at least one vertex")
        if any(a < 0 or b < 0 for a, b in verts):
            raise ValueError("polygon vertices must be nonnegative")
        object.__setattr__(self, "vertices", verts)

    def __len__(self):
        return len(self.vertices)

    def contains(self, point, tol=1e-9):
        """Membership test; segments and single points are handled too."""
        x, y = point
        v = self.vertices
        if len(v) == 1:
            return math.hypot(x - v[0][0], y - v[0][1]) <= tol
        if len(v) == 2:
            (ax, ay), (bx, by) = v
            dx, dy = bx - ax, by - ay
            t = ((x - ax) * dx + (y - ay) * dy) / (dx * dx + dy * dy)
            t = min(max(t, 0.0), 1.0)
            return math.hypot(x - ax - t * dx, y - ay - t * dy) <= tol
        for (ax, ay), (bx, by) in zip(v, v[1:] + v[:1]):
            edge = math.hypot(bx - ax, by - ay)
            cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax)
            if cross < -tol * edge:
                return False
        return True

    def to_csv(self):
        lines = ["r1,r2"] + [f"{a:.6f},{b:.6f}" for a, b in self.vertices]
        return "\n".join(lines) + "\n"


# --- bound evaluation -------------------------------------------------------

def corollary1_triple(ch, policy):
    j = build_joint(ch, policy)
    leak = mi(j, "X2", "Y1", "X1")
    return RateTriple(mi(j, "X1", "Y", "X2"),
                      mi(j, "X2", "Y", "X1") - leak,
                      mi(j, ["X1", "X2"], "Y") - leak,
                      "inner_cor1")


def _aux_joint(ch, policy):
    if isinstance(policy, ProductInputPolicy):
        policy = AuxInputPolicy.from_product(policy)
    j = build_joint(ch, policy)
    check_markov(j)
    return j


def theorem2_triple(ch, policy):
    j = _aux_joint(ch, policy)
    leak = mi(j, "V", "Y1", ["U", "X1"])
    return RateTriple(mi(j, "X1", "Y", ["U", "V"]),
                      mi(j, "V", "Y", ["U", "X1"]) - leak,
                      mi(j, ["X1", "V"], "Y", "U") - leak,
                      "inner_thm2")


def theorem1_triple(ch, policy):
    # c1 conditions on X2 and c12 is unconditioned on U, unlike theorem2_triple.
    j = _aux_joint(ch, policy)
    leak = mi(j, "V", "Y1", ["U", "X1"])
    return RateTriple(mi(j, "X1", "Y", "X2"),
                      mi(j, "V", "Y", ["U", "X1"]) - leak,
                      mi(j, ["X1", "V"], "Y") - leak,
                      "outer_thm1")


def halfduplex_triple(params):
    """Closed-form product-input bounds for the half-duplex channel.

    With uniform X2 this is (h(P), 1 - D, 1 - D).
    """
    hx2 = h2(params.q)
    py1 = params.q * (1.0 - params.p_one) + (1.0 - params.q) * params.p_one
    return RateTriple(h2(params.p_one),
                      hx2 * (1.0 - params.d_listen),
                      h2(py1) - hx2 * params.d_listen,
                      "halfduplex")


def halfduplex_policy(params):
    return ProductInputPolicy(params.px1, params.px2)


def gaussian_triple(params):
    leak = gaussian_capacity(params.p2 / params.n1)
    return RateTriple(gaussian_capacity(params.p1 / params.n0),
                      gaussian_capacity(params.p2 / params.n0) - leak,
                      gaussian_capacity((params.p1 + params.p2) / params.n0) - leak,
                      "gaussian")


# --- geometry -----------------------------------------------------------------

def _dedupe(points, tol=VERTEX_TOL):
    out = []
    for p in points:
        if not out or max(abs(p[0] - out[-1][0]), abs(p[1] - out[-1][1])) > tol:
            out.append(p)
    while len(out) > 1 and max(abs(out[0][0] - out[-1][0]), abs(out[0][1] - out[-1][1])) <= tol:
        out.pop()
    return out


def triple_to_polygon(t):
    """{R1 <= c1, R2 <= c2, R1 + R2 <= c12, R1, R2 >= 0} with clamped bounds."""
    a, b, s = max(t.c1, 0.0), t.c2_clamped, t.c12_clamped
    rect = [(0.0, 0.0), (a, 0.0), (a, b), (0.0, b)]
    # Clip the box against R1 + R2 <= s (one Sutherland-Hodgman pass).
    clipped = []
    for p, q in zip(rect, rect[1:] + rect[:1]):
        fp, fq = p[0] + p[1] - s, q[0] + q[1] - s
        if fp <= 0:
            clipped.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            r = fp / (fp - fq)
            clipped.append((p[0] + r * (q[0] - p[0]), p[1] + r * (q[1] - p[1])))
    return RatePolygon(_dedupe(clipped) or [(0.0, 0.0)])


def _left_turn(o, a, b, tol=VERTEX_TOL):
    """Strict left turn o->a->b; turns within ``tol`` of collinear do not count."""
    cross = (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    scale = max(math.hypot(a[0] - o[0], a[1] - o[1]) * math.hypot(b[0] - o[0], b[1] - o[1]), 1.0)
    return cross > tol * scale


def convex_hull(points):
    """Andrew's monotone chain; counterclockwise, collinear points dropped.

    Input order does not matter: points are sorted lexicographically first.
    """
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) <= 2:
        return _dedupe(pts)
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and not _left_turn(lower[-2], lower[-1], p):
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and not _left_turn(upper[-2], upper[-1], p):
            upper.pop()
        upper.append(p)
    return _dedupe(lower[:-1] + upper[:-1])


def hull_polygon(polygons):
    """Convex hull of a union of quadrant polygons, started at the origin."""
    verts = convex_hull(v for poly in polygons for v in poly.vertices)
    if (0.0, 0.0) in verts:
        k = verts.index((0.0, 0.0))
        verts = verts[k:] + verts[:k]
    return RatePolygon(verts)


# --- region search ------------------------------------------------------------

@dataclass(frozen=True)
class SearchConfig:
    grid_step: float = 0.05
    aux_card_u: int = 1
    aux_card_v: int = 1
    random_samples: int = 0
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if not self.grid_step > 0:
            raise ValueError("grid_step must be positive")
        if self.aux_card_u < 1 or self.aux_card_v < 1:
            raise ValueError("auxiliary cardinalities must be >= 1")
        if self.random_samples < 0:
            raise ValueError("random_samples must be >= 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class SupportPoint:
    policy: object
    triple: RateTriple

    def to_dict(self):
        return {"policy": self.policy.to_dict(), **self.triple.to_dict()}


@dataclass(frozen=True)
class RegionResult:
    polygon: RatePolygon
    support: tuple


def grid_divisions(step):
    """Number of grid cells per unit; steps that do not divide 1 are rounded down."""
    k = 1.0 / step
    if abs(k - round(k)) <= 1e-9 * max(1.0, k):
        return max(int(round(k)), 1)
    kk = math.ceil(k)
    warnings.warn(f"grid step {step} does not divide 1; using 1/{kk}", stacklevel=3)
    return kk


def simplex_grid(dim, divisions):
    """All pmfs on ``dim`` symbols whose entries are multiples of 1/divisions."""
    for bars in itertools.combinations(range(divisions + dim - 1), dim - 1):
        parts, prev = [], -1
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(divisions + dim - 2 - prev)
        yield np.array(parts, dtype=float) / divisions


def _evaluate(ch, jobs):
    out = []
    for policy in jobs:
        if isinstance(policy, ProductInputPolicy):
            out.append(SupportPoint(policy, corollary1_triple(ch, policy)))
        else:
            out.append(SupportPoint(policy, theorem2_triple(ch, policy)))
    return out


def search_inner_region(ch, cfg):
    """Convex hull of the inner-bound polygons over a family of input laws.

    Product laws come from a simplex grid (product-input triples); when the
    auxiliary alphabets are nontrivial, ``cfg.random_samples`` seeded random
    auxiliary laws add auxiliary-variable triples.
    """
    require_valid(ch)
    cells = cfg.aux_card_u * cfg.aux_card_v * ch.p.size
    if cells > MAX_JOINT_CELLS:
        raise JointSizeError(f"auxiliary joint would have {cells} cells (limit {MAX_JOINT_CELLS})")
    k = grid_divisions(cfg.grid_step)
    g1 = list(simplex_grid(ch.nx1, k))
    g2 = list(simplex_grid(ch.nx2, k))
    jobs = [ProductInputPolicy(a, b) for a in g1 for b in g2]
    if cfg.aux_card_u * cfg.aux_card_v > 1:
        rng = np.random.default_rng(cfg.seed)
        jobs += [AuxInputPolicy.random(rng, cfg.aux_card_u, cfg.aux_card_v, ch.nx1, ch.nx2)
                 for _ in range(cfg.random_samples)]
    if cfg.workers > 1 and len(jobs) > 1:
        size = -(-len(jobs) // cfg.workers)
        chunks = [jobs[i:i + size] for i in range(0, len(jobs), size)]
        with ThreadPoolExecutor(cfg.workers) as pool:
            support = [sp for part in pool.map(lambda c: _evaluate(ch, c), chunks) for sp in part]
    else:
        support = _evaluate(ch, jobs)
    polygon = hull_polygon(triple_to_polygon(sp.triple) for sp in support)
    return RegionResult(polygon, tuple(support))
