"""Shannon quantities over dense joint distributions.

Everything is in bits. Mutual informations are computed as entropy
differences so that zero-probability cells never enter a ratio.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import check_cond, check_pmf, require_valid

AXES = ("U", "V", "X1", "X2", "Y", "Y1")
MAX_JOINT_CELLS = 10**8
CONSISTENCY_TOL = 1e-10


class InternalConsistencyError(ArithmeticError):
    """An information measure came out clearly negative, or a Markov check failed."""


class JointSizeError(ValueError):
    pass


@dataclass(frozen=True)
class ProductInputPolicy:
    """Independent inputs p(x1) p(x2)."""

    px1: np.ndarray
    px2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "px1", check_pmf(self.px1, "pX1"))
        object.__setattr__(self, "px2", check_pmf(self.px2, "pX2"))

    def to_dict(self):
        return {"pX1": self.px1.tolist(), "pX2": self.px2.tolist()}


@dataclass(frozen=True)
class AuxInputPolicy:
    """Factored input law p(u) p(v|u) p(x1|u) p(x2|v)."""

    pu: np.ndarray
    pv_u: np.ndarray
    px1_u: np.ndarray
    px2_v: np.ndarray

    def __post_init__(self):
        pu = check_pmf(self.pu, "pU")
        pv_u = check_cond(self.pv_u, "pVgivenU")
        px1_u = check_cond(self.px1_u, "pX1givenU")
        px2_v = check_cond(self.px2_v, "pX2givenV")
        if pv_u.shape[0] != pu.size:
            raise ValueError(f"pVgivenU has {pv_u.shape[0]} rows but |U| = {pu.size}")
        if px1_u.shape[0] != pu.size:
            raise ValueError(f"pX1givenU has {px1_u.shape[0]} rows but |U| = {pu.size}")
        if px2_v.shape[0] != pv_u.shape[1]:
            raise ValueError(f"pX2givenV has {px2_v.shape[0]} rows but |V| = {pv_u.shape[1]}")
        for name, arr in (("pu", pu), ("pv_u", pv_u), ("px1_u", px1_u), ("px2_v", px2_v)):
            object.__setattr__(self, name, arr)

    @property
    def nu(self):
        return self.pu.size

    @property
    def nv(self):
        return self.pv_u.shape[1]

    @property
    def nx1(self):
        return self.px1_u.shape[1]

    @property
    def nx2(self):
        return self.px2_v.shape[1]

    @classmethod
    def from_product(cls, policy):
        """Embed a product policy as |U| = 1, V = X2."""
        nx2 = policy.px2.size
        return cls(np.ones(1), policy.px2[None, :], policy.px1[None, :], np.eye(nx2))

    @classmethod
    def random(cls, rng, nu, nv, nx1, nx2):
        """Every row drawn uniformly from its simplex."""
        return cls(rng.dirichlet(np.ones(nu)),
                   rng.dirichlet(np.ones(nv), size=nu),
                   rng.dirichlet(np.ones(nx1), size=nu),
                   rng.dirichlet(np.ones(nx2), size=nv))

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["pU"], doc["pVgivenU"], doc["pX1givenU"], doc["pX2givenV"])

    def to_dict(self):
        return {"pU": self.pu.tolist(), "pVgivenU": self.pv_u.tolist(),
                "pX1givenU": self.px1_u.tolist(), "pX2givenV": self.px2_v.tolist()}


def policy_from_dict(doc):
    if "pU" in doc:
        return AuxInputPolicy.from_dict(doc)
    return ProductInputPolicy(doc["pX1"], doc["pX2"])


@dataclass(frozen=True)
class JointPmf:
    axes: tuple
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        if mass.ndim != len(self.axes):
            raise ValueError(f"{len(self.axes)} axis names for a {mass.ndim}-D tensor")
        if len(set(self.axes)) != len(self.axes):
            raise ValueError(f"repeated axis names in {self.axes}")
        mass.setflags(write=False)
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "mass", mass)

    @property
    def sizes(self):
        return dict(zip(self.axes, self.mass.shape))

    def marginal(self, axes):
        """Marginal tensor over ``axes``, in the order given."""
        axes = _axis_list(axes)
        missing = [a for a in axes if a not in self.axes]
        if missing:
            raise KeyError(f"unknown axes {missing}; joint has {self.axes}")
        drop = tuple(i for i, a in enumerate(self.axes) if a not in axes)
        m = self.mass.sum(axis=drop) if drop else self.mass
        kept = [a for a in self.axes if a in axes]
        return np.transpose(m, [kept.index(a) for a in axes])


def _axis_list(axes):
    if isinstance(axes, str):
        return [axes]
    return list(axes)


def _check_joint_size(cells):
    if cells > MAX_JOINT_CELLS:
        raise JointSizeError(f"joint would have {cells} cells (limit {MAX_JOINT_CELLS})")


def build_joint(ch, policy):
    """Materialize p(u,v,x1,x2,y,y1) (or p(x1,x2,y,y1) for a product policy)."""
    require_valid(ch)
    if isinstance(policy, ProductInputPolicy):
        if policy.px1.size != ch.nx1:
            raise ValueError(f"pX1 has {policy.px1.size} entries but |X1| = {ch.nx1}")
        if policy.px2.size != ch.nx2:
            raise ValueError(f"pX2 has {policy.px2.size} entries but |X2| = {ch.nx2}")
        _check_joint_size(ch.p.size)
        mass = np.einsum("a,b,abyz->abyz", policy.px1, policy.px2, ch.p)
        return JointPmf(("X1", "X2", "Y", "Y1"), mass)
    if policy.nx1 != ch.nx1:
        raise ValueError(f"pX1givenU has {policy.nx1} columns but |X1| = {ch.nx1}")
    if policy.nx2 != ch.nx2:
        raise ValueError(f"pX2givenV has {policy.nx2} columns but |X2| = {ch.nx2}")
    _check_joint_size(policy.nu * policy.nv * ch.p.size)
    mass = np.einsum("u,uv,ua,vb,abyz->uvabyz",
                     policy.pu, policy.pv_u, policy.px1_u, policy.px2_v, ch.p)
    return JointPmf(AXES, mass)


def _h(p):
    p = p[p > 0]
    return float(-np.dot(p, np.log2(p)))


def entropy(j, axes):
    """H of the marginal on ``axes``; an empty selection has zero entropy."""
    axes = _axis_list(axes)
    if not axes:
        return 0.0
    return _h(j.marginal(axes).ravel())


def mutual_information_raw(j, a, b, given=()):
    """I(A;B|C) without clamping."""
    a, b, c = _axis_list(a), _axis_list(b), _axis_list(given)
    if not a or not b:
        raise ValueError("both sides of a mutual information must be nonempty")
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise ValueError(f"axis sets overlap: {a} / {b} / {c}")
    return entropy(j, a + c) + entropy(j, b + c) - entropy(j, a + b + c) - entropy(j, c)


def mutual_information(j, a, b, given=()):
    """I(A;B|C) in bits; float noise below zero is clamped, real negatives raise."""
    val = mutual_information_raw(j, a, b, given)
    if val < -CONSISTENCY_TOL:
        raise InternalConsistencyError(f"I({a};{b}|{given}) = {val:.3e} < 0")
    return max(val, 0.0)


def markov_residuals(j):
    """Residuals that vanish when ``j`` factors as p(u)p(v|u)p(x1|u)p(x2|v)p(y,y1|x1,x2)."""
    return {
        "I(U;X2|V)": mutual_information_raw(j, "U", "X2", "V"),
        "I(V;X1|U)": mutual_information_raw(j, "V", "X1", "U"),
        "I(U,V;Y,Y1|X1,X2)": mutual_information_raw(j, ["U", "V"], ["Y", "Y1"], ["X1", "X2"]),
    }


def check_markov(j, tol=CONSISTENCY_TOL):
    for name, val in markov_residuals(j).items():
        if abs(val) > tol:
            raise InternalConsistencyError(f"Markov residual {name} = {val:.3e}")
