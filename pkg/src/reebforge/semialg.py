"""Flat semialgebraic functions ``f = sum_i exp(1/g_i)`` on ``{g_i < 0}``.

Each term vanishes with all derivatives on ``{g_i >= 0}``, so ``f`` is zero
exactly on the basic set ``X = {g_i >= 0 for all i}``. The checks here sample
a parameterised manifold and look for critical points of ``f`` in the band
between its extreme values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateSampler, DimensionMismatch, InputError

# exp(1/g) is below the smallest normal double once 1/g < -708
FLUSH_EXPONENT = -708.0
DEFAULT_THRESHOLD = 1e-8


@dataclass(frozen=True)
class Polynomial:
    n: int
    terms: Tuple[Tuple[Tuple[int, ...], Fraction], ...]

    @classmethod
    def from_terms(cls, n: int, terms) -> "Polynomial":
        """``terms`` maps exponent tuples to coefficients (or is a list of pairs)."""
        items = terms.items() if isinstance(terms, dict) else terms
        acc: Dict[Tuple[int, ...], Fraction] = {}
        for exps, coeff in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise DimensionMismatch(f"exponent {exps} has length {len(exps)}, expected {n}")
            if any(e < 0 for e in exps):
                raise InputError(f"negative exponent in {exps}")
            acc[exps] = acc.get(exps, Fraction(0)) + Fraction(coeff)
        return cls(n, tuple(sorted((e, c) for e, c in acc.items() if c != 0)))

    @classmethod
    def coordinate(cls, n: int, i: int, sign: int = 1) -> "Polynomial":
        exps = [0] * n
        exps[i] = 1
        return cls.from_terms(n, {tuple(exps): sign})

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise DimensionMismatch(f"point has dimension {x.shape[-1]}, expected {self.n}")
        total = np.zeros(x.shape[:-1])
        for exps, c in self.terms:
            total = total + float(c) * np.prod(x ** np.array(exps), axis=-1)
        return total if total.ndim else float(total)

    def derivative(self, i: int) -> "Polynomial":
        out = {}
        for exps, c in self.terms:
            if exps[i]:
                e = list(exps)
                e[i] -= 1
                out[tuple(e)] = c * exps[i]
        return Polynomial.from_terms(self.n, out)

    def gradient(self) -> Tuple["Polynomial", ...]:
        return tuple(self.derivative(i) for i in range(self.n))


# samplers -------------------------------------------------------------------------


@dataclass(frozen=True)
class Samples:
    """Points on M with an orthonormal tangent basis per point (shape n x d)."""

    points: np.ndarray
    tangents: np.ndarray


def _orthonormal(jac: np.ndarray, d: int, tol: float = 1e-10) -> np.ndarray:
    q, r = np.linalg.qr(jac)
    diag = np.abs(np.diagonal(r, axis1=-2, axis2=-1))
    if np.any(diag < tol):
        raise DegenerateSampler("tangent data is rank deficient at some sample")
    return q[..., :d]


@dataclass(frozen=True)
class ParametricSampler:
    """Grid over a box of parameters mapped by ``param`` with Jacobian ``jacobian``."""

    name: str
    n: int
    d: int
    param: Callable = field(repr=False)
    jacobian: Callable = field(repr=False)
    box: Tuple[Tuple[float, float], ...] = ()
    periodic: Tuple[bool, ...] = ()

    def sample(self, resolution: int) -> Samples:
        axes = []
        for (lo, hi), per in zip(self.box, self.periodic):
            axes.append(np.linspace(lo, hi, resolution, endpoint=not per))
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.d)
        pts = np.array([self.param(u) for u in grid])
        jac = np.array([self.jacobian(u) for u in grid])
        return Samples(pts, _orthonormal(jac, self.d))


@dataclass(frozen=True)
class SphereSampler:
    """Latitude-longitude grid on the unit sphere in R^3.

    Tangent spaces come from projecting out the normal x (the gradient of
    |x|^2 - 1), which stays well defined at the poles where the grid
    parameterisation degenerates.
    """

    name: str = "sphere"
    n: int = 3
    d: int = 2

    def sample(self, resolution: int) -> Samples:
        if resolution < 2:
            raise InputError("sphere resolution must be at least 2")
        theta = np.linspace(0.0, math.pi, resolution)
        lon = np.linspace(0.0, 2 * math.pi, resolution, endpoint=False)
        th, ph = np.meshgrid(theta, lon, indexing="ij")
        pts = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1).reshape(-1, 3)
        normals = pts / np.linalg.norm(pts, axis=1, keepdims=True)
        proj = np.eye(3)[None] - normals[:, :, None] * normals[:, None, :]
        return Samples(pts, _tangent_from_projection(proj, 2))


def _tangent_from_projection(proj: np.ndarray, d: int) -> np.ndarray:
    """Orthonormal basis of the range of each symmetric projection matrix."""
    w, v = np.linalg.eigh(proj)
    if np.any(np.abs(w[:, -d:] - 1.0) > 1e-8) or np.any(np.abs(w[:, :-d]) > 1e-8):
        raise DegenerateSampler("normal data does not give a projection of the expected rank")
    return v[:, :, -d:]


def circle_sampler() -> ParametricSampler:
    return ParametricSampler(
        "circle", 2, 1,
        lambda u: np.array([math.cos(u[0]), math.sin(u[0])]),
        lambda u: np.array([[-math.sin(u[0])], [math.cos(u[0])]]),
        ((0.0, 2 * math.pi),), (True,),
    )


def torus_sampler() -> ParametricSampler:
    """Flat torus (cos u, sin u, cos v, sin v) / sqrt 2 in R^4."""
    s = 1 / math.sqrt(2)

    def param(u):
        return s * np.array([math.cos(u[0]), math.sin(u[0]), math.cos(u[1]), math.sin(u[1])])

    def jac(u):
        return s * np.array([
            [-math.sin(u[0]), 0.0],
            [math.cos(u[0]), 0.0],
            [0.0, -math.sin(u[1])],
            [0.0, math.cos(u[1])],
        ])

    return ParametricSampler("torus", 4, 2, param, jac, ((0.0, 2 * math.pi),) * 2, (True, True))


SAMPLERS = {"sphere": SphereSampler, "circle": circle_sampler, "torus": torus_sampler}


def sampler(name: str):
    try:
        return SAMPLERS[name]()
    except KeyError:
        raise InputError(f"unknown sampler {name!r}; known: {', '.join(sorted(SAMPLERS))}") from None


@dataclass(frozen=True)
class SemialgSpec:
    g: Tuple[Polynomial, ...]
    manifold: object
    resolution: int = 100

    def __post_init__(self):
        if not self.g:
            raise InputError("at least one polynomial is required")
        dims = {p.n for p in self.g}
        if len(dims) != 1:
            raise DimensionMismatch(f"polynomials live in different dimensions {sorted(dims)}")
        if self.manifold.n not in dims:
            raise DimensionMismatch(f"sampler {self.manifold.name} lives in R^{self.manifold.n}")

    @property
    def n(self) -> int:
        return self.g[0].n


def hemisphere_spec(resolution: int = 100) -> SemialgSpec:
    return SemialgSpec((Polynomial.coordinate(3, 2),), SphereSampler(), resolution)


# evaluation ---------------------------------------------------------------------------


def _point(spec: SemialgSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.n,):
        raise DimensionMismatch(f"point has shape {x.shape}, expected ({spec.n},)")
    return x


def _term(gv: float) -> Tuple[float, bool]:
    """``(exp(1/g), flushed)`` for one inequality value."""
    if gv >= 0:
        return 0.0, False
    e = 1.0 / gv
    if e < FLUSH_EXPONENT:
        return 0.0, True
    return math.exp(e), False


def eval(spec: SemialgSpec, x) -> float:  # noqa: A001 - mirrors the maths name
    x = _point(spec, x)
    return sum(_term(p(x))[0] for p in spec.g)


def gradient(spec: SemialgSpec, x) -> np.ndarray:
    x = _point(spec, x)
    out = np.zeros(spec.n)
    for p in spec.g:
        gv = p(x)
        val, _ = _term(gv)
        if val == 0.0:
            continue
        grad = np.array([q(x) for q in p.gradient()])
        out -= val * grad / (gv * gv)
    return out


def _evaluate_samples(spec: SemialgSpec, pts: np.ndarray):
    gvals = np.stack([p(pts) for p in spec.g], axis=1)
    neg = gvals < 0
    with np.errstate(divide="ignore"):
        expo = np.where(neg, 1.0 / np.where(neg, gvals, -1.0), -np.inf)
    flushed = neg & (expo < FLUSH_EXPONENT)
    terms = np.where(neg & ~flushed, np.exp(np.where(neg & ~flushed, expo, 0.0)), 0.0)
    fvals = terms.sum(axis=1)
    grads = np.zeros_like(pts)
    for i, p in enumerate(spec.g):
        active = terms[:, i] > 0
        if not active.any():
            continue
        dg = np.stack([q(pts[active]) for q in p.gradient()], axis=1)
        scale = terms[active, i] / gvals[active, i] ** 2
        grads[active] -= scale[:, None] * dg
    return gvals, fvals, grads, flushed


@dataclass(frozen=True)
class NumericReebReport:
    passed: bool
    samples: int
    band: Tuple[float, float]
    band_samples: int
    min_projected_gradient_norm: Optional[float]
    argmin: Optional[Tuple[float, ...]]
    zero_set_consistent: bool
    inconsistent_samples: int
    flushed_samples: int
    max_value: float
    threshold: float
    x_samples: int = 0
    reasons: Tuple[str, ...] = ()

    def as_dict(self):
        return {
            "pass": self.passed,
            "samples": self.samples,
            "band": list(self.band),
            "band_samples": self.band_samples,
            "min_projected_gradient_norm": self.min_projected_gradient_norm,
            "argmin": list(self.argmin) if self.argmin is not None else None,
            "zero_set_consistent": self.zero_set_consistent,
            "inconsistent_samples": self.inconsistent_samples,
            "flushed_samples": self.flushed_samples,
            "max_value": self.max_value,
            "threshold": self.threshold,
            "x_samples": self.x_samples,
            "reasons": list(self.reasons),
        }


@dataclass(frozen=True)
class SampleTable:
    points: np.ndarray
    values: np.ndarray
    projected_norms: np.ndarray

    def rows(self) -> List[List[float]]:
        return [list(map(float, p)) + [float(v), float(g)]
                for p, v, g in zip(self.points, self.values, self.projected_norms)]


def sample_table(spec: SemialgSpec, resolution: Optional[int] = None) -> SampleTable:
    s = spec.manifold.sample(resolution or spec.resolution)
    _, fvals, grads, _ = _evaluate_samples(spec, s.points)
    proj = np.einsum("pnd,pn->pd", s.tangents, grads)
    return SampleTable(s.points, fvals, np.linalg.norm(proj, axis=1))


def verify_reeb_numeric(spec: SemialgSpec, delta: float, grid: Optional[int] = None,
                        threshold: float = DEFAULT_THRESHOLD) -> NumericReebReport:
    """Sampled surrogate for "only the extreme values are critical".

    Samples with ``delta < f < max f - delta`` must have a tangential
    gradient above ``threshold``, and ``f == 0`` must coincide with
    membership in X. Points where ``exp(1/g)`` underflows count as zeros and
    are reported as the flush band.
    """
    s = spec.manifold.sample(grid or spec.resolution)
    gvals, fvals, grads, flushed = _evaluate_samples(spec, s.points)
    in_x = np.all(gvals >= 0, axis=1)
    flush_rows = flushed.any(axis=1) & (fvals == 0)
    zero = fvals == 0
    bad = (zero != in_x) & ~flush_rows
    fmax = float(fvals.max()) if len(fvals) else 0.0
    reasons = []
    if fmax == 0.0:
        reasons.append("X = M violates X ⊊ M")
        return NumericReebReport(False, len(fvals), (0.0, 0.0), 0, None, None, not bad.any(),
                                 int(bad.sum()), int(flush_rows.sum()), 0.0, threshold,
                                 int(in_x.sum()), tuple(reasons))
    if not 0 < delta < fmax / 2:
        raise InputError(f"delta must lie in (0, {fmax / 2:.6g}), half the sampled range of f")
    lo, hi = delta, fmax - delta
    band = (fvals > lo) & (fvals < hi)
    proj = np.einsum("pnd,pn->pd", s.tangents[band], grads[band])
    norms = np.linalg.norm(proj, axis=1)
    min_norm = argmin = None
    if len(norms):
        i = int(np.argmin(norms))
        min_norm = float(norms[i])
        argmin = tuple(float(c) for c in s.points[band][i])
        if not min_norm > threshold:
            reasons.append(f"projected gradient {min_norm:.3g} at or below threshold {threshold:g}")
    else:
        reasons.append("no sample falls in the band")
    if bad.any():
        reasons.append(f"{int(bad.sum())} samples disagree between f = 0 and membership in X")
    return NumericReebReport(not reasons, len(fvals), (lo, hi), int(band.sum()), min_norm, argmin,
                             not bad.any(), int(bad.sum()), int(flush_rows.sum()), fmax, threshold,
                             int(in_x.sum()), tuple(reasons))
