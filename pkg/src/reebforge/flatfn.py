"""Arbitrarily flat monotone functions on [0, 1].

``gamma(t) = int_0^t int_0^s f`` where ``f`` is built from rescaled copies of
the smooth step ``phi`` on the intervals ``[1/(k+1), 1/k]``. The infinite
construction is truncated after ``K`` pieces; the remaining mass sits in one
stretched step on ``[0, 1/(K+1)]`` so that ``gamma' > 0`` still holds on all
of ``(0, 1]``. Sequence conditions are checked over rationals, evaluation is
floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .errors import InfeasibleSequence, InputError, OrderTooLarge
from .jets import MAX_ORDER, smooth_step_series
from .plmap import PLMap

# zeta(4) = pi^4 / 90
SIGMA = math.sqrt(math.pi ** 4 / 90)


def _zeta4_upper(n_terms: int = 60) -> Fraction:
    partial = sum(Fraction(1, j ** 4) for j in range(1, n_terms + 1))
    return partial + Fraction(1, 3 * n_terms ** 3)


SIGMA_SQ_UPPER = _zeta4_upper()


def phi(x: float) -> float:
    if x <= 0:
        return 0.0
    if x >= 1:
        return 1.0
    g = 1.0 / x - 1.0 / (1.0 - x)
    if g > 0:
        e = math.exp(-g) if g < 745 else 0.0
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(g)) if g > -745 else 1.0


def phi_jet(x: float, k: int, max_order: int = MAX_ORDER) -> np.ndarray:
    """``(phi(x), phi'(x), ..., phi^(k)(x))`` by Taylor arithmetic."""
    if k > max_order:
        raise OrderTooLarge(f"order {k} exceeds the configured maximum {max_order}")
    if k < 0:
        raise InputError("order must be non-negative")
    out = np.zeros(k + 1)
    if x <= 0:
        return out
    if x >= 1:
        out[0] = 1.0
        return out
    g0 = 1.0 / x - 1.0 / (1.0 - x)
    if g0 > 740:
        return out
    if g0 < -740:
        out[0] = 1.0
        return out
    return smooth_step_series(x, k).derivatives()


def _chebyshev_unit(n: int) -> np.ndarray:
    i = np.arange(n)
    return (1 - np.cos(np.pi * i / (n - 1))) / 2


def piece_sup(scale: float, top_order: int, grid: int = 64) -> float:
    """Estimated sup over [0, 1] of ``sum_{j<=top_order} scale^j |phi^(j)|``."""
    if top_order < 0:
        return 0.0
    weights = scale ** np.arange(top_order + 1)
    best = 0.0
    for u in _chebyshev_unit(grid):
        best = max(best, float(np.dot(weights, np.abs(phi_jet(float(u), top_order)))))
    return best


@dataclass(frozen=True)
class FlatFunction:
    """Parameters of one truncated flat function.

    ``a`` holds a_1..a_K and ``tail`` the extra mass a_{K+1} spread over
    [0, 1/(K+1)]; ``A`` includes the tail, so ``b_K - (1 - A) == tail``.
    """

    c: Tuple[Fraction, ...]
    a: Tuple[Fraction, ...]
    tail: Fraction
    b: Tuple[Fraction, ...]
    A: Fraction
    K: int
    sigma: float = SIGMA
    quad_tol: float = 1e-12
    _m0: Tuple[float, ...] = field(default=(), repr=False, compare=False)
    _w: Tuple[float, ...] = field(default=(), repr=False, compare=False)

    @property
    def sequence(self) -> Tuple[Fraction, ...]:
        """a_1, ..., a_K followed by the tail a_{K+1}."""
        return self.a + (self.tail,)

    def breakpoints(self) -> List[float]:
        """Piece boundaries in increasing order: 0, 1/(K+1), ..., 1/2, 1."""
        return [0.0] + [1.0 / k for k in range(self.K + 1, 0, -1)]

    # the integrand -----------------------------------------------------------
    def _piece(self, t: float) -> int:
        """Index k of the piece holding t; K+1 means the tail."""
        if t <= 1.0 / (self.K + 1):
            return self.K + 1
        return min(max(int(math.floor(1.0 / t)), 1), self.K)

    def f(self, t: float) -> float:
        k = self._piece(t)
        if k == self.K + 1:
            return float(self.tail) * phi((self.K + 1) * t)
        offset = float(self.b[k - 1] - (1 - self.A))
        return float(self.a[k - 1]) * phi(k * (k + 1) * t - k) + offset

    def f_jet(self, t: float, order: int) -> np.ndarray:
        k = self._piece(t)
        if k == self.K + 1:
            scale, amp, u, offset = self.K + 1, float(self.tail), (self.K + 1) * t, 0.0
        else:
            scale, amp, u = k * (k + 1), float(self.a[k - 1]), k * (k + 1) * t - k
            offset = float(self.b[k - 1] - (1 - self.A))
        jet = amp * phi_jet(u, order) * float(scale) ** np.arange(order + 1)
        jet[0] += offset
        return jet


def _quad(fn, lo, hi, tol):
    val, _ = integrate.quad(fn, lo, hi, epsabs=tol, epsrel=1e-13, limit=200)
    return val


def _with_moments(ff: FlatFunction) -> FlatFunction:
    bp = ff.breakpoints()
    m0, w = [], []
    for lo, hi in zip(bp, bp[1:]):
        m0.append(_quad(ff.f, lo, hi, ff.quad_tol))
        w.append(_quad(lambda x, hi=hi: (hi - x) * ff.f(x), lo, hi, ff.quad_tol))
    object.__setattr__(ff, "_m0", tuple(m0))
    object.__setattr__(ff, "_w", tuple(w))
    return ff


def sequence_conditions(ff: FlatFunction) -> dict:
    """The three sequence conditions, checked exactly over the rationals.

    The sigma condition uses a rational upper bound for sigma^2, so a pass is
    conclusive.
    """
    seq = ff.sequence
    c = ff.c
    K = ff.K
    decreasing = all(x >= y for x, y in zip(seq, seq[1:])) and all(x > 0 for x in seq)
    total_ok = sum(seq) < 1
    tails = [all(sum(seq[k:]) <= c[k] / 3 for k in range(1, K + 1))]
    squares = [
        9 * SIGMA_SQ_UPPER * sum(x * x for x in seq[k - 1:]) <= c[k] ** 2 for k in range(1, K + 1)
    ]
    return {
        "decreasing_and_sum_below_one": decreasing and total_ok,
        "tail_sums": all(tails),
        "square_tails": all(squares),
    }


def _validate_c(c: Sequence, K: int) -> Tuple[Fraction, ...]:
    if K < 1:
        raise InputError("K must be at least 1")
    c = tuple(Fraction(x) for x in c)
    if len(c) < K + 1:
        raise InputError(f"need c_0..c_K ({K + 1} values), got {len(c)}")
    c = c[:K + 1]
    if any(x <= 0 for x in c):
        raise InfeasibleSequence("c must be positive")
    if c[0] >= 1:
        raise InfeasibleSequence("c_0 must be below 1")
    if any(x < y for x, y in zip(c, c[1:])):
        raise InfeasibleSequence("c must be decreasing")
    return c


def make_flat(c: Sequence, K: int, max_exponent: int = 200, grid: int = 64,
              quad_tol: float = 1e-12) -> FlatFunction:
    """Choose dyadic a_k greedily, largest first, subject to every bound.

    The sup bound on the derivatives of each piece is estimated on a
    Chebyshev grid and required with a factor-2 margin. Each new term takes
    at most half of the slack left in the sum conditions, so later terms
    always fit.
    """
    c = _validate_c(c, K)
    sig2 = SIGMA_SQ_UPPER
    chosen: List[Fraction] = []
    for k in range(1, K + 2):
        is_tail = k == K + 1
        if is_tail:
            sup = piece_sup(K + 1, K - 2, grid)
            sup_cap = c[K] / 3
        else:
            sup = piece_sup(k * (k + 1), k - 2, grid)
            sup_cap = c[k] / 3
        caps: List[Fraction] = []
        if chosen:
            caps.append(chosen[-1])
        caps.append((1 - sum(chosen)) / 2)
        for i in range(1, min(k, K + 1)):
            caps.append((c[i] / 3 - sum(chosen[i:])) / 2)
        sq_caps = [(c[i] ** 2 / (9 * sig2) - sum(x * x for x in chosen[i - 1:])) / 2
                   for i in range(1, min(k, K) + 1)]
        pick = None
        for m in range(1, max_exponent + 1):
            a = Fraction(1, 2 ** m)
            if sup > 0 and 2 * float(a) * sup > float(sup_cap):
                continue
            if any(a > cap for cap in caps):
                continue
            if any(a * a > cap for cap in sq_caps):
                continue
            pick = a
            break
        if pick is None:
            raise InfeasibleSequence(f"no dyadic a_{k} down to 2^-{max_exponent} satisfies the bounds")
        chosen.append(pick)
    a = tuple(chosen[:K])
    tail = chosen[K]
    A = sum(chosen)
    b = []
    run = Fraction(1)
    for x in a:
        run -= x
        b.append(run)
    ff = FlatFunction(c, a, tail, tuple(b), A, K, quad_tol=quad_tol)
    return _with_moments(ff)


def parse_c_spec(spec: str, K: int) -> Tuple[Fraction, ...]:
    """``2^-k``, ``2^-k/k`` (with c_0 = 3/4) or a comma list c_0,c_1,..."""
    s = spec.replace(" ", "")
    if s in ("2^-k", "2**-k"):
        return tuple(Fraction(1, 2 ** k) if k else Fraction(3, 4) for k in range(K + 1))
    if s in ("2^-k/k", "2**-k/k"):
        return default_c(K)
    try:
        return tuple(Fraction(x) for x in s.split(","))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"cannot parse c sequence {spec!r}") from None


def default_c(K: int) -> Tuple[Fraction, ...]:
    """c_k = 2^-k / k for k >= 1, with c_0 = 3/4 (any value in (1/2, 1) works)."""
    return (Fraction(3, 4),) + tuple(Fraction(1, 2 ** k * k) for k in range(1, K + 1))


# gamma ---------------------------------------------------------------------------


def _check_t(t: float):
    if not 0 <= t <= 1:
        raise InputError(f"t = {t} outside [0, 1]")


def gamma_prime(ff: FlatFunction, t: float) -> float:
    _check_t(t)
    total = 0.0
    bp = ff.breakpoints()
    for p, (lo, hi) in enumerate(zip(bp, bp[1:])):
        if t >= hi:
            total += ff._m0[p]
        else:
            if t > lo:
                total += _quad(ff.f, lo, t, ff.quad_tol)
            break
    return total


def eval_gamma(ff: FlatFunction, t: float) -> float:
    """gamma(t) = int_0^t (t - x) f(x) dx, split at the piece boundaries."""
    _check_t(t)
    total = 0.0
    bp = ff.breakpoints()
    for p, (lo, hi) in enumerate(zip(bp, bp[1:])):
        if t >= hi:
            total += (t - hi) * ff._m0[p] + ff._w[p]
        else:
            if t > lo:
                total += _quad(lambda x: (t - x) * ff.f(x), lo, t, ff.quad_tol)
            break
    return total


def gamma_jet(ff: FlatFunction, t: float, k: int) -> np.ndarray:
    """``(gamma, gamma', gamma'', ..., gamma^(k))`` at t; gamma^(j) = f^(j-2) for j >= 2."""
    _check_t(t)
    if k < 0:
        raise InputError("order must be non-negative")
    if k - 2 > MAX_ORDER:
        raise OrderTooLarge(f"order {k} exceeds the configured maximum {MAX_ORDER + 2}")
    out = np.zeros(k + 1)
    out[0] = eval_gamma(ff, t)
    if k >= 1:
        out[1] = gamma_prime(ff, t)
    if k >= 2:
        out[2:] = ff.f_jet(t, k - 2)
    return out


@dataclass(frozen=True)
class FlatBoundReport:
    passed: bool
    k: int
    c_k: Fraction
    worst_margin: float
    max_jet_sum: float
    samples: int

    def as_dict(self):
        return {
            "pass": self.passed,
            "k": self.k,
            "c_k": str(self.c_k),
            "worst_margin": self.worst_margin,
            "max_jet_sum": self.max_jet_sum,
            "samples": self.samples,
        }


def verify_flat_bounds(ff: FlatFunction, k: int, sample_count: int = 200) -> FlatBoundReport:
    """Check sum_{j<=k} |gamma^(j)(t)| <= c_k on an even grid of (0, 1/k]."""
    if not 1 <= k <= ff.K:
        raise InputError(f"k must lie in 1..{ff.K}")
    ck = float(ff.c[k])
    worst = math.inf
    top = 0.0
    for i in range(1, sample_count + 1):
        t = i / (sample_count * k)
        s = float(np.abs(gamma_jet(ff, t, k)).sum())
        top = max(top, s)
        worst = min(worst, ck - s)
    return FlatBoundReport(worst >= 0, k, ff.c[k], worst, top, sample_count)


def continuity_gaps(ff: FlatFunction) -> List[float]:
    """|left piece - right piece| of f at each interior breakpoint."""
    gaps = []
    K = ff.K
    for k in range(1, K + 1):
        t = 1.0 / (k + 1)
        right = float(ff.a[k - 1]) * phi(0.0) + float(ff.b[k - 1] - (1 - ff.A))
        if k < K:
            left = float(ff.a[k]) * phi(1.0) + float(ff.b[k] - (1 - ff.A))
        else:
            left = float(ff.tail) * phi((K + 1) * t)
        gaps.append(abs(left - right))
    return gaps


def table(ff: FlatFunction, k: int, samples: int) -> List[List[float]]:
    """Rows ``[t, gamma, gamma', ..., gamma^(k)]`` on an even grid of [0, 1]."""
    rows = []
    for i in range(samples + 1):
        t = i / samples
        rows.append([t] + [float(x) for x in gamma_jet(ff, t, k)])
    return rows


def compose_with_plmap(ff: Optional[FlatFunction], f: PLMap) -> PLMap:
    """Reparameterise vertex values by ``gamma / gamma(1)``; order is preserved."""
    from .errors import NotMonotone

    if ff is None:
        ff = make_flat(default_c(8), 8)
    g1 = eval_gamma(ff, 1.0)
    levels = sorted(set(f.values.values()))
    image = {}
    for x in levels:
        if x == 0:
            image[x] = Fraction(0)
        elif x == 1:
            image[x] = Fraction(1)
        else:
            image[x] = Fraction(eval_gamma(ff, float(x)) / g1)
    for lo, hi in zip(levels, levels[1:]):
        if not image[lo] < image[hi]:
            raise NotMonotone(f"gamma collapsed the values {lo} and {hi} in floating point")
    return PLMap(f.domain, {v: image[x] for v, x in f.values.items()}, f.tie_break)
