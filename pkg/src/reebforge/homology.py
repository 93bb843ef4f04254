"""Simplicial homology over Q, Z/2 and Z.

Integer ranks and torsion come from a Smith normal form that first peels off
unit pivots on the sparse matrix (unimodular, so invariant factors are
untouched) and only then runs a dense reduction on whatever is left. Over
Z/2, columns are Python ints used as bitsets.
"""
from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass, field
from math import gcd
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .complex import SimplicialComplex, euler_characteristic, is_closed_pseudomanifold, is_orientable
from .errors import (
    CoefficientNotValidForNonorientable,
    DimensionOutOfRange,
    InputError,
    NotAHomologySphere,
    NotClosedPseudomanifold,
)

Q = "q"
Z2 = "z2"
Z = "z"
FIELDS = (Q, Z2)
_ALIASES = {"q": Q, "rational": Q, "rational-field": Q, "z2": Z2, "two-element-field": Z2,
            "f2": Z2, "z": Z, "integers": Z, "int": Z}


def coefficient(name: str) -> str:
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise InputError(f"unknown coefficients {name!r}; use q, z2 or z") from None


@dataclass(frozen=True)
class BoundaryMatrix:
    """Signed incidence between (dim-1)-faces (rows) and dim-faces (columns)."""

    dim: int
    rows: Tuple[tuple, ...]
    cols: Tuple[tuple, ...]
    entries: Dict[Tuple[int, int], int] = field(compare=False, hash=False)

    @property
    def shape(self):
        return len(self.rows), len(self.cols)

    def columns(self) -> List[Dict[int, int]]:
        out: List[Dict[int, int]] = [dict() for _ in self.cols]
        for (i, j), v in self.entries.items():
            out[j][i] = v
        return out

    def to_dense(self) -> np.ndarray:
        a = np.zeros(self.shape, dtype=np.int64)
        for (i, j), v in self.entries.items():
            a[i, j] = v
        return a


def boundary_matrix(c: SimplicialComplex, d: int) -> BoundaryMatrix:
    if d < 1 or d > c.dimension:
        raise DimensionOutOfRange(f"boundary dimension {d} outside 1..{c.dimension}")
    rows = tuple(c.sorted_faces(d - 1))
    cols = tuple(c.sorted_faces(d))
    row_index = {s: i for i, s in enumerate(rows)}
    entries = {}
    for j, s in enumerate(cols):
        for k in range(len(s)):
            entries[(row_index[s[:k] + s[k + 1:]], j)] = -1 if k % 2 else 1
    return BoundaryMatrix(d, rows, cols, entries)


# Smith normal form -----------------------------------------------------------------


def _normalize_diagonal(diag: List[int]) -> List[int]:
    d = sorted(abs(x) for x in diag if x)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            if g != d[i]:
                d[i], d[j] = g, d[i] // g * d[j]
    return d


def _dense_snf_diagonal(a: List[List[int]]) -> List[int]:
    """Diagonal (not yet divisibility-normalised) of an integer matrix."""
    a = [row[:] for row in a]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero magnitude in the trailing block
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        a[t], a[pi] = a[pi], a[t]
        if pj != t:
            for row in a:
                row[t], row[pj] = row[pj], row[t]
        while True:
            p = a[t][t]
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    if q:
                        ri, rt = a[i], a[t]
                        for j in range(t, n):
                            ri[j] -= q * rt[j]
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    if q:
                        for i in range(t, m):
                            a[i][j] -= q * a[i][t]
                    if a[t][j]:
                        done = False
            if done:
                break
            # a remainder is smaller than the pivot: move it into place
            best = None
            for i in range(t, m):
                if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                    best = (abs(a[i][t]), i, t)
            for j in range(t, n):
                if a[t][j] and abs(a[t][j]) < best[0]:
                    best = (abs(a[t][j]), t, j)
            _, pi, pj = best
            a[t], a[pi] = a[pi], a[t]
            if pj != t:
                for row in a:
                    row[t], row[pj] = row[pj], row[t]
        diag.append(a[t][t])
        t += 1
    return diag


def _eliminate_unit_pivots(cols: Dict[int, Dict[int, int]]) -> int:
    """Remove unit pivots in place; returns how many were removed.

    Columns are mutated; on return ``cols`` holds the residual matrix whose
    Smith form supplies the non-unit invariant factors.
    """
    rows: Dict[int, set] = defaultdict(set)
    for j, col in cols.items():
        for i in col:
            rows[i].add(j)
    heap = [(len(col), j) for j, col in cols.items()]
    heapq.heapify(heap)
    units = 0
    while heap:
        n, j = heapq.heappop(heap)
        col = cols.get(j)
        if col is None or len(col) != n:
            continue
        if n == 0:
            del cols[j]
            continue
        r = None
        for i, v in col.items():
            if (v == 1 or v == -1) and (r is None or len(rows[i]) < len(rows[r])):
                r = i
        if r is None:
            continue
        pv = col[r]
        for k in list(rows[r]):
            if k == j:
                continue
            colk = cols[k]
            factor = colk[r] * pv
            for i, v in col.items():
                nv = colk.get(i, 0) - factor * v
                if nv:
                    colk[i] = nv
                    rows[i].add(k)
                else:
                    colk.pop(i, None)
                    rows[i].discard(k)
            heapq.heappush(heap, (len(colk), k))
        for i in col:
            rows[i].discard(j)
        del cols[j]
        del rows[r]
        units += 1
    return units


def _snf_sparse(columns: Sequence[Dict[int, int]]) -> Tuple[List[int], int]:
    cols = {j: dict(c) for j, c in enumerate(columns) if c}
    units = _eliminate_unit_pivots(cols)
    rest = [c for c in cols.values() if c]
    if not rest:
        return [1] * units, units
    row_ids = sorted({i for c in rest for i in c})
    where = {i: k for k, i in enumerate(row_ids)}
    dense = [[0] * len(rest) for _ in row_ids]
    for j, c in enumerate(rest):
        for i, v in c.items():
            dense[where[i]][j] = v
    factors = [1] * units + _normalize_diagonal(_dense_snf_diagonal(dense))
    return factors, len(factors)


def smith_normal_form(m) -> Tuple[Tuple[int, ...], int]:
    """Invariant factors d1 | d2 | ... | dr of an integer matrix, and its rank.

    Accepts a nested sequence, a numpy array or a :class:`BoundaryMatrix`.
    Arithmetic is on Python ints, so there is no overflow.
    """
    if isinstance(m, BoundaryMatrix):
        columns = m.columns()
    else:
        rows = [[int(v) for v in row] for row in (m.tolist() if hasattr(m, "tolist") else m)]
        ncols = len(rows[0]) if rows else 0
        columns = [{i: rows[i][j] for i in range(len(rows)) if rows[i][j]} for j in range(ncols)]
    factors, rank = _snf_sparse(columns)
    return tuple(factors), rank


def rank_mod2(m: BoundaryMatrix) -> int:
    pivots: Dict[int, int] = {}
    for col in m.columns():
        x = 0
        for i, v in col.items():
            if v % 2:
                x |= 1 << i
        while x:
            low = x.bit_length() - 1
            p = pivots.get(low)
            if p is None:
                pivots[low] = x
                break
            x ^= p
    return len(pivots)


# homology ------------------------------------------------------------------------


@dataclass(frozen=True)
class HomologyProfile:
    coefficients: str
    betti: Tuple[int, ...]
    torsion: Tuple[Tuple[int, ...], ...] = ()
    reduced: bool = False

    def euler_characteristic(self) -> int:
        chi = sum((-1) ** i * b for i, b in enumerate(self.betti))
        return chi + 1 if self.reduced and self.betti else chi

    def total(self) -> int:
        return sum(self.betti)

    def as_dict(self):
        out = {"coefficients": self.coefficients, "betti": list(self.betti), "reduced": self.reduced}
        if self.coefficients == Z:
            out["torsion"] = [list(t) for t in self.torsion]
        return out


def _boundary_ranks(c: SimplicialComplex, coeff: str):
    ranks = {}
    torsion = {}
    for d in range(1, c.dimension + 1):
        bm = boundary_matrix(c, d)
        if coeff == Z2:
            ranks[d] = rank_mod2(bm)
        else:
            factors, r = smith_normal_form(bm)
            ranks[d] = r
            torsion[d] = tuple(f for f in factors if f > 1)
    return ranks, torsion


def homology(c: SimplicialComplex, coeff: str = Q, reduced: bool = False) -> HomologyProfile:
    """Betti numbers (and integral torsion for ``coeff="z"``).

    Over Z the Betti numbers are free ranks, which coincide with the Q ones.
    """
    coeff = coefficient(coeff)
    if c.is_empty():
        return HomologyProfile(coeff, (), (), reduced)
    ranks, tors = _boundary_ranks(c, coeff)
    fv = c.f_vector()
    n = c.dimension
    betti = []
    for d in range(n + 1):
        kernel = fv[d] - ranks.get(d, 0)
        betti.append(kernel - ranks.get(d + 1, 0))
    if reduced:
        betti[0] -= 1
    torsion = tuple(tors.get(d + 1, ()) for d in range(n + 1)) if coeff == Z else ()
    return HomologyProfile(coeff, tuple(betti), torsion, reduced)


def reduced_betti_z2(c: SimplicialComplex) -> Tuple[int, ...]:
    """Reduced Z/2 Betti numbers; the empty complex gives ``()``."""
    return homology(c, Z2, reduced=True).betti


def is_z2_acyclic(c: SimplicialComplex) -> bool:
    return not c.is_empty() and not any(reduced_betti_z2(c))


# necessary conditions for Reeb extrema ------------------------------------------


@dataclass(frozen=True)
class DualityReport:
    passed: bool
    coefficients: str
    dimension: int
    violations: Tuple[Tuple[int, int, int, int], ...]
    rows: Tuple[Tuple[int, int, int, int], ...]

    def as_dict(self):
        return {
            "pass": self.passed,
            "coefficients": self.coefficients,
            "dimension": self.dimension,
            "rows": [list(r) for r in self.rows],
            "violations": [list(v) for v in self.violations],
        }


def _b(profile: HomologyProfile, i: int) -> int:
    return profile.betti[i] if 0 <= i < len(profile.betti) else 0


def duality_betti_check(m: SimplicialComplex, x0: SimplicialComplex, x1: SimplicialComplex,
                        coeff: str = Z2) -> DualityReport:
    """Rank consequence of the exact sequence H_i(X1) -> H_i(M) -> H^{n-i}(X0).

    Over a field, exactness at H_i(M) gives b_i(M) <= b_i(X1) + b_{n-i}(X0).
    Cohomology Betti numbers are read off homology (universal coefficients).
    Each row is ``(i, b_i(M), b_i(X1), b_{n-i}(X0))``.
    """
    coeff = coefficient(coeff)
    if coeff not in FIELDS:
        raise InputError("the duality check needs field coefficients (q or z2)")
    rep = is_closed_pseudomanifold(m)
    if not rep.closed:
        raise NotClosedPseudomanifold("M must be a closed pseudomanifold")
    if coeff == Q and not is_orientable(m):
        raise CoefficientNotValidForNonorientable("use z2 coefficients on a non-orientable M")
    n = m.dimension
    hm, h0, h1 = homology(m, coeff), homology(x0, coeff), homology(x1, coeff)
    rows = []
    bad = []
    for i in range(n + 1):
        row = (i, _b(hm, i), _b(h1, i), _b(h0, n - i))
        rows.append(row)
        if row[1] > row[2] + row[3]:
            bad.append(row)
    return DualityReport(not bad, coeff, n, tuple(bad), tuple(rows))


@dataclass(frozen=True)
class BettiSumReport:
    passed: bool
    coefficients: str
    sums: Tuple[int, int]

    def as_dict(self):
        return {"pass": self.passed, "coefficients": self.coefficients, "sums": list(self.sums)}


def is_homology_sphere(m: SimplicialComplex, coeff: str = Q) -> bool:
    b = homology(m, coeff).betti
    n = m.dimension
    if n == 0:
        return b == (2,)
    return len(b) == n + 1 and b[0] == 1 and b[-1] == 1 and not any(b[1:-1])


def alexander_betti_sum_check(m: SimplicialComplex, x0: SimplicialComplex, x1: SimplicialComplex,
                              coeff: str = Q) -> BettiSumReport:
    """In a homology sphere the reduced Betti totals of both extrema agree."""
    coeff = coefficient(coeff)
    if coeff not in FIELDS:
        raise InputError("the Betti-sum check needs field coefficients (q or z2)")
    if not is_homology_sphere(m, coeff):
        raise NotAHomologySphere("M does not have the homology of a sphere")
    s0 = homology(x0, coeff, reduced=True).total()
    s1 = homology(x1, coeff, reduced=True).total()
    return BettiSumReport(s0 == s1, coeff, (s0, s1))


def euler_poincare_holds(c: SimplicialComplex, coeff: str = Q) -> bool:
    return homology(c, coeff).euler_characteristic() == euler_characteristic(c)
