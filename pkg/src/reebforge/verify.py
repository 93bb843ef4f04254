"""Combinatorial Reeb-function checks for PL maps.

A vertex counts as regular when both its lower and upper links are
non-empty and Z/2-acyclic. Acyclic is weaker than collapsible, so the class
is called ``regular_certified`` and anything else is ``suspect_critical``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from .complex import (
    SimplicialComplex,
    Subcomplex,
    connected_components,
    euler_characteristic,
    is_orientable,
    link,
)
from .errors import (
    ChiMismatch,
    DimensionNot3,
    DomainMismatch,
    ExtremaNotGraphs,
    InputError,
    VertexNotFound,
)
from .homology import reduced_betti_z2
from .plmap import PLMap, as_fraction

MIN_LIKE = "min_like"
MAX_LIKE = "max_like"
REGULAR = "regular_certified"
SUSPECT = "suspect_critical"


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("REEBFORGE_THREADS", "1")))
    except ValueError:
        return 1


def _check(m: SimplicialComplex, f: PLMap, v: int):
    if f.domain != m:
        raise DomainMismatch("the map is defined on a different complex")
    if v not in f.values:
        raise VertexNotFound(f"vertex {v} is not in the complex")


def lower_link(m: SimplicialComplex, f: PLMap, v: int) -> SimplicialComplex:
    _check(m, f, v)
    lk = link(m, (v,))
    kv = f.key(v)
    return lk.full_subcomplex(w for w in lk.vertices if f.key(w) < kv)


def upper_link(m: SimplicialComplex, f: PLMap, v: int) -> SimplicialComplex:
    _check(m, f, v)
    lk = link(m, (v,))
    kv = f.key(v)
    return lk.full_subcomplex(w for w in lk.vertices if f.key(w) > kv)


@dataclass(frozen=True)
class VertexClass:
    vertex: int
    kind: str
    value: Fraction
    lower_betti: Tuple[int, ...]
    upper_betti: Tuple[int, ...]

    def as_dict(self):
        return {
            "vertex": self.vertex,
            "class": self.kind,
            "value": str(self.value),
            "lower_link_reduced_z2": list(self.lower_betti),
            "upper_link_reduced_z2": list(self.upper_betti),
        }


def classify_vertex(m: SimplicialComplex, f: PLMap, v: int) -> VertexClass:
    lo = lower_link(m, f, v)
    up = upper_link(m, f, v)
    lb = reduced_betti_z2(lo)
    ub = reduced_betti_z2(up)
    if lo.is_empty():
        kind = MIN_LIKE
    elif up.is_empty():
        kind = MAX_LIKE
    elif not any(lb) and not any(ub):
        kind = REGULAR
    else:
        kind = SUSPECT
    return VertexClass(v, kind, f.values[v], lb, ub)


def classify_all(m: SimplicialComplex, f: PLMap) -> Tuple[VertexClass, ...]:
    verts = m.vertices
    threads = worker_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return tuple(pool.map(lambda v: classify_vertex(m, f, v), verts))
    return tuple(classify_vertex(m, f, v) for v in verts)


@dataclass(frozen=True)
class ReebReport:
    classes: Tuple[VertexClass, ...] = field(repr=False)
    critical_values: Tuple[Fraction, ...]
    is_reeb: bool
    extrema: Tuple[Tuple[int, ...], Tuple[int, ...]]
    reasons: Tuple[str, ...] = ()
    zero_set_matches: Optional[bool] = None
    genus_bound: Optional[int] = None
    duality: Optional[object] = None

    def counts(self):
        out = {MIN_LIKE: 0, MAX_LIKE: 0, REGULAR: 0, SUSPECT: 0}
        for c in self.classes:
            out[c.kind] += 1
        return out

    def classification(self):
        return {c.vertex: c.kind for c in self.classes}

    def as_dict(self, per_vertex: bool = False):
        out = {
            "is_reeb": self.is_reeb,
            "critical_values": [str(x) for x in self.critical_values],
            "class_counts": self.counts(),
            "x0_vertices": list(self.extrema[0]),
            "x1_vertices": list(self.extrema[1]),
            "reasons": list(self.reasons),
        }
        if self.zero_set_matches is not None:
            out["zero_set_matches_expected"] = self.zero_set_matches
        if self.genus_bound is not None:
            out["genus_bound"] = self.genus_bound
        if self.duality is not None:
            out["duality"] = self.duality.as_dict()
        if per_vertex:
            out["vertices"] = [c.as_dict() for c in self.classes]
        return out


def verify_reeb(m: SimplicialComplex, f: PLMap, expected_x0=None) -> ReebReport:
    """Classify every vertex and decide the two-critical-value property.

    Non-regular vertices are tolerated on the extreme levels 0 and 1 (a flat
    critical level holds many vertices, most of them neither min- nor
    max-like); anywhere else they make the map fail.
    """
    if f.domain != m:
        raise DomainMismatch("the map is defined on a different complex")
    classes = classify_all(m, f)
    zero, one = Fraction(0), Fraction(1)
    reasons = []
    for c in classes:
        if c.kind == MIN_LIKE and c.value != zero:
            reasons.append(f"vertex {c.vertex} is min-like at value {c.value}")
        elif c.kind == MAX_LIKE and c.value != one:
            reasons.append(f"vertex {c.vertex} is max-like at value {c.value}")
        elif c.kind == SUSPECT and c.value not in (zero, one):
            reasons.append(f"vertex {c.vertex} is suspect-critical at value {c.value}")
    x0 = f.level(zero)
    x1 = f.level(one)
    if not x0:
        reasons.append("no vertex attains 0")
    if not x1:
        reasons.append("no vertex attains 1")
    matches = None
    if expected_x0 is not None:
        exp = expected_x0.complex if isinstance(expected_x0, Subcomplex) else expected_x0
        matches = f.preimage(zero) == exp
        if not matches:
            reasons.append("the zero set differs from the expected subcomplex")
    crit = sorted({c.value for c in classes if c.kind != REGULAR})
    return ReebReport(classes, tuple(crit), not reasons, (x0, x1), tuple(reasons), matches)


def interlevel_complex(m: SimplicialComplex, f: PLMap, a, b) -> Subcomplex:
    a, b = as_fraction(a), as_fraction(b)
    if a > b:
        raise InputError("interlevel bounds must satisfy a <= b")
    keep = [v for v, x in f.values.items() if a <= x <= b]
    return Subcomplex(m, m.full_subcomplex(keep))


def genus_bound(chi: int, orientable: bool) -> int:
    """Heegaard genus bound from extrema that are graphs of Euler characteristic chi."""
    if chi > 1:
        raise ChiMismatch("connected graphs have Euler characteristic at most 1")
    return 1 - chi if orientable else 2 - 2 * chi


@dataclass(frozen=True)
class HeegaardBound:
    genus_bound: int
    case: str
    chi: int

    def as_dict(self):
        return {"genus_bound": self.genus_bound, "case": self.case, "chi": self.chi}


def heegaard_bound(m: SimplicialComplex, report: ReebReport) -> HeegaardBound:
    if m.dimension != 3:
        raise DimensionNot3(f"M has dimension {m.dimension}, not 3")
    if not report.is_reeb:
        raise InputError("the bound needs a verified Reeb function")
    chis = []
    for verts in report.extrema:
        x = m.full_subcomplex(verts)
        if x.dimension > 1 or len(connected_components(x)) != 1:
            raise ExtremaNotGraphs("both extrema must be connected graphs")
        chis.append(euler_characteristic(x))
    if chis[0] != chis[1]:
        raise ChiMismatch(f"extrema have Euler characteristics {chis[0]} and {chis[1]}")
    orient = is_orientable(m)
    return HeegaardBound(genus_bound(chis[0], orient), "orientable" if orient else "non-orientable", chis[0])
