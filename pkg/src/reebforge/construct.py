"""PL construction of a Reeb function with prescribed zero set.

Pipeline: subdivide twice, take the derived neighbourhood ``U`` of ``X`` and
its closed complement ``V``, collapse ``V`` to a spine ``Y``, then assign
values 0 on ``X``, ``1/2`` on the frontier and 1 on ``Y``, and glue the two
halves. Inside ``V`` the default ``harmonic`` scheme orders vertices by the
discrete harmonic interpolant between frontier and spine; the ``distance``
scheme orders all non-extreme vertices by ``(d_X, -d_Y)``.
"""
from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .complex import (
    SimplicialComplex,
    Subcomplex,
    SubdivisionRecord,
    _as_subcomplex,
    connected_components,
    derived_neighborhood,
    edge_distances,
    frontier,
    is_closed_pseudomanifold,
)
from .errors import (
    BoundaryMismatch,
    InvalidSubcomplex,
    NotClosedPseudomanifold,
    NotMonotone,
    RetriesExhausted,
    SubcomplexEqualsComplex,
)
from .plmap import PLMap, as_fraction, rank_values
from .verify import ReebReport, verify_reeb

FRONTIER_VALUE = Fraction(1, 2)
SCHEMES = ("harmonic", "distance")


# collapses ---------------------------------------------------------------------


@dataclass(frozen=True)
class CollapseSequence:
    steps: Tuple[Tuple[tuple, tuple], ...]
    residue: Subcomplex


def _default_priority(face):
    return (len(face), face)


def spine(v, priority: Optional[Callable] = None) -> CollapseSequence:
    """Greedy elementary collapses until no free face is left.

    Among the free faces the one with the smallest ``priority(face)`` goes
    first; the default is lowest dimension, then lexicographic.
    """
    if isinstance(v, Subcomplex):
        parent, c = v.parent, v.complex
    else:
        parent, c = v, v
    if c.is_empty():
        raise InvalidSubcomplex("cannot collapse an empty complex")
    priority = priority or _default_priority
    alive = set()
    for s in c.all_faces():
        alive.add(s)
    cofaces: Dict[tuple, set] = defaultdict(set)
    for s in alive:
        if len(s) > 1:
            for i in range(len(s)):
                cofaces[s[:i] + s[i + 1:]].add(s)
    heap = [(priority(s), s) for s in alive if len(cofaces[s]) == 1]
    heapq.heapify(heap)
    steps = []
    while heap:
        _, tau = heapq.heappop(heap)
        if tau not in alive or len(cofaces[tau]) != 1:
            continue
        (sigma,) = cofaces[tau]
        alive.discard(tau)
        alive.discard(sigma)
        steps.append((tau, sigma))
        cofaces.pop(tau, None)
        for i in range(len(sigma)):
            face = sigma[:i] + sigma[i + 1:]
            cf = cofaces.get(face)
            if cf is not None:
                cf.discard(sigma)
                if face in alive and len(cf) == 1:
                    heapq.heappush(heap, (priority(face), face))
        if len(tau) > 1:
            for i in range(len(tau)):
                face = tau[:i] + tau[i + 1:]
                cf = cofaces[face]
                cf.discard(tau)
                if face in alive and len(cf) == 1:
                    heapq.heappush(heap, (priority(face), face))
    maximal = [s for s in alive if not cofaces.get(s)]
    residue = Subcomplex(parent, SimplicialComplex._trusted(maximal))
    return CollapseSequence(tuple(steps), residue)


# gluing and reparameterisation ----------------------------------------------------


def glue_pl(fU: PLMap, fV: PLMap, frontier_complex) -> PLMap:
    """Glue maps on ``U`` (values <= s) and ``V`` (values >= s) along a frontier at level s."""
    fc = frontier_complex.complex if isinstance(frontier_complex, Subcomplex) else frontier_complex
    fverts = set(fc.vertices)
    if not fverts:
        raise BoundaryMismatch("empty frontier")
    shared = set(fU.values) & set(fV.values)
    if shared != fverts:
        raise BoundaryMismatch("the pieces must meet exactly in the frontier vertices")
    levels = {fU.values[v] for v in fverts} | {fV.values[v] for v in fverts}
    if len(levels) != 1:
        raise BoundaryMismatch(f"frontier values disagree: {sorted(levels)[:4]}")
    (s,) = levels
    if any(x > s for x in fU.values.values()) or any(x < s for x in fV.values.values()):
        raise BoundaryMismatch("U must map into [0, s] and V into [s, 1]")
    fu_order = sorted(fverts, key=fU.rank.__getitem__)
    fv_order = sorted(fverts, key=fV.rank.__getitem__)
    if fu_order != fv_order:
        raise BoundaryMismatch("the pieces order the frontier differently")
    values = dict(fU.values)
    values.update(fV.values)

    def side(v):
        if v in fverts:
            return (1, fU.rank[v])
        if v in fU.values:
            return (0, fU.rank[v])
        return (2, fV.rank[v])

    domain = fU.domain.union(fV.domain)
    tb = tuple(sorted(values, key=lambda v: (values[v], side(v))))
    return PLMap(domain, values, tb)


def reparameterize(f: PLMap, g: Callable) -> PLMap:
    """Compose the values with an increasing self-map of [0, 1]; tie-break kept."""
    if as_fraction(g(Fraction(0))) != 0 or as_fraction(g(Fraction(1))) != 1:
        raise NotMonotone("g must fix 0 and 1")
    levels = sorted(set(f.values.values()) | {Fraction(0), Fraction(1)})
    image = {x: as_fraction(g(x)) for x in levels}
    for a, b in zip(levels, levels[1:]):
        if not image[a] < image[b]:
            raise NotMonotone(f"g is not strictly increasing between {a} and {b}")
    return PLMap(f.domain, {v: image[x] for v, x in f.values.items()}, f.tie_break)


# the construction ----------------------------------------------------------------


@dataclass
class BuildRecord:
    subdivision: SubdivisionRecord = field(repr=False)
    rounds: int
    attempts: int
    scheme: str
    U: Subcomplex = field(repr=False)
    V: Subcomplex = field(repr=False)
    frontier: Subcomplex = field(repr=False)
    collapse: CollapseSequence = field(repr=False)
    report: ReebReport = field(repr=False)
    f_U: Optional[PLMap] = field(default=None, repr=False)
    f_V: Optional[PLMap] = field(default=None, repr=False)
    history: List[str] = field(default_factory=list)


class ReebBuild(NamedTuple):
    f: PLMap
    x0: Subcomplex
    x1: Subcomplex
    record: BuildRecord


def _harmonic(mm: SimplicialComplex, interior: List[int], boundary: Dict[int, float]) -> Dict[int, float]:
    if not interior:
        return {}
    index = {v: i for i, v in enumerate(interior)}
    rows, cols, data = [], [], []
    rhs = np.zeros(len(interior))
    for v, i in index.items():
        nbrs = mm.adjacency[v]
        rows.append(i)
        cols.append(i)
        data.append(float(len(nbrs)))
        for w in nbrs:
            j = index.get(w)
            if j is not None:
                rows.append(i)
                cols.append(j)
                data.append(-1.0)
            else:
                rhs[i] += boundary[w]
    lap = sp.csr_matrix((data, (rows, cols)), shape=(len(interior), len(interior)))
    sol = spla.spsolve(lap.tocsc(), rhs)
    if not np.all(np.isfinite(sol)):
        raise np.linalg.LinAlgError("singular harmonic system")
    return {v: float(sol[i]) for v, i in index.items()}


def _attempt(m, x, rounds, scheme):
    dn = derived_neighborhood(m, x, rounds=rounds)
    rec = dn.record
    mm = rec.subdivided
    x0 = rec.subdivided_copy(x)
    fr = frontier(dn)
    x0v = set(x0.vertices)
    fv = set(fr.complex.vertices)
    d0 = edge_distances(mm, x0v)
    # burn V from the frontier inwards so the spine sits away from X
    col = spine(dn.V, priority=lambda s: (min(d0[v] for v in s), len(s), s))
    y = col.residue
    yv = set(y.vertices)
    d1 = edge_distances(mm, yv)
    key = lambda v: (d0.get(v, 0), -d1.get(v, 0), v)  # noqa: E731
    half = FRONTIER_VALUE
    fU = fV = None
    problem = None
    if not yv:
        problem = "empty spine"
    elif yv & fv:
        problem = "spine touches the frontier"
    elif yv & x0v:
        problem = "spine meets X"
    if problem:
        values = {v: (Fraction(0) if v in x0v else Fraction(1) if v in yv else half) for v in mm.vertices}
        f = PLMap.from_order(mm, values, key)
    elif scheme == "distance":
        rest = sorted((v for v in mm.vertices if v not in x0v and v not in yv), key=key)
        values = {v: Fraction(0) for v in x0v}
        values.update({v: Fraction(1) for v in yv})
        values.update(rank_values(rest, Fraction(0), Fraction(1)))
        f = PLMap.from_order(mm, values, key)
    else:
        uverts = dn.U.vertices
        fU = PLMap.from_order(dn.U.complex, {v: (Fraction(0) if v in x0v else half) for v in uverts}, key)
        interior = sorted(v for v in dn.V.vertices if v not in fv and v not in yv)
        boundary = {v: 0.5 for v in fv}
        boundary.update({v: 1.0 for v in yv})
        try:
            h = _harmonic(mm, interior, boundary)
        except (np.linalg.LinAlgError, RuntimeError) as exc:
            problem = f"harmonic solve failed: {exc}"
            h = {v: 0.75 for v in interior}
        ordered = sorted(interior, key=lambda v: (round(h[v], 12), key(v)))
        vvals = {v: half for v in fv}
        vvals.update({v: Fraction(1) for v in yv})
        vvals.update(rank_values(ordered, half, Fraction(1)))
        fV = PLMap.from_order(dn.V.complex, vvals, key)
        f = glue_pl(fU, fV, fr)
    report = verify_reeb(mm, f, expected_x0=x0)
    if problem and report.is_reeb:
        report = ReebReport(report.classes, report.critical_values, False, report.extrema,
                            report.reasons + (problem,), report.zero_set_matches)
    record = BuildRecord(rec, rounds, 0, scheme, dn.U, dn.V, fr, col, report, fU, fV)
    return f, x0, y, record


def _validate(m: SimplicialComplex, x) -> Subcomplex:
    if not is_closed_pseudomanifold(m).closed:
        raise NotClosedPseudomanifold("M must be a closed pseudomanifold")
    x = _as_subcomplex(m, x)
    if x.complex.is_empty():
        raise InvalidSubcomplex("X is empty")
    if not x.is_proper:
        raise SubcomplexEqualsComplex("X must be a proper subcomplex of M")
    xv = set(x.vertices)
    for comp in connected_components(m):
        cs = set(comp)
        if not cs & xv:
            raise InvalidSubcomplex(f"X misses the component containing vertex {comp[0]}")
        part = m.full_subcomplex(cs)
        if all(s in x.complex for s in part.facets):
            raise SubcomplexEqualsComplex(f"X contains the whole component of vertex {comp[0]}")
    return x


def build_pl_reeb(m: SimplicialComplex, x, max_retries: int = 3, scheme: str = "harmonic") -> ReebBuild:
    """Construct and verify a PL Reeb function with zero set exactly ``x``.

    The first attempt works on the second derived subdivision; each failed
    verification subdivides once more, up to ``max_retries`` times. When all
    attempts fail, :class:`RetriesExhausted` carries the last candidate.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    x = _validate(m, x)
    history = []
    last = None
    for attempt in range(max_retries + 1):
        rounds = 2 + attempt
        f, x0, y, record = _attempt(m, x, rounds, scheme)
        record.attempts = attempt + 1
        status = "ok" if record.report.is_reeb else "; ".join(record.report.reasons[:3])
        history.append(f"rounds={rounds}: {status}")
        record.history = list(history)
        last = ReebBuild(f, x0, y, record)
        if record.report.is_reeb:
            return last
    raise RetriesExhausted(
        f"no verified Reeb function after {max_retries} retries", candidate=last, report=last.record.report
    )
