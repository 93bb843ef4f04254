"""Finite abstract simplicial complexes.

A complex is stored by its maximal simplices (facets); every simplex is a
strictly increasing tuple of non-negative integer vertex ids. Complexes are
immutable, so derived data (face sets, vertex stars, the 1-skeleton) is
computed lazily and cached on the instance.
"""
from __future__ import annotations

import itertools
import operator
import re
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, NamedTuple, Sequence, Tuple

from .errors import (
    DimensionOutOfRange,
    DuplicateVertexInSimplex,
    EmptyInput,
    InvalidSubcomplex,
    NotClosedPseudomanifold,
    SimplexNotInComplex,
    SubcomplexEqualsComplex,
    UnknownName,
)

Simplex = Tuple[int, ...]


def simplex(vertices: Iterable[int]) -> Simplex:
    """Canonical form of a vertex collection; raises on repeats."""
    vs = tuple(vertices)
    if not vs:
        raise EmptyInput("a simplex needs at least one vertex")
    try:
        vs = tuple(operator.index(v) for v in vs)
    except TypeError:
        raise InvalidSubcomplex(f"vertex ids must be integers, got {vertices!r}") from None
    if min(vs) < 0:
        raise InvalidSubcomplex(f"vertex ids must be non-negative, got {list(vs)}")
    out = tuple(sorted(vs))
    if len(set(out)) != len(out):
        raise DuplicateVertexInSimplex(f"duplicate vertex in simplex {list(vs)}")
    return out


def _absorb(simplices: Iterable[Simplex]) -> Tuple[Simplex, ...]:
    """Drop every simplex that is a face of another one."""
    uniq = sorted(set(simplices), key=lambda s: (-len(s), s))
    by_vertex: Dict[int, List[int]] = defaultdict(list)
    kept: List[Simplex] = []
    for s in uniq:
        candidates = None
        for v in s:
            ids = set(by_vertex.get(v, ()))
            candidates = ids if candidates is None else candidates & ids
            if not candidates:
                break
        if candidates:
            continue
        idx = len(kept)
        kept.append(s)
        for v in s:
            by_vertex[v].append(idx)
    return tuple(sorted(kept))


@dataclass(frozen=True)
class SimplicialComplex:
    """Complex given by its facets, kept sorted for deterministic output."""

    facets: Tuple[Simplex, ...]

    @classmethod
    def from_maximal_simplices(cls, simplices: Iterable[Iterable[int]]) -> "SimplicialComplex":
        lst = [simplex(s) for s in simplices]
        if not lst:
            raise EmptyInput("no simplices given")
        return cls(_absorb(lst))

    @classmethod
    def empty(cls) -> "SimplicialComplex":
        return cls(())

    @classmethod
    def _trusted(cls, facets: Iterable[Simplex]) -> "SimplicialComplex":
        # caller guarantees canonical, pairwise non-nested facets
        return cls(tuple(sorted(facets)))

    # basic shape ------------------------------------------------------
    @property
    def dimension(self) -> int:
        return max((len(s) for s in self.facets), default=0) - 1

    @cached_property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(sorted({v for s in self.facets for v in s}))

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def maximal_simplices(self) -> Tuple[Simplex, ...]:
        return self.facets

    def is_empty(self) -> bool:
        return not self.facets

    def __len__(self) -> int:
        return len(self.facets)

    # face structure -----------------------------------------------------
    @cached_property
    def _faces_by_dim(self) -> Tuple[frozenset, ...]:
        n = self.dimension
        buckets: List[set] = [set() for _ in range(n + 1)]
        for s in self.facets:
            for k in range(1, len(s) + 1):
                buckets[k - 1].update(itertools.combinations(s, k))
        return tuple(frozenset(b) for b in buckets)

    def faces(self, d: int) -> frozenset:
        if d < 0 or d > self.dimension:
            raise DimensionOutOfRange(f"dimension {d} outside 0..{self.dimension}")
        return self._faces_by_dim[d]

    def sorted_faces(self, d: int) -> List[Simplex]:
        return sorted(self.faces(d))

    def f_vector(self) -> Tuple[int, ...]:
        return tuple(len(b) for b in self._faces_by_dim)

    def all_faces(self) -> List[Simplex]:
        return sorted(itertools.chain.from_iterable(self._faces_by_dim), key=lambda s: (len(s), s))

    def __contains__(self, s) -> bool:
        s = tuple(sorted(s))
        d = len(s) - 1
        return 0 <= d <= self.dimension and s in self._faces_by_dim[d]

    @cached_property
    def _vertex_facets(self) -> Dict[int, Tuple[int, ...]]:
        idx: Dict[int, List[int]] = defaultdict(list)
        for i, s in enumerate(self.facets):
            for v in s:
                idx[v].append(i)
        return {v: tuple(ids) for v, ids in idx.items()}

    def facets_containing(self, s: Sequence[int]) -> List[Simplex]:
        ids = None
        for v in s:
            here = set(self._vertex_facets.get(v, ()))
            ids = here if ids is None else ids & here
            if not ids:
                return []
        return [self.facets[i] for i in sorted(ids or ())]

    @cached_property
    def adjacency(self) -> Dict[int, frozenset]:
        """1-skeleton as a vertex -> neighbours map."""
        nb: Dict[int, set] = {v: set() for v in self.vertices}
        for s in self.facets:
            for v in s:
                nb[v].update(s)
        return {v: frozenset(n - {v}) for v, n in nb.items()}

    def full_subcomplex(self, vertices: Iterable[int]) -> "SimplicialComplex":
        """Largest subcomplex spanned by the given vertex set."""
        keep = set(vertices)
        pieces = set()
        for s in self.facets:
            t = tuple(v for v in s if v in keep)
            if t:
                pieces.add(t)
        return SimplicialComplex(_absorb(pieces)) if pieces else SimplicialComplex.empty()

    def relabel(self, mapping) -> "SimplicialComplex":
        return SimplicialComplex(_absorb(simplex(mapping[v] for v in s) for s in self.facets))

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return all(s in other for s in self.facets)

    def union(self, other: "SimplicialComplex") -> "SimplicialComplex":
        if self.is_empty():
            return other
        if other.is_empty():
            return self
        return SimplicialComplex(_absorb(self.facets + other.facets))

    def intersection(self, other: "SimplicialComplex") -> "SimplicialComplex":
        common = set()
        for d in range(min(self.dimension, other.dimension) + 1):
            common.update(self._faces_by_dim[d] & other._faces_by_dim[d])
        return SimplicialComplex(_absorb(common)) if common else SimplicialComplex.empty()


def from_maximal_simplices(simplices: Iterable[Iterable[int]]) -> SimplicialComplex:
    return SimplicialComplex.from_maximal_simplices(simplices)


def faces(c: SimplicialComplex, d: int) -> frozenset:
    return c.faces(d)


@dataclass(frozen=True)
class Subcomplex:
    """A complex together with the parent it was validated against."""

    parent: SimplicialComplex = field(repr=False)
    complex: SimplicialComplex

    def __post_init__(self):
        if not self.complex.is_subcomplex_of(self.parent):
            raise InvalidSubcomplex("subcomplex contains simplices absent from the parent")

    @classmethod
    def of(cls, parent: SimplicialComplex, simplices: Iterable[Iterable[int]]) -> "Subcomplex":
        lst = [simplex(s) for s in simplices]
        sub = SimplicialComplex(_absorb(lst)) if lst else SimplicialComplex.empty()
        return cls(parent, sub)

    @classmethod
    def vertex(cls, parent: SimplicialComplex, v: int) -> "Subcomplex":
        return cls.of(parent, [[v]])

    @property
    def maximal_simplices(self) -> Tuple[Simplex, ...]:
        return self.complex.facets

    @property
    def vertices(self) -> Tuple[int, ...]:
        return self.complex.vertices

    @property
    def is_proper(self) -> bool:
        return self.complex != self.parent


def _as_subcomplex(c: SimplicialComplex, x) -> Subcomplex:
    if isinstance(x, Subcomplex):
        if x.parent != c:
            # accept subcomplexes validated against an equal complex only
            return Subcomplex(c, x.complex)
        return x
    if isinstance(x, SimplicialComplex):
        return Subcomplex(c, x)
    if isinstance(x, int):
        return Subcomplex.vertex(c, x)
    return Subcomplex.of(c, x)


def star(c: SimplicialComplex, x) -> Subcomplex:
    """Closed star of ``x``: every facet meeting ``x``, with all faces."""
    x = _as_subcomplex(c, x)
    verts = set(x.vertices)
    facets = [s for s in c.facets if verts.intersection(s)]
    return Subcomplex(c, SimplicialComplex._trusted(facets))


def link(c: SimplicialComplex, s: Sequence[int]) -> SimplicialComplex:
    s = tuple(sorted(s))
    if s not in c:
        raise SimplexNotInComplex(f"{list(s)} is not a face of the complex")
    ss = set(s)
    rest = [tuple(v for v in t if v not in ss) for t in c.facets_containing(s)]
    rest = [t for t in rest if t]
    return SimplicialComplex._trusted(rest) if rest else SimplicialComplex.empty()


# subdivision --------------------------------------------------------------------


@dataclass(frozen=True)
class SubdivisionRecord:
    """A subdivision plus, for every new vertex, its carrier in the original.

    After one barycentric subdivision the carrier is exactly the simplex whose
    barycentre the vertex is; for iterated subdivisions it is the smallest
    original simplex containing the vertex.
    """

    original: SimplicialComplex
    subdivided: SimplicialComplex
    provenance: Dict[int, Simplex] = field(hash=False, compare=False)
    rounds: int = 1

    def then(self, nxt: "SubdivisionRecord") -> "SubdivisionRecord":
        if nxt.original != self.subdivided:
            raise ValueError("records do not chain")
        prov = {}
        for v, carrier in nxt.provenance.items():
            verts = set()
            for w in carrier:
                verts.update(self.provenance[w])
            prov[v] = tuple(sorted(verts))
        return SubdivisionRecord(self.original, nxt.subdivided, prov, self.rounds + nxt.rounds)

    def carried_by(self, x: SimplicialComplex) -> List[int]:
        """Vertices of the subdivision lying in |x|."""
        return sorted(v for v, car in self.provenance.items() if car in x)

    def subdivided_copy(self, x) -> Subcomplex:
        if isinstance(x, Subcomplex):
            x = x.complex
        return Subcomplex(self.subdivided, self.subdivided.full_subcomplex(self.carried_by(x)))


def barycentric_subdivision(c: SimplicialComplex) -> SubdivisionRecord:
    """First derived subdivision.

    Original vertices keep their ids; the barycentres of higher simplices get
    fresh ids in (dimension, lexicographic) order after the largest old id.
    """
    if c.is_empty():
        return SubdivisionRecord(c, c, {}, 1)
    ids: Dict[Simplex, int] = {(v,): v for v in c.vertices}
    nxt = max(c.vertices) + 1
    for s in c.all_faces():
        if len(s) > 1:
            ids[s] = nxt
            nxt += 1
    new_facets = set()
    for s in c.facets:
        for perm in itertools.permutations(s):
            chain = tuple(sorted(ids[tuple(sorted(perm[:k]))] for k in range(1, len(perm) + 1)))
            new_facets.add(chain)
    prov = {i: s for s, i in ids.items()}
    return SubdivisionRecord(c, SimplicialComplex._trusted(new_facets), prov, 1)


def iterated_subdivision(c: SimplicialComplex, rounds: int) -> SubdivisionRecord:
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    rec = barycentric_subdivision(c)
    for _ in range(rounds - 1):
        rec = rec.then(barycentric_subdivision(rec.subdivided))
    return rec


class DerivedNeighborhood(NamedTuple):
    U: Subcomplex
    V: Subcomplex
    record: SubdivisionRecord


def derived_neighborhood(m: SimplicialComplex, x, rounds: int = 2) -> DerivedNeighborhood:
    """Regular neighbourhood of ``x`` and its closed complement.

    ``m`` is subdivided ``rounds`` times (two by default). ``U`` is the closed
    star of the copy of ``x``; ``V`` consists of the simplices missing that
    copy, i.e. the full subcomplex on the remaining vertices.
    """
    x = _as_subcomplex(m, x)
    if not x.is_proper:
        raise SubcomplexEqualsComplex("x must be a proper subcomplex")
    if x.complex.is_empty():
        raise InvalidSubcomplex("x is empty")
    rec = iterated_subdivision(m, rounds)
    mm = rec.subdivided
    x2 = set(rec.carried_by(x.complex))
    U = star(mm, Subcomplex(mm, mm.full_subcomplex(x2)))
    V = Subcomplex(mm, mm.full_subcomplex(v for v in mm.vertices if v not in x2))
    return DerivedNeighborhood(U, V, rec)


def frontier(dn: DerivedNeighborhood) -> Subcomplex:
    mm = dn.record.subdivided
    return Subcomplex(mm, dn.U.complex.intersection(dn.V.complex))


# joins, counts, components ---------------------------------------------------------


def join(a: SimplicialComplex, b: SimplicialComplex) -> SimplicialComplex:
    if a.is_empty():
        return b
    if b.is_empty():
        return a
    if set(a.vertices) & set(b.vertices):
        shift = max(a.vertices) + 1 - min(b.vertices)
        b = b.relabel({v: v + shift for v in b.vertices})
    return SimplicialComplex._trusted(tuple(sorted(s + t)) for s in a.facets for t in b.facets)


def euler_characteristic(c: SimplicialComplex) -> int:
    return sum((-1) ** d * n for d, n in enumerate(c.f_vector()))


def connected_components(c: SimplicialComplex) -> List[Tuple[int, ...]]:
    adj = c.adjacency
    seen = set()
    comps = []
    for v in c.vertices:
        if v in seen:
            continue
        comp = []
        queue = deque([v])
        seen.add(v)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        comps.append(tuple(sorted(comp)))
    return comps


def edge_distances(c: SimplicialComplex, sources: Iterable[int]) -> Dict[int, int]:
    """BFS distance in the 1-skeleton; unreachable vertices are omitted."""
    adj = c.adjacency
    dist = {}
    queue = deque()
    for s in sources:
        if s not in dist:
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


# pseudomanifolds and orientation ------------------------------------------------------


@dataclass(frozen=True)
class PseudomanifoldReport:
    pure: bool
    ridge_degree_ok: bool
    strongly_connected_per_component: bool
    dimension: int

    @property
    def closed(self) -> bool:
        """Pure with every ridge in exactly two facets.

        Strong connectivity is reported separately; it is not needed for the
        orientation propagation, which works per strong component.
        """
        return self.pure and self.ridge_degree_ok

    def as_dict(self):
        return {
            "pure": self.pure,
            "ridge_degree_ok": self.ridge_degree_ok,
            "strongly_connected_per_component": self.strongly_connected_per_component,
            "dimension": self.dimension,
        }


def _ridge_incidence(c: SimplicialComplex) -> Dict[Simplex, List[Tuple[int, int]]]:
    inc: Dict[Simplex, List[Tuple[int, int]]] = defaultdict(list)
    for fi, s in enumerate(c.facets):
        for i in range(len(s)):
            inc[s[:i] + s[i + 1:]].append((fi, i))
    return inc


def _facet_components(c: SimplicialComplex, inc) -> List[int]:
    parent = list(range(len(c.facets)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for lst in inc.values():
        for (f, _), (g, _) in zip(lst, lst[1:]):
            ra, rb = find(f), find(g)
            if ra != rb:
                parent[ra] = rb
    return [find(i) for i in range(len(c.facets))]


def is_closed_pseudomanifold(c: SimplicialComplex) -> PseudomanifoldReport:
    n = c.dimension
    pure = all(len(s) == n + 1 for s in c.facets)
    if c.is_empty() or n == 0:
        # a 0-dimensional complex has only the empty ridge
        ridge_ok = pure and n == 0 and len(c.facets) == 2
        return PseudomanifoldReport(pure, ridge_ok, True, n)
    inc = _ridge_incidence(c)
    ridge_ok = pure and all(len(v) == 2 for v in inc.values())
    labels = _facet_components(c, inc)
    strong = True
    for comp in connected_components(c):
        cs = set(comp)
        roots = {labels[i] for i, s in enumerate(c.facets) if s[0] in cs}
        if len(roots) > 1:
            strong = False
            break
    return PseudomanifoldReport(pure, ridge_ok, strong, n)


ORIENTABLE = "orientable"
NON_ORIENTABLE = "non-orientable"


def orientation_signs(c: SimplicialComplex):
    """Coherent facet signs, or ``None`` when propagation hits a contradiction."""
    rep = is_closed_pseudomanifold(c)
    if not rep.closed:
        raise NotClosedPseudomanifold("orientability needs a closed pseudomanifold")
    if c.dimension == 0:
        return {i: 1 for i in range(len(c.facets))}
    inc = _ridge_incidence(c)
    by_facet: Dict[int, List[Tuple[Simplex, int]]] = defaultdict(list)
    for r, lst in inc.items():
        for fi, pos in lst:
            by_facet[fi].append((r, pos))
    sign: Dict[int, int] = {}
    for start in range(len(c.facets)):
        if start in sign:
            continue
        sign[start] = 1
        queue = deque([start])
        while queue:
            f = queue.popleft()
            for r, pos in by_facet[f]:
                for g, gpos in inc[r]:
                    if g == f:
                        continue
                    want = -sign[f] * (-1) ** (pos + gpos)
                    if g not in sign:
                        sign[g] = want
                        queue.append(g)
                    elif sign[g] != want:
                        return None
    return sign


def orientability(c: SimplicialComplex) -> str:
    return ORIENTABLE if orientation_signs(c) is not None else NON_ORIENTABLE


def is_orientable(c: SimplicialComplex) -> bool:
    return orientability(c) == ORIENTABLE


# standard triangulations ------------------------------------------------------

RP2_6VERTEX = (
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
    (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5),
)


def boundary_simplex(n: int) -> SimplicialComplex:
    """Boundary of the n-simplex on vertices 0..n, an (n-1)-sphere."""
    if n < 1:
        raise UnknownName("boundary_simplex needs n >= 1")
    return SimplicialComplex._trusted(itertools.combinations(range(n + 1), n))


def circle(k: int) -> SimplicialComplex:
    if k < 3:
        raise UnknownName("circle needs at least 3 vertices")
    return SimplicialComplex.from_maximal_simplices([i, (i + 1) % k] for i in range(k))


def torus_7vertex() -> SimplicialComplex:
    """Möbius' minimal torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7."""
    tris = []
    for i in range(7):
        tris.append([i, (i + 1) % 7, (i + 3) % 7])
        tris.append([i, (i + 2) % 7, (i + 3) % 7])
    return SimplicialComplex.from_maximal_simplices(tris)


def rp2_6vertex() -> SimplicialComplex:
    """Hemi-icosahedron: the minimal 6-vertex, 10-triangle projective plane."""
    return SimplicialComplex.from_maximal_simplices(RP2_6VERTEX)


def octahedron() -> SimplicialComplex:
    """Boundary of the cross-polytope; antipodal pairs (0,1), (2,3), (4,5)."""
    return SimplicialComplex._trusted(itertools.product((0, 1), (2, 3), (4, 5)))


def point() -> SimplicialComplex:
    return SimplicialComplex(((0,),))


_BUILTIN_RE = re.compile(r"^\s*([a-z_0-9]+?)\s*(?:\(\s*(\d+)\s*\))?\s*$")


def builtin(name: str) -> SimplicialComplex:
    """Look up ``boundary_simplex(n)``, ``circle(k)``, ``rp2_6vertex``,
    ``torus_7vertex``, ``octahedron`` or ``point``."""
    m = _BUILTIN_RE.match(name)
    if not m:
        raise UnknownName(f"unknown complex {name!r}")
    base, arg = m.group(1), m.group(2)
    if base in ("boundary_simplex", "circle"):
        if arg is None:
            raise UnknownName(f"{base} needs an integer argument, e.g. {base}(3)")
        return boundary_simplex(int(arg)) if base == "boundary_simplex" else circle(int(arg))
    table = {
        "rp2_6vertex": rp2_6vertex,
        "torus_7vertex": torus_7vertex,
        "octahedron": octahedron,
        "point": point,
    }
    if base not in table or arg is not None:
        raise UnknownName(f"unknown complex {name!r}")
    return table[base]()


BUILTIN_SUITE = (
    "point",
    "circle(3)",
    "circle(5)",
    "boundary_simplex(1)",
    "boundary_simplex(2)",
    "boundary_simplex(3)",
    "boundary_simplex(4)",
    "octahedron",
    "torus_7vertex",
    "rp2_6vertex",
)
