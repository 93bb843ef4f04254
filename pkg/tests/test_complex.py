from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import closure, orientable_bruteforce
from reebforge.complex import (
    BUILTIN_SUITE,
    SimplicialComplex,
    Subcomplex,
    barycentric_subdivision,
    boundary_simplex,
    builtin,
    circle,
    connected_components,
    derived_neighborhood,
    edge_distances,
    euler_characteristic,
    faces,
    frontier,
    from_maximal_simplices,
    is_closed_pseudomanifold,
    is_orientable,
    iterated_subdivision,
    join,
    link,
    octahedron,
    orientability,
    point,
    rp2_6vertex,
    simplex,
    star,
    torus_7vertex,
)
from reebforge.errors import (
    DimensionOutOfRange,
    DuplicateVertexInSimplex,
    EmptyInput,
    InvalidSubcomplex,
    NotClosedPseudomanifold,
    SubcomplexEqualsComplex,
    UnknownName,
)


def test_simplex_canonical_and_duplicates():
    assert simplex([3, 1, 2]) == (1, 2, 3)
    with pytest.raises(DuplicateVertexInSimplex):
        simplex([1, 2, 1])
    with pytest.raises(EmptyInput):
        simplex([])
    with pytest.raises(InvalidSubcomplex):
        simplex([-1, 2])


def test_from_maximal_simplices_examples():
    c = from_maximal_simplices([[0, 1], [1, 2], [0, 2]])
    assert c.dimension == 1 and c.f_vector() == (3, 3)
    assert from_maximal_simplices([[0, 1, 2], [0, 1], [2]]).maximal_simplices == ((0, 1, 2),)
    two = from_maximal_simplices([[0], [1]])
    assert len(connected_components(two)) == 2
    with pytest.raises(EmptyInput):
        from_maximal_simplices([])


def test_faces_examples():
    s = boundary_simplex(3)
    assert len(faces(s, 1)) == 6
    assert len(faces(s, 2)) == 4
    assert faces(point(), 0) == frozenset({(0,)})
    with pytest.raises(DimensionOutOfRange):
        faces(s, 3)


@pytest.mark.parametrize("n", range(1, 6))
def test_boundary_simplex_f_vector(n):
    c = boundary_simplex(n)
    assert c.f_vector() == tuple(comb(n + 1, k + 1) for k in range(n))


def test_star_examples():
    s = boundary_simplex(3)
    st0 = star(s, 0)
    assert st0.maximal_simplices == ((0, 1, 2), (0, 1, 3), (0, 2, 3))
    assert euler_characteristic(st0.complex) == 1
    assert star(s, s).complex == s
    c6 = circle(6)
    assert star(c6, 0).complex.f_vector() == (3, 2)


def test_link_examples():
    assert link(boundary_simplex(3), (0,)) == from_maximal_simplices([[1, 2], [1, 3], [2, 3]])
    lk = link(octahedron(), (0,))
    assert lk.f_vector() == (4, 4) and all(len(lk.adjacency[v]) == 2 for v in lk.vertices)
    assert link(circle(5), (0,)) == from_maximal_simplices([[1], [4]])
    # every vertex link of the torus is a hexagon
    t = torus_7vertex()
    for v in t.vertices:
        assert link(t, (v,)).f_vector() == (6, 6)


def test_subdivision_examples():
    rec = barycentric_subdivision(from_maximal_simplices([[0, 1]]))
    assert rec.subdivided.f_vector() == (3, 2)
    hexagon = barycentric_subdivision(boundary_simplex(2)).subdivided
    assert hexagon.f_vector() == (6, 6)
    assert all(len(hexagon.adjacency[v]) == 2 for v in hexagon.vertices)


def test_subdivision_provenance():
    c = boundary_simplex(3)
    rec = barycentric_subdivision(c)
    for v in c.vertices:
        assert rec.provenance[v] == (v,)
    assert set(rec.provenance.values()) == set(c.all_faces())
    assert len(rec.subdivided.facets) == len(c.facets) * 6
    rec2 = iterated_subdivision(c, 2)
    assert all(car in c for car in rec2.provenance.values())
    assert rec2.rounds == 2


@pytest.mark.parametrize("name", BUILTIN_SUITE)
def test_subdivision_preserves_chi(name):
    c = builtin(name)
    assert euler_characteristic(barycentric_subdivision(c).subdivided) == euler_characteristic(c)


def test_derived_neighborhood_sphere():
    m = boundary_simplex(3)
    dn = derived_neighborhood(m, 0)
    fr = frontier(dn).complex
    assert euler_characteristic(dn.U.complex) == 1
    assert euler_characteristic(dn.V.complex) == 1
    assert euler_characteristic(fr) == 0 and len(connected_components(fr)) == 1
    assert dn.U.complex.union(dn.V.complex) == dn.record.subdivided


def test_derived_neighborhood_circle_and_torus():
    dn = derived_neighborhood(circle(4), 0)
    assert frontier(dn).complex.f_vector() == (2,)
    assert euler_characteristic(dn.U.complex) == 1 and euler_characteristic(dn.V.complex) == 1
    dn = derived_neighborhood(torus_7vertex(), 0)
    chi_u, chi_v = euler_characteristic(dn.U.complex), euler_characteristic(dn.V.complex)
    assert (chi_u, chi_v) == (1, -1)
    assert chi_u + chi_v - euler_characteristic(frontier(dn).complex) == 0


def test_derived_neighborhood_rejects_bad_x():
    m = boundary_simplex(2)
    with pytest.raises(SubcomplexEqualsComplex):
        derived_neighborhood(m, m)
    with pytest.raises(InvalidSubcomplex):
        derived_neighborhood(m, [[0, 7]])


def test_join_examples():
    s0 = from_maximal_simplices([[0], [1]])
    j = join(s0, s0)
    assert j.f_vector() == (4, 4)
    assert euler_characteristic(join(boundary_simplex(2), s0)) == 2
    assert euler_characteristic(join(point(), torus_7vertex())) == 1


def test_pseudomanifold_examples():
    r = is_closed_pseudomanifold(boundary_simplex(4))
    assert r.closed and r.strongly_connected_per_component and r.dimension == 3
    r = is_closed_pseudomanifold(from_maximal_simplices([[0, 1, 2], [1, 2, 3]]))
    assert not r.ridge_degree_ok and not r.closed
    a = boundary_simplex(3)
    b = a.relabel({0: 0, 1: 4, 2: 5, 3: 6})
    wedge = a.union(b)
    r = is_closed_pseudomanifold(wedge)
    assert r.pure and r.ridge_degree_ok
    # the two spheres share only a vertex, so facets are not ridge-connected
    assert not r.strongly_connected_per_component


def test_orientability_examples():
    assert orientability(boundary_simplex(3)) == "orientable"
    assert orientability(rp2_6vertex()) == "non-orientable"
    assert orientability(torus_7vertex()) == "orientable"
    with pytest.raises(NotClosedPseudomanifold):
        orientability(from_maximal_simplices([[0, 1, 2]]))


@pytest.mark.parametrize("name", ["circle(3)", "boundary_simplex(2)", "boundary_simplex(3)", "octahedron",
                                  "torus_7vertex", "rp2_6vertex"])
def test_orientability_matches_bruteforce(name):
    c = builtin(name)
    assert is_orientable(c) == orientable_bruteforce(c.maximal_simplices)


def test_euler_characteristic_examples():
    assert euler_characteristic(boundary_simplex(3)) == 2
    assert euler_characteristic(torus_7vertex()) == 0
    assert euler_characteristic(rp2_6vertex()) == 1


def test_components_examples():
    two = from_maximal_simplices([[0, 1, 2], [3, 4, 5]])
    assert connected_components(two) == [(0, 1, 2), (3, 4, 5)]
    assert len(connected_components(boundary_simplex(4))) == 1
    assert connected_components(SimplicialComplex.empty()) == []


def test_builtins():
    assert len(builtin("boundary_simplex(3)").facets) == 4
    assert builtin("circle(4)").f_vector() == (4, 4)
    rp2 = builtin("rp2_6vertex")
    assert rp2.f_vector() == (6, 15, 10)
    assert is_closed_pseudomanifold(rp2).closed and not is_orientable(rp2)
    with pytest.raises(UnknownName):
        builtin("klein_bottle")


def test_subcomplex_validation():
    m = boundary_simplex(2)
    assert Subcomplex.of(m, [[0, 1]]).is_proper
    with pytest.raises(InvalidSubcomplex):
        Subcomplex.of(m, [[0, 1, 2]])


def test_edge_distances():
    d = edge_distances(circle(6), [0])
    assert d == {0: 0, 1: 1, 5: 1, 2: 2, 4: 2, 3: 3}


# properties -------------------------------------------------------------------

facet_lists = st.lists(
    st.lists(st.integers(0, 7), min_size=1, max_size=4, unique=True), min_size=1, max_size=8
)


@given(facet_lists)
def test_face_closure_matches_oracle(facets):
    c = from_maximal_simplices(facets)
    assert set(c.all_faces()) == closure(facets)
    # no listed maximal simplex is a face of another
    for s in c.facets:
        for t in c.facets:
            assert s == t or not set(s) < set(t)


@given(facet_lists)
def test_link_star_relation(facets):
    c = from_maximal_simplices(facets)
    v = c.vertices[0]
    lk = link(c, (v,))
    st_v = star(c, v).complex
    # the star is the cone on the link
    assert euler_characteristic(st_v) == 1
    for s in lk.all_faces():
        assert tuple(sorted(s + (v,))) in c


@given(facet_lists)
@settings(max_examples=40, deadline=None)
def test_subdivision_chi_and_containment(facets):
    c = from_maximal_simplices(facets)
    rec = barycentric_subdivision(c)
    assert euler_characteristic(rec.subdivided) == euler_characteristic(c)
    for s in rec.subdivided.facets:
        carriers = [rec.provenance[v] for v in s]
        # vertices of a subdivided simplex form a chain of faces
        carriers.sort(key=len)
        assert all(set(a) < set(b) for a, b in zip(carriers, carriers[1:]))


@given(facet_lists, st.permutations(range(8)))
def test_relabel_invariance(facets, perm):
    c = from_maximal_simplices(facets)
    r = c.relabel({v: perm[v] for v in c.vertices})
    assert r.f_vector() == c.f_vector()
    assert len(connected_components(r)) == len(connected_components(c))
