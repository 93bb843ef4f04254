import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import boundary_dense, determinantal_snf, homology_oracle, nonunit_invariants, rank_mod2, rank_q
from reebforge.complex import (
    BUILTIN_SUITE,
    Subcomplex,
    boundary_simplex,
    builtin,
    circle,
    euler_characteristic,
    from_maximal_simplices,
    iterated_subdivision,
    point,
    rp2_6vertex,
    torus_7vertex,
)
from reebforge.errors import CoefficientNotValidForNonorientable, DimensionOutOfRange, InputError, NotAHomologySphere
from reebforge.homology import (
    Q,
    Z,
    Z2,
    alexander_betti_sum_check,
    boundary_matrix,
    coefficient,
    duality_betti_check,
    euler_poincare_holds,
    homology,
    rank_mod2 as rank_mod2_impl,
    smith_normal_form,
)


def test_boundary_matrix_examples():
    b = boundary_matrix(circle(3), 1)
    assert b.shape == (3, 3)
    assert rank_q(b.to_dense().tolist()) == 2
    assert rank_q(boundary_matrix(boundary_simplex(3), 2).to_dense().tolist()) == 3
    with pytest.raises(DimensionOutOfRange):
        boundary_matrix(circle(3), 5)


@pytest.mark.parametrize("name", BUILTIN_SUITE)
def test_chain_condition(name):
    c = builtin(name)
    for d in range(2, c.dimension + 1):
        prod = boundary_matrix(c, d - 1).to_dense() @ boundary_matrix(c, d).to_dense()
        assert not prod.any()


@pytest.mark.parametrize("name", BUILTIN_SUITE)
def test_boundary_matrix_matches_oracle(name):
    c = builtin(name)
    for d in range(1, c.dimension + 1):
        assert boundary_matrix(c, d).to_dense().tolist() == boundary_dense(c.maximal_simplices, d)


def test_snf_examples():
    assert smith_normal_form(np.eye(3, dtype=int)) == ((1, 1, 1), 3)
    assert smith_normal_form([[2, 0], [0, 0]]) == ((2,), 1)
    assert smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == ((2, 6, 12), 3)
    assert smith_normal_form([[0, 0], [0, 0]]) == ((), 0)


def test_rp2_torsion_from_snf():
    d2 = boundary_matrix(rp2_6vertex(), 2)
    factors, rank = smith_normal_form(d2)
    assert [f for f in factors if f > 1] == [2]
    assert nonunit_invariants(d2.to_dense().tolist()) == [2]


@given(st.integers(1, 4), st.integers(1, 4), st.data())
@settings(max_examples=60, deadline=None)
def test_snf_matches_determinantal_divisors(r, c, data):
    m = [[data.draw(st.integers(-6, 6)) for _ in range(c)] for _ in range(r)]
    factors, rank = smith_normal_form(m)
    assert factors == determinantal_snf(m)
    assert rank == rank_q(m)


@given(st.integers(1, 9), st.integers(1, 9), st.data())
@settings(max_examples=60, deadline=None)
def test_snf_sparse_path_matches_sympy(r, c, data):
    # sparse 0/+-1 matrices exercise the unit-pivot elimination path
    m = [[data.draw(st.sampled_from([0, 0, 0, 1, -1, 2])) for _ in range(c)] for _ in range(r)]
    factors, rank = smith_normal_form(m)
    assert rank == rank_q(m)
    assert [f for f in factors if f > 1] == nonunit_invariants(m)


@pytest.mark.parametrize("name", BUILTIN_SUITE)
def test_homology_matches_oracle(name):
    c = builtin(name)
    bq, b2, tors = homology_oracle(c.maximal_simplices)
    assert homology(c, Q).betti == bq
    assert homology(c, Z2).betti == b2
    hz = homology(c, Z)
    assert hz.betti == bq
    assert tuple(tuple(t) for t in hz.torsion) == tors


def test_homology_examples():
    assert homology(boundary_simplex(4), Q).betti == (1, 0, 0, 1)
    assert homology(rp2_6vertex(), Z2).betti == (1, 1, 1)
    assert homology(rp2_6vertex(), Q).betti == (1, 0, 0)
    assert homology(torus_7vertex(), Q).betti == (1, 2, 1)
    assert not any(homology(point(), Q, reduced=True).betti)
    assert homology(rp2_6vertex(), Z).torsion[1] == (2,)


def test_coefficient_aliases():
    assert coefficient("rational") == Q
    assert coefficient("Z2") == Z2
    with pytest.raises(InputError):
        coefficient("z3")


@pytest.mark.parametrize("name", BUILTIN_SUITE)
def test_euler_poincare(name):
    c = builtin(name)
    for k in (Q, Z2):
        assert euler_poincare_holds(c, k)


def test_duality_examples():
    p = point()
    rep = duality_betti_check(boundary_simplex(4), p, p, Q)
    assert rep.passed
    rep = duality_betti_check(torus_7vertex(), p, p, Q)
    assert not rep.passed and rep.violations == ((1, 2, 0, 0),)
    m = iterated_subdivision(boundary_simplex(4), 1).subdivided
    c3 = from_maximal_simplices([[0, 1], [1, 2], [0, 2]])
    assert duality_betti_check(m, c3, c3, Q).passed
    with pytest.raises(CoefficientNotValidForNonorientable):
        duality_betti_check(rp2_6vertex(), p, p, Q)
    with pytest.raises(InputError):
        duality_betti_check(boundary_simplex(2), p, p, Z)


def test_alexander_betti_sum():
    s3 = boundary_simplex(4)
    c3 = from_maximal_simplices([[0, 1], [1, 2], [0, 2]])
    p = point()
    assert alexander_betti_sum_check(s3, c3, c3).passed
    assert alexander_betti_sum_check(s3, p, p).sums == (0, 0)
    assert not alexander_betti_sum_check(s3, c3, p).passed
    with pytest.raises(NotAHomologySphere):
        alexander_betti_sum_check(torus_7vertex(), p, p)


facet_lists = st.lists(
    st.lists(st.integers(0, 6), min_size=1, max_size=4, unique=True), min_size=1, max_size=7
)


@given(facet_lists)
@settings(max_examples=60, deadline=None)
def test_random_complex_homology_matches_oracle(facets):
    c = from_maximal_simplices(facets)
    bq, b2, tors = homology_oracle(c.maximal_simplices)
    assert homology(c, Q).betti == bq
    assert homology(c, Z2).betti == b2
    assert tuple(tuple(t) for t in homology(c, Z).torsion) == tors
    assert homology(c, Q).euler_characteristic() == euler_characteristic(c)


@given(facet_lists)
@settings(max_examples=40, deadline=None)
def test_reduced_shifts_degree_zero(facets):
    c = from_maximal_simplices(facets)
    full = homology(c, Z2).betti
    red = homology(c, Z2, reduced=True).betti
    assert red[0] == full[0] - 1 and red[1:] == full[1:]


@given(facet_lists)
@settings(max_examples=40, deadline=None)
def test_mod2_rank_matches_oracle(facets):
    c = from_maximal_simplices(facets)
    for d in range(1, c.dimension + 1):
        assert rank_mod2_impl(boundary_matrix(c, d)) == rank_mod2(boundary_dense(c.maximal_simplices, d))
