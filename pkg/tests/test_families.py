from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubeporos.errors import EmptySetError, RootIsFree
from cubeporos.families import (CubeFamily, enumerate_DE, enumerate_Dgamma,
                                enumerate_FE)
from cubeporos.lattice import DyadicCube, parent
from cubeporos.sets import (EmptyModel, PointsModel, Status,
                            cantor_middle_thirds)
from conftest import point_sets

F = Fraction
CANTOR = cantor_middle_thirds()
ROOT1 = DyadicCube.root(1)


def cubes(*specs):
    return [DyadicCube(d, tuple(k)) for d, k in specs]


def test_de_single_point():
    E = PointsModel.make([(0,)])
    fam = enumerate_DE(E, ROOT1, 2)
    assert list(fam.members) == cubes((0, [0]), (1, [0]), (2, [0]))


def test_de_empty_set():
    fam = enumerate_DE(EmptyModel(1), ROOT1, 5)
    assert fam.members == ()


def test_de_cantor_one_level():
    fam = enumerate_DE(CANTOR, ROOT1, 1)
    assert list(fam.members) == cubes((0, [0]), (1, [0]), (1, [1]))


def test_fe_single_point():
    E = PointsModel.make([(0,)])
    dec = enumerate_FE(E, ROOT1, 3)
    assert [q for q, _ in dec.free] == cubes((1, [1]), (2, [1]), (3, [1]))
    assert list(dec.residual) == cubes((3, [0]))
    assert dec.free_volume() + dec.residual_volume() == 1
    # distance intervals are exact for point sets
    for q, (lo, hi) in dec.free:
        assert lo == hi == q.box.lo[0]


def test_fe_root_is_free():
    E = PointsModel.make([(0,)])
    with pytest.raises(RootIsFree):
        enumerate_FE(E, DyadicCube(1, (1,)), 3)


def test_fe_cantor_two_levels():
    dec = enumerate_FE(CANTOR, ROOT1, 2)
    assert dec.free == ()
    assert len(dec.residual) == 4
    assert dec.residual_volume() == 1


def test_dgamma_examples():
    E = PointsModel.make([(0,)])
    fam = enumerate_Dgamma(E, ROOT1, 2, 1)
    assert list(fam.members) == cubes((0, [0]), (1, [0]), (1, [1]))
    fam_small = enumerate_Dgamma(E, ROOT1, F(1, 4), 1)
    assert list(fam_small.members) == cubes((0, [0]), (1, [0]))
    # strict inequality: dist([1/2,1), {0}) = 1/2 = 1 * side excludes the cube
    fam_exact = enumerate_Dgamma(E, ROOT1, 1, 1)
    assert DyadicCube(1, (1,)) not in fam_exact
    with pytest.raises(EmptySetError):
        enumerate_Dgamma(EmptyModel(1), ROOT1, 1, 2)


@given(point_sets(max_points=4), st.integers(0, 4), st.fractions(
    min_value=F(1, 4), max_value=3))
@settings(max_examples=40, deadline=None)
def test_de_subset_of_dgamma(E, J, gamma):
    if gamma <= 0:
        gamma = F(1, 2)
    root = DyadicCube.root(E.dim)
    de = enumerate_DE(E, root, J)
    dg = enumerate_Dgamma(E, root, gamma, J)
    assert set(de.members) <= set(dg.members)


@given(point_sets(), st.integers(0, 5))
@settings(max_examples=60, deadline=None)
def test_partition_identity(E, J):
    root = DyadicCube.root(E.dim)
    if E.intersect_status(root.box) is Status.FREE:
        return
    dec = enumerate_FE(E, root, J, with_distances=False)
    assert dec.free_volume() + dec.residual_volume() == root.volume


@given(point_sets(max_points=4), st.integers(0, 4))
@settings(max_examples=40, deadline=None)
def test_monotone_refinement(E, J):
    root = DyadicCube.root(E.dim)
    small = enumerate_DE(E, root, J)
    big = enumerate_DE(E, root, J + 2)
    assert set(small.members) <= set(big.members)
    # members at depth <= J agree across truncations
    assert {q for q in big.members if q.depth <= J} == set(small.members)


@given(point_sets(max_points=5), st.integers(1, 5))
@settings(max_examples=50, deadline=None)
def test_parent_closure_of_de(E, J):
    root = DyadicCube.root(E.dim)
    fam = enumerate_DE(E, root, J)
    for q in fam.members:
        if q.depth > root.depth:
            assert parent(q) in fam


@given(point_sets(max_points=5), st.integers(1, 5))
@settings(max_examples=50, deadline=None)
def test_free_maximality(E, J):
    root = DyadicCube.root(E.dim)
    if E.intersect_status(root.box) is Status.FREE:
        return
    dec = enumerate_FE(E, root, J, with_distances=False)
    for q, _ in dec.free:
        assert E.intersect_status(parent(q).box) is not Status.FREE


def test_family_json_round_trip():
    E = PointsModel.make([(0,), (F(1, 2),)])
    fam = enumerate_DE(E, ROOT1, 3)
    assert CubeFamily.from_json(fam.to_json()) == fam
    dec = enumerate_FE(E, ROOT1, 3)
    from cubeporos.families import FreeDecomposition
    again = FreeDecomposition.from_json(dec.to_json())
    assert again == dec
