from fractions import Fraction

import mpmath
import pytest

from cubeporos.families import enumerate_DE, enumerate_Dgamma
from cubeporos.lattice import DyadicCube
from cubeporos.neighborhoods import (EmbeddingQuery, embedding_check,
                                     gamma_carleson, gamma_witness,
                                     minimal_exceeding_integer)
from cubeporos.sets import PointsModel, Status, cantor_middle_thirds
from cubeporos.sparse import build_witness, carleson_constant, verify_witness

F = Fraction
CANTOR = cantor_middle_thirds()
ROOT1 = DyadicCube.root(1)
ORIGIN = PointsModel.make([(0,)])

mpmath.mp.dps = 40


def test_minimal_exceeding_integer():
    assert minimal_exceeding_integer(F(1, 4)) == 1
    assert minimal_exceeding_integer(1) == 2
    assert minimal_exceeding_integer(F(5, 2)) == 3


def test_gamma_carleson_single_point():
    rep = gamma_carleson(ORIGIN, ROOT1, 2, 10)
    assert rep.n == 3
    assert rep.max_covering <= 3
    assert rep.measured <= 3 * (2 - F(1, 1 << 10))
    assert rep.measured <= rep.bound
    assert rep.bound == rep.base_constant * 18  # (gamma+1)*6 in one dimension


def test_gamma_zero_limit_is_meeting_family():
    fam_small = enumerate_Dgamma(ORIGIN, ROOT1, F(1, 64), 6)
    de = enumerate_DE(ORIGIN, ROOT1, 6)
    assert set(fam_small.members) == set(de.members)
    rep = gamma_carleson(ORIGIN, ROOT1, F(1, 64), 6)
    assert rep.measured == carleson_constant(de).xi_hat


@pytest.mark.parametrize("gamma", [F(1, 4), F(1), F(2)])
def test_gamma_carleson_cantor(gamma):
    rep = gamma_carleson(CANTOR, ROOT1, gamma, 8)
    assert rep.measured <= rep.bound
    assert rep.max_covering <= 3


def test_gamma_monotone_and_contains_de():
    fams = [set(enumerate_Dgamma(CANTOR, ROOT1, g, 6).members)
            for g in (F(1, 4), F(1), F(2))]
    de = set(enumerate_DE(CANTOR, ROOT1, 6).members)
    assert de <= fams[0] <= fams[1] <= fams[2]


def test_gamma_family_parent_closed():
    for g in (F(1, 4), F(1), F(2)):
        fam = enumerate_Dgamma(CANTOR, ROOT1, g, 6)
        for q in fam.members:
            if q.depth > 0:
                assert q.ancestor_at(q.depth - 1) in fam


def test_gamma_witness_small_gamma_matches_plain_witness():
    w = gamma_witness(ORIGIN, ROOT1, F(1, 4), 4)
    w_plain = build_witness(ORIGIN, ROOT1, 4)
    fam = set(enumerate_Dgamma(ORIGIN, ROOT1, F(1, 4), 4).members)
    assert set(enumerate_DE(ORIGIN, ROOT1, 4).members) == fam
    got = {a.cube: a.free_cube for a in w.assignments}
    expected = {a.cube: a.free_cube for a in w_plain.assignments if a.cube in fam}
    assert got == expected


def test_gamma_witness_wide_gamma():
    w = gamma_witness(ORIGIN, ROOT1, 2, 4)
    assert len(w.assignments) > 4
    for a in w.assignments:
        assert ORIGIN.intersect_status(a.free_cube.box) is Status.FREE
    assert verify_witness(w, ORIGIN)


def test_gamma_witness_cantor():
    w = gamma_witness(CANTOR, ROOT1, F(1, 2), 4, search_depth=4)
    for a in w.assignments:
        assert CANTOR.intersect_status(a.free_cube.box) is Status.FREE


def _constant_query(p, J=30):
    fam = enumerate_Dgamma(ORIGIN, ROOT1, F(1, 4), J)
    coeffs = {q: F(1) for q in fam.members}
    return EmbeddingQuery.make(p, F(1, 2), F(1, 4), ROOT1, J, coeffs)


def test_embedding_constant_coefficients_p1():
    report = embedding_check(ORIGIN, _constant_query(1))
    J = 30
    half = mpmath.mpf(2) ** mpmath.mpf("-0.5")
    lhs_oracle = float(2 * (1 - half ** (J + 1)) / (1 - half))
    assert report.lhs.width <= F(1, 10 ** 4)
    assert report.rhs.width <= F(1, 10 ** 4)
    assert abs(float(report.lhs.lo) - lhs_oracle) < 1e-12
    assert report.rhs.contains(2)
    assert report.mass_lower_check == "certified"


def test_embedding_constant_coefficients_p2():
    report = embedding_check(ORIGIN, _constant_query(2))
    # stacked-square closed form: sum over cells of height^2 * cell mass
    J = 30
    half = mpmath.mpf(2) ** mpmath.mpf("-0.5")
    total = mpmath.mpf(0)
    for k in range(J):
        mass = 2 * (half ** k) * (1 - half)
        total += (k + 1) ** 2 * mass
    total += (J + 1) ** 2 * 2 * half ** J
    lhs_oracle = float(mpmath.sqrt(total))
    assert abs(float(report.lhs.lo) - lhs_oracle) < 1e-10
    assert abs(float(report.rhs.lo) - float(mpmath.sqrt(2))) < 1e-10


def test_embedding_single_cube_identity():
    fam = enumerate_Dgamma(ORIGIN, ROOT1, F(1, 4), 6)
    for p in (F(1), F(2), F(3, 2)):
        q = EmbeddingQuery.make(p, F(1, 2), F(1, 4), ROOT1, 6, {ROOT1: F(1)})
        report = embedding_check(ORIGIN, q)
        assert report.lhs == report.rhs


def test_embedding_rejects_foreign_cube():
    q = EmbeddingQuery.make(1, F(1, 2), F(1, 64), ROOT1, 3,
                            {DyadicCube(1, (1,)): F(1)})
    with pytest.raises(ValueError):
        embedding_check(ORIGIN, q)


def test_embedding_query_json_round_trip():
    q = _constant_query(2, J=5)
    again = EmbeddingQuery.from_json(q.to_json())
    assert again == q
