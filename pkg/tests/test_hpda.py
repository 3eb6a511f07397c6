from fractions import Fraction

import numpy as np
import pytest

from hpda.designs import builtin_design, trivial_design
from hpda.errors import ParameterError, PreconditionError
from hpda.hpda import (
    Hpda,
    build_hpda,
    build_hpda_with_inner,
    subset_point,
    hpda_scheme_point,
    design_hpda_params,
    design_hpda_bound,
    validate_hpda,
)
from hpda.pda import STAR, ConstructionParams, build_pda_from_design
from hpda.samples import inner_pda_5x5, three_mirror_hpda


def test_three_mirror_sample():
    h = three_mirror_hpda()
    assert validate_hpda(h).ok
    assert h.params == (3, 2, 6, 2, 3)
    assert h.S_m == {4, 5, 6}
    assert h.S_k == (frozenset({1, 2, 4}), frozenset({1, 3, 5}), frozenset({2, 3, 6}))
    p = hpda_scheme_point(h)
    assert (p.r1, p.r2) == (Fraction(1, 2), Fraction(1, 2))


def test_fano_hpda():
    d = builtin_design("fano-7-3-1")
    h = build_hpda(d, ConstructionParams(1, 2))
    assert validate_hpda(h).ok
    assert h.params == (7, 3, 7, 4, 1)
    assert all(len(s) == 15 for s in h.S_k)
    p = hpda_scheme_point(h)
    assert (p.m1, p.m2, p.r1, p.r2, p.f) == (Fraction(4, 7), Fraction(1, 7), 1, Fraction(15, 7), 7)
    # mirror of block 127 caches packets 3..6
    k1 = h.mirror_labels.index((1, 2, 7))
    assert np.flatnonzero(h.mirror[:, k1]).tolist() == [2, 3, 4, 5]


def test_fano_mirror_stars_are_star_rows_of_the_pda():
    d = builtin_design("fano-7-3-1")
    p = build_pda_from_design(d, ConstructionParams(1, 2))
    h = build_hpda(d, ConstructionParams(1, 2))
    for k1 in range(h.K1):
        block_cols = p.cells[:, 3 * k1 : 3 * k1 + 3]
        assert np.array_equal(h.mirror[:, k1], (block_cols == STAR).all(axis=1))
        # non-star-row cells keep their server integers
        keep = ~h.mirror[:, k1]
        assert np.array_equal(h.users[k1][keep], block_cols[keep])
        assert set(h.users[k1][h.mirror[:, k1]].ravel().tolist()) <= h.S_m


def test_inner_pda_lift_bound_and_measured():
    d = trivial_design(6, 5)
    cp = ConstructionParams(2, 4)
    inner = inner_pda_5x5(2)
    h = build_hpda_with_inner(d, cp, inner)
    assert validate_hpda(h).ok
    assert h.params == (6, 5, 15, 5, 6)
    bound = design_hpda_bound(d, cp, (inner.Z, inner.S))
    assert (bound.m1, bound.m2, bound.r1, bound.r2) == (Fraction(1, 3), Fraction(2, 5), 2, Fraction(9, 5))
    measured = hpda_scheme_point(h)
    # counting the realized integer sets gives a tighter mirror load than the bound
    assert measured.r1 == 2 and measured.r2 == Fraction(26, 15) <= bound.r2


def test_inner_pda_shape_mismatch():
    d = builtin_design("fano-7-3-1")
    with pytest.raises((PreconditionError, ParameterError)):
        build_hpda_with_inner(d, ConstructionParams(1, 2), inner_pda_5x5(2))


def test_sm_is_contiguous_after_server_integers():
    d = builtin_design("steiner-3-8-4-1")
    cp = ConstructionParams(2, 3)
    h = build_hpda(d, cp)
    par = design_hpda_params(d, cp)
    assert sorted(h.S_m) == list(range(par["S"] + 1, par["S"] + par["S_m_size"] + 1))
    assert par["S_m_size"] == h.K1 * h.Z1 * h.K2


@pytest.mark.parametrize("n,k,j,i", [(7, 6, 5, 1), (7, 6, 5, 2), (8, 7, 6, 4), (8, 6, 2, 1)])
def test_subset_point_matches_build_bound(n, k, j, i):
    h = build_hpda(trivial_design(n, k), ConstructionParams(i, j))
    assert validate_hpda(h).ok
    bound = subset_point(n, k, j, i)
    measured = hpda_scheme_point(h)
    assert (measured.m1, measured.m2, measured.r1, measured.f) == (bound.m1, bound.m2, bound.r1, bound.f)
    assert measured.r2 <= bound.r2


def _corrupt(h, k1, j, k2, value):
    users = h.users.copy()
    users[k1, j, k2] = value
    return Hpda(h.mirror, users, Z1=h.Z1, Z2=h.Z2, S_m=h.S_m, S_k=h.S_k)


def test_duplicated_sm_integer_is_b3():
    h = three_mirror_hpda()
    bad = _corrupt(h, 1, 0, 0, 4)
    rep = validate_hpda(bad)
    assert "B3" in rep.clauses()
    assert any((1, 0, 0) in v.witness for v in rep.violations if v.clause == "B3")


def test_mirror_star_removed_is_b1():
    h = three_mirror_hpda()
    mirror = h.mirror.copy()
    mirror[0, 0] = False
    rep = validate_hpda(Hpda(mirror, h.users, Z1=h.Z1, Z2=h.Z2, S_m=h.S_m, S_k=h.S_k))
    assert "B1" in rep.clauses()
    assert any(v.witness == (("mirror", 0),) for v in rep.violations if v.clause == "B1")


def test_user_array_fault_reports_b2_prefix():
    h = three_mirror_hpda()
    bad = _corrupt(h, 0, 0, 0, 1)  # a star turned into an integer
    rep = validate_hpda(bad)
    assert any(c.startswith("B2/") for c in rep.clauses())


def test_cross_mirror_integer_without_mirror_star_is_b4():
    # two mirrors share integer 1 but the cross cell is not covered by a star
    mirror = np.zeros((2, 2), dtype=bool)
    users = np.array([[[0], [1]], [[1], [2]]])
    h = Hpda(mirror, users, Z1=0, Z2=1, S_m=set(), S_k=({1}, {1, 2}))
    rep = validate_hpda(h)
    assert "B4" in rep.clauses() or "B2/C3b" in rep.clauses() or not rep.ok


def test_hpda_shape_checks():
    with pytest.raises(PreconditionError):
        Hpda(np.zeros((2, 2), dtype=bool), np.zeros((3, 2, 1)), Z1=0, Z2=0, S_m=set(), S_k=(set(), set()))
