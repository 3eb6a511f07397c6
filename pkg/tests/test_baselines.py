from fractions import Fraction as Fr
from math import comb

import pytest

from conftest import printed_match
from hpda import baselines as bl
from hpda.errors import ParameterError


def test_man_rate_integral_and_shared():
    assert bl.man_rate(Fr(1, 6), 6)[0] == Fr(5, 2)
    rate, f = bl.man_rate(Fr(1, 7), 6)
    assert rate == 3
    assert f == max(comb(6, 0), comb(6, 1))
    assert bl.man_rate(1, 5) == (0, 1)
    assert bl.man_rate(0, 5) == (5, 1)
    assert bl.r(Fr(1, 2), 4) == Fr(2, 3)


def test_man_rate_caps_at_library_size():
    # with fewer files than users the N/K term of the min wins
    assert bl.man_rate(bl.ManRateInput(Fr(0), 10, 2))[0] == 2


def test_man_rate_rejects_out_of_range():
    with pytest.raises(ParameterError):
        bl.man_rate(Fr(3, 2), 4)
    with pytest.raises(ParameterError):
        bl.man_rate(Fr(-1, 2), 4)


@pytest.mark.parametrize(
    "K1,K2,m1,m2,want",
    [
        (14, 4, Fr(11, 14), Fr(3, 28), (Fr(11, 14), Fr(1, 4))),
        (7, 6, Fr(1, 7), Fr(1, 7), (Fr(1, 7), Fr(1, 7))),
        (7, 6, Fr(1, 14), Fr(1, 15), (Fr(5, 33), Fr(0))),
    ],
)
def test_knmd_regimes(K1, K2, m1, m2, want):
    assert bl.knmd_optimal_ab(K1, K2, m1, m2, 1) == want


def test_knmd_printed_values():
    p = bl.knmd_point(14, 4, Fr(11, 14), Fr(3, 28), Fr(11, 14), Fr(1, 4))
    assert printed_match(p.r1, "0.3409") and printed_match(p.r2, "3.107") and printed_match(p.f, "1.346e15")
    p = bl.knmd_point(7, 6, Fr(1, 7), Fr(1, 7), Fr(1, 7), Fr(1, 7))
    assert printed_match(p.r1, "4.408") and p.r2 == 3 and printed_match(p.f, "5.24e6")


def test_knmd_low_memory_regime_departs_from_printed_r1():
    # the printed first-layer load for this row is 7.8587
    p = bl.knmd_point(7, 6, Fr(1, 14), Fr(1, 15), Fr(5, 33), 0)
    assert p.r1 == Fr(4689, 550)
    assert p.r2 == Fr(23, 5) and printed_match(p.f, "1.1193e5")
    # dropping the K2 factor of the mirror term gives the printed figure
    a = Fr(5, 33)
    r_alt = a * bl.r(Fr(1, 14) / a, 7) + (1 - a) * bl.r(Fr(1, 15) / (1 - a), 42)
    assert printed_match(r_alt, "7.8587")


def test_knmd_reduces_to_scheme_a_and_b():
    a = bl.knmd_point(14, 4, Fr(11, 14), Fr(3, 28), 1, 1)
    sa = bl.scheme_a_point(14, 4, Fr(11, 14), Fr(3, 28))
    assert (a.r1, a.r2) == (sa.r1, sa.r2)
    b = bl.knmd_point(14, 4, Fr(11, 14), Fr(3, 28), 0, 0)
    sb = bl.scheme_b_point(14, 4, Fr(11, 14), Fr(3, 28))
    assert (b.r1, b.r2, b.f) == (sb.r1, sb.r2, sb.f)


def test_knmd_clamps_with_note():
    res = bl.knmd_detail(4, 2, Fr(1, 2), Fr(1, 2), Fr(1, 4), 0)
    assert res.notes and "clamped" in res.notes[0]


def test_scheme_a_and_b():
    a = bl.scheme_a_point(14, 4, Fr(11, 14), Fr(3, 28))
    assert (a.r1, a.f) == (1, 364) and printed_match(a.r2, "2.9285")
    b = bl.scheme_b_point(14, 4, Fr(11, 14), Fr(3, 28))
    assert printed_match(b.r1, "7.1428") and printed_match(b.f, "3.247e7")
    assert bl.scheme_a_point(4, 3, 1, Fr(1, 3)).r1 == 0


def test_product_scheme():
    p = bl.kywm_scheme2_point((14, 2, 1, 7), (6, 4, 1, 11))
    assert (p.f, p.r1, p.r2) == (8, Fr(77, 8), Fr(11, 4))
    p = bl.kywm_scheme2_point((8, 2, 1, 4), (35, 35, 17, 210))
    assert (p.f, p.r1, p.r2) == (70, 12, 6)
    assert bl.kywm_scheme2_point((2, 2, 1, 1), (3, 3, 1, 1)).r2 == Fr(1, 3)
    with pytest.raises(ParameterError):
        bl.kywm_scheme2_point((2, 2, 2, 1), (3, 3, 1, 1))


def test_jc():
    p = bl.jc_point(4, 3, Fr(1, 2), Fr(1, 3))
    assert (p.r1, p.r2, p.f) == (Fr(4, 3), 1, 18)
    assert bl.jc_point(8, 7, Fr(1, 2), Fr(2, 7)).f == 1470
    p = bl.jc_point(4, 3, Fr(1, 2), 1)
    assert p.r1 == p.r2 == 0
    with pytest.raises(ParameterError):
        bl.jc_point(4, 3, Fr(1, 3), Fr(1, 3))


def test_wwcy():
    a = Fr(41, 56)
    t = bl.wwcy_delay(8, 7, Fr(1, 2), Fr(2, 7), a, a)
    assert printed_match(t, "1.9525")
    m1, m2 = Fr(1, 2), Fr(2, 7)
    assert bl.wwcy_delay(8, 7, m1, m2, 1, 1) == bl.r(m1, 8) * bl.r(m2, 7) + m1 * bl.r(m2, 7)
    assert bl.wwcy_delay(8, 7, m1, m2, 0, Fr(1, 2)) == bl.r(m2 / 2, 56)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_table5_closed_forms_agree(q):
    for cf, dr in zip(bl.table5_closed_forms(q), bl.table5_direct(q)):
        if dr.f is not None:
            assert (cf.f, cf.r1, cf.r2, cf.t) == (dr.f, dr.r1, dr.r2, dr.t), cf.scheme


def test_table5_scheme2_undefined_for_q2():
    row = next(r for r in bl.table5_direct(2) if r.scheme == "scheme II")
    assert row.f is None and "fractional" in row.note


@pytest.mark.parametrize("q", range(5, 13))
def test_orderings_hold_from_q5(q):
    assert bl.table5_orderings(q) == {"F": True, "T": True}


@pytest.mark.parametrize("q", [2, 3, 4])
def test_orderings_fail_below_q5(q):
    o = bl.table5_orderings(q)
    assert not (o["F"] and o["T"])


def test_delay_ratio_closed_form():
    for q in range(2, 9):
        rows = {r.scheme: r for r in bl.table5_closed_forms(q)}
        ratio = rows["JC"].t / rows["proposed"].t
        assert ratio == Fr(q**5 + q**4 - q**3 + 3 * q * q + 2 * q, 2 * q**4 + q**3 + 4 * q * q - q - 2)
        assert ratio > 1


def test_q_validation():
    with pytest.raises(ParameterError):
        bl.table5_closed_forms(1)
