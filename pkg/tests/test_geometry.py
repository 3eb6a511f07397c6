from fractions import Fraction as Fr

import pytest

from hpda.errors import ParameterError
from hpda.geometry import (
    AchievablePoint,
    Envelope,
    convexity_report,
    grid_convexity_violations,
    lower_envelope,
    share3,
    square_grid,
    trivial_points,
)
from hpda.hpda import subset_point
from hpda.reports import fig6_points


def test_share3_is_the_weighted_average():
    a = AchievablePoint(0, 0, 42, 6)
    b = AchievablePoint.from_scheme(subset_point(7, 6, 5, 1))
    c = AchievablePoint.from_scheme(subset_point(7, 6, 5, 2))
    s = share3(a, b, c, Fr(3, 5), Fr(3, 10))
    assert (s.m1, s.m2) == (Fr(1, 14), Fr(1, 15))
    assert (s.r1, s.r2) == (Fr(428, 15), Fr(578, 105))
    assert s.t_seq == Fr(3574, 105)


def test_share3_rejects_bad_weights():
    p = AchievablePoint(0, 0, 1, 1)
    with pytest.raises(ParameterError):
        share3(p, p, p, Fr(2, 3), Fr(2, 3))
    with pytest.raises(ParameterError):
        share3(p, p, p, Fr(-1, 3), 0)


def test_floats_are_refused():
    with pytest.raises((ParameterError, TypeError)):
        AchievablePoint(0.5, 0, 1, 1)


def test_trivial_points():
    full, empty = trivial_points(6, 42)
    assert (full.m1, full.m2, full.t_seq) == (0, 1, 0)
    assert (empty.r1, empty.r2) == (42, 6)


def test_envelope_on_a_triangle():
    pts = [AchievablePoint(0, 0, 4, 0), AchievablePoint(1, 0, 0, 0), AchievablePoint(0, 1, 0, 0)]
    env = Envelope(pts)
    v = env.query(Fr(1, 4), Fr(1, 4))
    assert v.feasible and v.t == 2
    assert dict(v.support) == {0: Fr(1, 2), 1: Fr(1, 4), 2: Fr(1, 4)}
    assert not env.query(1, 1).feasible
    # on an edge
    assert env.query(Fr(1, 2), 0).t == 2


def test_envelope_picks_the_cheaper_support():
    pts = [
        AchievablePoint(0, 0, 10, 0),
        AchievablePoint(1, 0, 0, 0),
        AchievablePoint(0, 1, 0, 0),
        AchievablePoint(Fr(1, 4), Fr(1, 4), 1, 0),
    ]
    assert Envelope(pts).query(Fr(1, 4), Fr(1, 4)).t == 1


def test_self_domination_and_convexity_of_family():
    pts = fig6_points()
    env = Envelope(pts)
    for p in pts:
        assert env.query(p.m1, p.m2).t <= p.t_seq
    report = convexity_report(pts)
    assert all(e.on_envelope for e in report[:7])


def test_dominated_point_is_flagged():
    pts = [AchievablePoint(0, 0, 4, 0), AchievablePoint(1, 0, 0, 0), AchievablePoint(Fr(1, 2), 0, 5, 0)]
    rep = convexity_report(pts)
    assert not rep[2].on_envelope and rep[2].best_other == 2


def test_grid_envelope_is_convex():
    pts = fig6_points()
    step = Fr(1, 10)
    values = lower_envelope(pts, square_grid(step))
    assert len(values) == 121
    assert grid_convexity_violations(values, step) == []


def test_square_grid_step():
    assert len(square_grid(Fr(1, 4))) == 25
    with pytest.raises(ParameterError):
        square_grid(Fr(2, 7))
