"""Randomized invariants over small trivial designs."""
from math import comb

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from hpda.designs import trivial_design
from hpda.geometry import AchievablePoint, Envelope, share3
from hpda.hpda import build_hpda, subset_point, hpda_scheme_point, validate_hpda
from hpda.pda import STAR, ConstructionParams, subset_pda, regularity, validate_pda
from hpda.simulate import simulate


@st.composite
def nkji(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(1, n))
    j = draw(st.integers(1, k))
    i = draw(st.integers(1, j))
    return n, k, j, i


@settings(max_examples=60, deadline=None)
@given(nkji())
def test_subset_pda_invariants(args):
    n, k, j, i = args
    p = subset_pda(n, k, j, i)
    assert validate_pda(p).ok
    assert regularity(p) == comb(n - j + i, i)
    assert ((p.cells == STAR).sum(axis=0) == comb(n, i) - comb(j, i)).all()


@settings(max_examples=40, deadline=None)
@given(nkji(), st.integers(0, 2**16))
def test_hpda_invariants_and_decoding(args, seed):
    n, k, j, i = args
    h = build_hpda(trivial_design(n, k), ConstructionParams(i, j))
    assert validate_hpda(h).ok
    bound = subset_point(n, k, j, i)
    got = hpda_scheme_point(h)
    assert (got.m1, got.m2, got.r1) == (bound.m1, bound.m2, bound.r1)
    assert got.r2 <= bound.r2
    rep = simulate(h, policy=("sample", 8), seed=seed, packet_bytes=2)
    assert rep.ok
    assert rep.measured_r1 == got.r1 and rep.measured_r2 == got.r2
    assert rep.mirror_ratio == got.m1 and rep.user_ratio == got.m2


fractions = st.fractions(min_value=0, max_value=1, max_denominator=12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(fractions, fractions, fractions, fractions), min_size=3, max_size=3), fractions, fractions)
def test_shared_point_is_never_below_envelope(raw, a, b):
    if a + b > 1:
        a, b = 1 - a, 1 - b
    pts = [AchievablePoint(*p) for p in raw]
    s = share3(*pts, a, b)
    v = Envelope(pts).query(s.m1, s.m2)
    assert v.feasible and v.t <= s.t_seq
