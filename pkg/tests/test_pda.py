from fractions import Fraction
from math import comb

import numpy as np
import pytest

from hpda.designs import builtin_design, trivial_design
from hpda.errors import ConstructionError, ParameterError, PreconditionError
from hpda.pda import (
    STAR,
    ConstructionParams,
    Pda,
    build_pda_from_design,
    subset_pda_params,
    subset_pda,
    man_pda,
    occurrences,
    pda_scheme_point,
    regularity,
    same_up_to_relabeling,
    design_pda_params,
    transpose_pda,
    validate_pda,
)
from hpda.samples import inner_pda_5x5

_ = "*"
EXAMPLE_PDA = [
    [_, _, _, 1, 2, 3],
    [_, 1, 2, _, _, 0],
    [1, _, 3, _, 0, _],
    [2, 3, _, 0, _, _],
]


def test_textbook_pda_with_zero_based_integers():
    # integers in the worked example start at 0; shift them to 1..S
    rows = [[c if c == _ else c + 1 for c in row] for row in EXAMPLE_PDA]
    p = Pda.from_rows(rows)
    assert p.params == (6, 4, 2, 4)
    assert validate_pda(p).ok
    assert regularity(p) == 3


def test_example_inner_pda_is_valid_but_irregular():
    p = inner_pda_5x5(2)
    assert p.params == (5, 5, 2, 7)
    assert validate_pda(p).ok
    assert regularity(p) is None
    assert len(occurrences(p.cells)[1]) == 3 and len(occurrences(p.cells)[2]) == 2


@pytest.mark.parametrize("z,S", [(1, 10), (2, 7), (3, 4), (4, 1)])
def test_inner_pdas(z, S):
    p = inner_pda_5x5(z)
    assert p.params == (5, 5, z, S)
    assert validate_pda(p).ok


def test_fano_build_params_and_point():
    d = builtin_design("fano-7-3-1")
    p = build_pda_from_design(d, ConstructionParams(1, 2))
    assert p.params == (21, 7, 5, 7)
    assert regularity(p) == 6
    pt = pda_scheme_point(p)
    assert (pt.m, pt.r, pt.f) == (Fraction(5, 7), Fraction(1), 7)


def test_cell_integer_encoding():
    # (alpha - 1) * C(v, j - i) + rank of Y minus X
    d = trivial_design(6, 5)
    p = build_pda_from_design(d, ConstructionParams(2, 4))
    ranks = {s: n + 1 for n, s in enumerate(__import__("itertools").combinations(range(1, 7), 2))}
    for r, X in enumerate(p.rows):
        seen = {}
        for c, col in enumerate(p.cols):
            if set(X) <= set(col.subset):
                rest = tuple(sorted(set(col.subset) - set(X)))
                seen[rest] = seen.get(rest, 0) + 1
                assert p.cells[r, c] == (seen[rest] - 1) * 15 + ranks[rest]
            else:
                assert p.cells[r, c] == STAR


def test_design_params_for_catalog():
    for name in ("fano-7-3-1", "steiner-3-8-4-1", "affine-2-9-3-1"):
        d = builtin_design(name)
        for j in range(1, d.t + 1):
            for i in range(1, j + 1):
                cp = ConstructionParams(i, j)
                p = build_pda_from_design(d, cp)
                want = design_pda_params(d, cp)
                assert p.params == (want["K"], want["F"], want["Z"], want["S"])
                assert validate_pda(p).ok
                assert regularity(p) == comb(d.v - j + i, i)


def test_parameter_errors_name_the_inequality():
    d = builtin_design("fano-7-3-1")
    with pytest.raises(ParameterError, match="j <= t"):
        build_pda_from_design(d, ConstructionParams(1, 3))
    with pytest.raises(ParameterError, match="i <= j"):
        build_pda_from_design(d, ConstructionParams(2, 1))
    with pytest.raises(ParameterError):
        subset_pda(4, 5, 1, 1)


def test_single_block_degenerate_case():
    p = subset_pda(3, 3, 1, 1)
    assert p.params == (3, 3, 2, 1)
    assert validate_pda(p).ok
    assert set(p.cells[p.cells != STAR].tolist()) == {1}


def test_subset_params_small():
    assert subset_pda(6, 5, 4, 2).params == (30, 15, 9, 30)
    c = subset_pda_params(4, 4, 3, 1)
    assert (c["K"], c["F"], c["Z"], c["S"]) == (4, 4, 1, 6)
    assert subset_pda(4, 4, 3, 1).params == (4, 4, 1, 6)


def test_man_pda():
    p = man_pda(4, 2)
    assert p.params == (4, 6, 3, 4) and regularity(p) == 3
    assert pda_scheme_point(p).r == Fraction(2, 3)
    assert man_pda(2, 1).params == (2, 2, 1, 1)
    assert regularity(man_pda(4, 1)) == 2
    with pytest.raises(ParameterError):
        man_pda(3, 3)


@pytest.mark.parametrize("n,i", [(4, 1), (5, 2), (6, 3)])
def test_subset_pda_with_k_equal_n_is_man(n, i):
    a = subset_pda(n, n, n - 1, i)
    b = man_pda(n, i)
    # column Y = [n] minus {u} lists users in reverse point order
    assert a.params == b.params
    assert same_up_to_relabeling(a.cells[:, ::-1], b.cells)


def test_transpose():
    t = transpose_pda(man_pda(4, 2))
    assert t.params == (6, 4, 2, 4)
    assert validate_pda(t).ok
    assert np.array_equal(transpose_pda(t).cells, man_pda(4, 2).cells)
    c = transpose_pda(subset_pda(5, 5, 4, 2))
    assert c.params == (comb(5, 2), 5, 2, comb(5, 3))


def test_transpose_rejects_uneven_rows():
    p = Pda(np.array([[0, 0], [1, 0], [0, 1]]), Z=2, S=1)
    assert validate_pda(p).ok
    with pytest.raises(PreconditionError, match="row"):
        transpose_pda(p)


def test_star_overwritten_is_localized():
    p = build_pda_from_design(builtin_design("fano-7-3-1"), ConstructionParams(1, 2))
    j, k = map(int, np.argwhere(p.cells == STAR)[0])
    cells = p.cells.copy()
    cells[j, k] = 1
    rep = validate_pda(Pda(cells, Z=p.Z, S=p.S))
    assert {"C1", "C3a"} & rep.clauses() or "C3b" in rep.clauses()
    assert any((j, k) in v.witness or k in v.witness for v in rep.violations)


def test_c3b_witness_names_the_cell():
    cells = np.array([[0, 1], [1, 2]])
    rep = validate_pda(Pda(cells, Z=1, S=2))
    assert "C3b" in rep.clauses() or "C1" in rep.clauses()
    cells = np.array([[0, 1], [1, 0]])
    assert validate_pda(Pda(cells, Z=1, S=1)).ok
    cells = np.array([[2, 1], [1, 0]])
    rep = validate_pda(Pda(cells, Z=1, S=2))
    c3b = [v for v in rep.violations if v.clause == "C3b"]
    assert c3b and (0, 0) in c3b[0].witness


def test_missing_integer_is_c2():
    cells = np.array([[0, 1], [1, 0]])
    rep = validate_pda(Pda(cells, Z=1, S=2))
    assert rep.clauses() == {"C2"}


def test_repeat_in_row_is_c3a():
    cells = np.array([[1, 1], [0, 0]])
    rep = validate_pda(Pda(cells, Z=1, S=1))
    assert "C3a" in rep.clauses()


def test_same_up_to_relabeling_detects_partition_change():
    a = np.array([[0, 1], [1, 0]])
    assert same_up_to_relabeling(a, a * 7)
    assert not same_up_to_relabeling(np.array([[1, 2], [2, 1]]), np.array([[1, 2], [1, 2]]))
    assert not same_up_to_relabeling(a, np.array([[1, 0], [0, 1]]))
