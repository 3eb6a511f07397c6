"""Placement delivery arrays: the data type, its validators and constructions.

Cells live in an ``F x K`` integer array where ``0`` encodes the star; every
other entry is a positive integer in ``1..S``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from .designs import Design, trivial_design
from .errors import ConstructionError, ParameterError, PreconditionError, Report
from .points import PdaPoint

STAR = 0


@dataclass(frozen=True)
class ColumnLabel:
    block_index: int
    block: tuple[int, ...]
    subset: tuple[int, ...]

    def __str__(self) -> str:
        return f"A={_word(self.block)}/Y={_word(self.subset)}"


@dataclass(frozen=True)
class ConstructionParams:
    i: int
    j: int

    def check(self, d: Design) -> None:
        if not 1 <= self.i:
            raise ParameterError(f"need i >= 1, got i={self.i}")
        if not self.i <= self.j:
            raise ParameterError(f"need i <= j, got i={self.i}, j={self.j}")
        if not self.j <= d.t:
            raise ParameterError(f"need j <= t={d.t}, got j={self.j}")


@dataclass(frozen=True, eq=False)
class Pda:
    """An ``F x K`` array over {star} and ``1..S`` with declared (K, F, Z, S)."""

    cells: np.ndarray
    Z: int
    S: int
    rows: tuple = ()
    cols: tuple = ()

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.int64)
        if cells.ndim != 2:
            raise PreconditionError(f"PDA cells must be 2-dimensional, got shape {cells.shape}")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)
        if not self.rows:
            object.__setattr__(self, "rows", tuple(range(1, cells.shape[0] + 1)))
        if not self.cols:
            object.__setattr__(self, "cols", tuple(range(1, cells.shape[1] + 1)))
        if len(self.rows) != cells.shape[0] or len(self.cols) != cells.shape[1]:
            raise PreconditionError("row/column labels do not match the cell array shape")

    @property
    def F(self) -> int:
        return self.cells.shape[0]

    @property
    def K(self) -> int:
        return self.cells.shape[1]

    @property
    def params(self) -> tuple[int, int, int, int]:
        return (self.K, self.F, self.Z, self.S)

    def __repr__(self) -> str:
        return f"Pda{self.params}"

    @classmethod
    def from_rows(cls, rows, Z: int | None = None, S: int | None = None) -> "Pda":
        """Build from nested lists holding ``"*"`` and integers; infers Z and S."""
        grid = np.array([[STAR if c in ("*", None) else int(c) for c in row] for row in rows], dtype=np.int64)
        if Z is None:
            Z = int((grid == STAR).sum(axis=0)[0]) if grid.size else 0
        if S is None:
            S = int(grid.max()) if grid.size else 0
        return cls(grid, Z=Z, S=S)

    def to_rows(self) -> list[list]:
        return [["*" if c == STAR else int(c) for c in row] for row in self.cells]


def validate_pda(p: Pda) -> Report:
    """Check conditions C1, C2, C3(a) and C3(b) with cell-level witnesses."""
    report = Report()
    check_pda_cells(p.cells, p.Z, range(1, p.S + 1), report)
    return report


def check_pda_cells(cells: np.ndarray, Z: int, alphabet, report: Report, prefix: str = "", where: str = "") -> None:
    """Append PDA-condition violations of ``cells`` to ``report``.

    ``alphabet`` is the set of integers that must each appear at least once.
    Clause names get ``prefix`` so callers can report e.g. ``B2/C3b``.
    """
    at = f" of {where}" if where else ""
    stars = cells == STAR
    allowed = set(int(a) for a in alphabet)

    per_col = stars.sum(axis=0)
    for k in np.flatnonzero(per_col != Z):
        report.add(prefix + "C1", f"column {k}{at} has {per_col[k]} stars, expected {Z}", int(k), int(per_col[k]))

    occ = occurrences(cells)
    for s in sorted(set(occ) - allowed):
        j, k = occ[s][0]
        report.add(prefix + "range", f"cell ({j},{k}){at} holds {s}, outside the integer set", (j, k))
    for s in sorted(allowed - set(occ)):
        report.add(prefix + "C2", f"integer {s} never occurs{at}", s)

    for s, cells_s in occ.items():
        if len(cells_s) < 2:
            continue
        rows = np.array([c[0] for c in cells_s])
        cols = np.array([c[1] for c in cells_s])
        same_row = rows[:, None] == rows[None, :]
        same_col = cols[:, None] == cols[None, :]
        np.fill_diagonal(same_row, False)
        np.fill_diagonal(same_col, False)
        for a, b in zip(*np.nonzero(np.triu(same_row | same_col))):
            kind = "row" if rows[a] == rows[b] else "column"
            report.add(
                prefix + "C3a",
                f"integer {s} repeats in a {kind}{at} at {cells_s[a]} and {cells_s[b]}",
                cells_s[a],
                cells_s[b],
            )
        # cross[a, b] is the cell in the row of a and the column of b
        cross = cells[np.ix_(rows, cols)]
        bad = (cross != STAR) & ~same_row & ~same_col
        np.fill_diagonal(bad, False)
        for a, b in zip(*np.nonzero(bad)):
            if rows[a] == rows[b] or cols[a] == cols[b]:
                continue
            jj, kk = int(rows[a]), int(cols[b])
            report.add(
                prefix + "C3b",
                f"integer {s} at {cells_s[a]} and {cells_s[b]}{at} needs a star at ({jj},{kk}), found {cells[jj, kk]}",
                cells_s[a],
                cells_s[b],
                (jj, kk),
            )


def occurrences(cells: np.ndarray) -> dict[int, list[tuple[int, int]]]:
    """Map every non-star value to its cells in row-major order."""
    out: dict[int, list[tuple[int, int]]] = {}
    js, ks = np.nonzero(cells != STAR)
    for j, k in zip(js.tolist(), ks.tolist()):
        out.setdefault(int(cells[j, k]), []).append((j, k))
    return out


def regularity(p: Pda) -> int | None:
    """Common occurrence count g of every integer, or None if counts differ."""
    counts = np.bincount(p.cells[p.cells != STAR], minlength=p.S + 1)[1:]
    if counts.size == 0 or counts.min() != counts.max():
        return None
    return int(counts[0])


def design_pda_params(d: Design, cp: ConstructionParams) -> dict[str, int]:
    """Closed-form (K, F, Z, S), regularity and the largest occurrence index."""
    v, k, t, lam = d.v, d.k, d.t, d.lam
    i, j = cp.i, cp.j
    b = Fraction(lam * comb(v, t), comb(k, t))
    alpha_max = Fraction(lam * comb(v - j, t - j), comb(k - j, t - j))
    return {
        "K": int(b * comb(k, j)),
        "F": comb(v, i),
        "Z": comb(v, i) - comb(j, i),
        "S": int(comb(v, j - i) * alpha_max),
        "g": comb(v - j + i, i),
        "alpha_max": int(alpha_max),
    }


def build_pda_from_design(d: Design, cp: ConstructionParams) -> Pda:
    """Array indexed by i-subsets X (rows) and pairs (A, Y), Y a j-subset of
    block A (columns). Entry is a star unless X is inside Y, in which case it
    encodes ``(Y - X, alpha)`` as ``(alpha - 1) * C(v, j - i) + rank(Y - X)``;
    alpha counts earlier occurrences of ``Y - X`` in the same row.
    """
    cp.check(d)
    i, j = cp.i, cp.j
    rows = tuple(combinations(d.points, i))
    cols = tuple(
        ColumnLabel(bi, blk, y) for bi, blk in enumerate(d.blocks) for y in combinations(blk, j)
    )
    rank = {sub: r for r, sub in enumerate(combinations(d.points, j - i), start=1)}
    width = comb(d.v, j - i)

    cells = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for r, x in enumerate(rows):
        xs = set(x)
        seen: dict[tuple[int, ...], int] = {}
        for c, col in enumerate(cols):
            if xs.issubset(col.subset):
                diff = tuple(p for p in col.subset if p not in xs)
                alpha = seen.get(diff, 0) + 1
                seen[diff] = alpha
                cells[r, c] = (alpha - 1) * width + rank[diff]

    expected = design_pda_params(d, cp)
    p = Pda(cells, Z=expected["Z"], S=expected["S"], rows=rows, cols=cols)
    _check_measured(p, expected, width)
    return p


def _check_measured(p: Pda, expected: dict[str, int], width: int) -> None:
    vals = p.cells[p.cells != STAR]
    measured = {
        "K": p.K,
        "F": p.F,
        "S": len(np.unique(vals)),
        "alpha_max": int((vals - 1).max() // width + 1) if vals.size else 0,
    }
    per_col = (p.cells == STAR).sum(axis=0)
    if per_col.min() != per_col.max() or per_col[0] != expected["Z"]:
        raise ConstructionError(f"star counts per column {sorted(set(per_col.tolist()))} != Z={expected['Z']}")
    for key, val in measured.items():
        if val != expected[key]:
            raise ConstructionError(f"constructed {key}={val} differs from closed form {expected[key]}")
    report = validate_pda(p)
    if not report.ok:
        raise ConstructionError(f"constructed array is not a PDA:\n{report}")
    if regularity(p) != expected["g"]:
        raise ConstructionError(f"regularity {regularity(p)} differs from closed form {expected['g']}")


def subset_pda_params(n: int, k: int, j: int, i: int) -> dict[str, int]:
    _check_nkji(n, k, j, i)
    return {
        "K": comb(n, k) * comb(k, j),
        "F": comb(n, i),
        "Z": comb(n, i) - comb(j, i),
        "S": comb(n, j - i) * comb(n - j, k - j),
        "g": comb(n - j + i, i),
    }


def subset_pda(n: int, k: int, j: int, i: int) -> Pda:
    _check_nkji(n, k, j, i)
    p = build_pda_from_design(trivial_design(n, k), ConstructionParams(i, j))
    expected = subset_pda_params(n, k, j, i)
    if p.params != (expected["K"], expected["F"], expected["Z"], expected["S"]):
        raise ConstructionError(f"subset-design parameters {expected} differ from built {p.params}")
    return p


def _check_nkji(n: int, k: int, j: int, i: int) -> None:
    if not (1 <= i <= j <= k <= n):
        raise ParameterError(f"need 1 <= i <= j <= k <= n, got (n,k,j,i)=({n},{k},{j},{i})")


def man_pda(K: int, t_man: int) -> Pda:
    """The (K, C(K,t), C(K-1,t-1), C(K,t+1)) PDA of the uncoded-placement
    scheme with t = K*M/N: star iff the user is in the row's t-subset."""
    if not (1 <= t_man < K):
        raise ParameterError(f"need 1 <= t_man < K, got K={K}, t_man={t_man}")
    rows = tuple(combinations(range(1, K + 1), t_man))
    rank = {sub: r for r, sub in enumerate(combinations(range(1, K + 1), t_man + 1), start=1)}
    cells = np.zeros((len(rows), K), dtype=np.int64)
    for r, x in enumerate(rows):
        for u in range(1, K + 1):
            if u not in x:
                cells[r, u - 1] = rank[tuple(sorted(x + (u,)))]
    p = Pda(cells, Z=comb(K - 1, t_man - 1), S=comb(K, t_man + 1), rows=rows, cols=tuple(range(1, K + 1)))
    report = validate_pda(p)
    if not report.ok:
        raise ConstructionError(f"MAN array is not a PDA:\n{report}")
    return p


def transpose_pda(p: Pda) -> Pda:
    per_row = (p.cells == STAR).sum(axis=1)
    if per_row.size and per_row.min() != per_row.max():
        a = int(np.argmin(per_row))
        b = int(np.argmax(per_row))
        raise PreconditionError(
            f"rows {a} and {b} have {per_row[a]} and {per_row[b]} stars; transpose needs a constant row star count"
        )
    z_row = Fraction(p.K * p.Z, p.F)
    if z_row.denominator != 1 or (per_row.size and per_row[0] != z_row):
        raise PreconditionError(f"row star count {per_row[0] if per_row.size else 0} != K*Z/F = {z_row}")
    return Pda(p.cells.T.copy(), Z=int(z_row), S=p.S, rows=p.cols, cols=p.rows)


def pda_scheme_point(p: Pda, tag: str = "") -> PdaPoint:
    validate_pda(p).require("PDA")
    return PdaPoint(K=p.K, m=Fraction(p.Z, p.F), r=Fraction(p.S, p.F), f=p.F, tag=tag)


def same_up_to_relabeling(a: np.ndarray, b: np.ndarray) -> bool:
    """True when both arrays have the same star pattern and partition their
    non-star cells into the same equal-value classes."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or not np.array_equal(a == STAR, b == STAR):
        return False
    mapping: dict = {}
    reverse: dict = {}
    for x, y in zip(a[a != STAR].tolist(), b[b != STAR].tolist()):
        if mapping.setdefault(x, y) != y or reverse.setdefault(y, x) != x:
            return False
    return True


def _word(subset) -> str:
    return "".join(str(x) for x in subset) if all(x < 10 for x in subset) else "{" + ",".join(map(str, subset)) + "}"
