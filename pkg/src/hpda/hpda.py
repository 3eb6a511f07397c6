"""Hierarchical placement delivery arrays for server/mirror/user networks.

An :class:`Hpda` holds the mirror placement array (``True`` = star, ``False``
= null) and one user array per mirror, each using the same star encoding as
:class:`~hpda.pda.Pda` (``0`` = star).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .designs import Design
from .errors import ConstructionError, PreconditionError, Report
from .pda import STAR, ConstructionParams, Pda, build_pda_from_design, check_pda_cells, validate_pda
from .points import SchemePoint


@dataclass(frozen=True, eq=False)
class Hpda:
    mirror: np.ndarray
    users: np.ndarray
    Z1: int
    Z2: int
    S_m: frozenset
    S_k: tuple
    rows: tuple = ()
    mirror_labels: tuple = ()
    user_labels: tuple = ()
    # closed-form values the builder promised; empty for hand-made arrays
    formula: dict = field(default_factory=dict)

    def __post_init__(self):
        mirror = np.array(self.mirror, dtype=bool)
        users = np.array(self.users, dtype=np.int64)
        if mirror.ndim != 2 or users.ndim != 3:
            raise PreconditionError("mirror array must be F x K1 and user arrays K1 x F x K2")
        if users.shape[0] != mirror.shape[1] or users.shape[1] != mirror.shape[0]:
            raise PreconditionError(
                f"shape mismatch: mirror {mirror.shape} vs user arrays {users.shape} (expected K1 x F x K2)"
            )
        if len(self.S_k) != mirror.shape[1]:
            raise PreconditionError(f"need {mirror.shape[1]} integer sets S_k, got {len(self.S_k)}")
        mirror.setflags(write=False)
        users.setflags(write=False)
        object.__setattr__(self, "mirror", mirror)
        object.__setattr__(self, "users", users)
        object.__setattr__(self, "S_m", frozenset(int(s) for s in self.S_m))
        object.__setattr__(self, "S_k", tuple(frozenset(int(s) for s in sk) for sk in self.S_k))
        if not self.rows:
            object.__setattr__(self, "rows", tuple(range(1, self.F + 1)))
        if not self.mirror_labels:
            object.__setattr__(self, "mirror_labels", tuple(range(1, self.K1 + 1)))
        if not self.user_labels:
            object.__setattr__(self, "user_labels", tuple(range(1, self.K2 + 1)))

    @property
    def F(self) -> int:
        return self.mirror.shape[0]

    @property
    def K1(self) -> int:
        return self.mirror.shape[1]

    @property
    def K2(self) -> int:
        return self.users.shape[2]

    @property
    def params(self) -> tuple[int, int, int, int, int]:
        return (self.K1, self.K2, self.F, self.Z1, self.Z2)

    def __repr__(self) -> str:
        return f"Hpda(K1={self.K1}, K2={self.K2}, F={self.F}, Z1={self.Z1}, Z2={self.Z2})"

    def flat_users(self) -> np.ndarray:
        """User arrays side by side: an ``F x K1*K2`` array, mirror-major."""
        return np.concatenate(list(self.users), axis=1)

    def server_integers(self) -> list[int]:
        """Integers the server transmits: the union of all S_k minus S_m."""
        return sorted(set().union(*self.S_k) - self.S_m)


def validate_hpda(h: Hpda) -> Report:
    """Check B1 to B4. B2 violations carry the PDA clause, e.g. ``B2/C3b``."""
    report = Report()
    if not (0 <= h.Z1 < h.F and 0 <= h.Z2 < h.F):
        report.add("params", f"need 0 <= Z1, Z2 < F={h.F}, got Z1={h.Z1}, Z2={h.Z2}")

    per_col = h.mirror.sum(axis=0)
    for k1 in np.flatnonzero(per_col != h.Z1):
        report.add("B1", f"mirror column {k1} has {per_col[k1]} stars, expected {h.Z1}", ("mirror", int(k1)))

    for k1 in range(h.K1):
        check_pda_cells(h.users[k1], h.Z2, h.S_k[k1], report, prefix="B2/", where=f"user array {k1}")

    flat = h.flat_users()
    K2 = h.K2
    owners: dict[int, list[tuple[int, int, int]]] = {}
    js, cs = np.nonzero(flat != STAR)
    for j, c in zip(js.tolist(), cs.tolist()):
        owners.setdefault(int(flat[j, c]), []).append((j, c // K2, c % K2))

    for s in sorted(h.S_m):
        cells = owners.get(s, [])
        arrays = sorted({k1 for _, k1, _ in cells})
        if len(arrays) != 1:
            report.add(
                "B3",
                f"integer {s} of S_m occurs in {len(arrays)} user arrays {arrays}, expected exactly one",
                s,
                *[(k1, j, k2) for j, k1, k2 in cells],
            )
        for j, k1, k2 in cells:
            if not h.mirror[j, k1]:
                report.add(
                    "B3",
                    f"integer {s} of S_m at row {j}, user {k2} of array {k1} but mirror {k1} has no star in row {j}",
                    (k1, j, k2),
                    ("mirror", j, k1),
                )

    for s, cells in owners.items():
        if len({k1 for _, k1, _ in cells}) < 2:
            continue
        rows = np.array([c[0] for c in cells])
        k1s = np.array([c[1] for c in cells])
        cols = k1s * K2 + np.array([c[2] for c in cells])
        # cross[b, a] = entry of a's user array, a's user column, b's row
        cross = flat[np.ix_(rows, cols)]
        other = k1s[:, None] != k1s[None, :]
        bad = other & (cross != STAR) & ~h.mirror[rows[:, None], k1s[None, :]]
        for b, a in zip(*np.nonzero(bad)):
            ja, k1a, k2a = cells[a]
            jb, k1b, k2b = cells[b]
            report.add(
                "B4",
                f"integer {s} at (array {k1a}, row {ja}, user {k2a}) and (array {k1b}, row {jb}, user {k2b}):"
                f" array {k1a} has integer {cross[b, a]} at row {jb}, user {k2a} but mirror {k1a} has no star there",
                (k1a, ja, k2a),
                (k1b, jb, k2b),
                (k1a, jb, k2a),
                ("mirror", jb, k1a),
            )
    return report


def _star_rows(d: Design, cp: ConstructionParams, rows) -> np.ndarray:
    """Mirror placement: row X is a star for block A iff X is not inside A."""
    return np.array([[not set(x).issubset(blk) for blk in d.blocks] for x in rows], dtype=bool)


def design_hpda_params(d: Design, cp: ConstructionParams, inner: tuple[int, int] | None = None) -> dict:
    """Closed-form HPDA parameters; ``inner = (Z', S')`` selects the inner-PDA variant."""
    v, k, t, lam = d.v, d.k, d.t, d.lam
    i, j = cp.i, cp.j
    lam_j = Fraction(lam * comb(v - j, t - j), comb(k - j, t - j))
    K1 = int(Fraction(lam * comb(v, t), comb(k, t)))
    K2 = comb(k, j)
    F = comb(v, i)
    Z1 = comb(v, i) - comb(k, i)
    Z2 = comb(k, i) - comb(j, i)
    S = int(comb(v, j - i) * lam_j)
    fresh = Z1 * K2 if inner is None else inner[1]
    return {
        "K1": K1,
        "K2": K2,
        "F": F,
        "Z1": Z1,
        "Z2": Z2 + (0 if inner is None else inner[0]),
        "S": S,
        "S_m_size": K1 * fresh if Z1 else 0,
        "r1": Fraction(S, F),
        "r2_bound": Fraction(int(comb(k, j - i) * lam_j) + fresh, F),
    }


def build_hpda(d: Design, cp: ConstructionParams) -> Hpda:
    """Split the design PDA by block; star rows of each part go to the mirror
    and are refilled with fresh integers, row-major, one range per mirror."""
    return _lift(d, cp, None)


def build_hpda_with_inner(d: Design, cp: ConstructionParams, inner: Pda) -> Hpda:
    """As :func:`build_hpda` but the star rows of each part are overwritten,
    in row order, by a copy of ``inner`` whose integers are shifted per mirror."""
    return _lift(d, cp, inner)


def _lift(d: Design, cp: ConstructionParams, inner: Pda | None) -> Hpda:
    p = build_pda_from_design(d, cp)
    expected = design_hpda_params(d, cp, None if inner is None else (inner.Z, inner.S))
    K1, K2, Z1, S = expected["K1"], expected["K2"], expected["Z1"], expected["S"]
    if inner is not None:
        validate_pda(inner).require("inner PDA")
        if inner.F != Z1 or inner.K != K2:
            raise PreconditionError(
                f"inner PDA must be {Z1} x {K2} (star rows x users per mirror), got {inner.F} x {inner.K}"
            )

    mirror = _star_rows(d, cp, p.rows)
    users = p.cells.reshape(p.F, K1, K2).transpose(1, 0, 2).copy()
    S_m: set[int] = set()
    S_k = []
    for k1 in range(K1):
        star_rows = np.flatnonzero(mirror[:, k1])
        block_part = users[k1]
        if not np.all(block_part[star_rows] == STAR):
            raise ConstructionError(f"mirror {k1}: rows outside its block are not all stars")
        if len(star_rows) != Z1:
            raise ConstructionError(f"mirror {k1} has {len(star_rows)} star rows, expected Z1={Z1}")
        if inner is None:
            base = S + k1 * Z1 * K2
            fresh = base + 1 + np.arange(Z1 * K2, dtype=np.int64).reshape(Z1, K2)
        else:
            shift = S + k1 * inner.S
            fresh = np.where(inner.cells == STAR, STAR, inner.cells + shift)
        if Z1:
            block_part[star_rows] = fresh
            S_m.update(int(x) for x in np.unique(fresh[fresh != STAR]))
        vals = block_part[block_part != STAR]
        S_k.append(frozenset(np.unique(vals).tolist()))

    h = Hpda(
        mirror,
        users,
        Z1=Z1,
        Z2=expected["Z2"],
        S_m=frozenset(S_m),
        S_k=tuple(S_k),
        rows=p.rows,
        mirror_labels=d.blocks,
        user_labels=tuple(c.subset for c in p.cols[:K2]),
        formula=expected,
    )
    _check_lift(h, expected)
    return h


def _check_lift(h: Hpda, expected: dict) -> None:
    got = dict(zip(("K1", "K2", "F", "Z1", "Z2"), h.params))
    for key, val in got.items():
        if val != expected[key]:
            raise ConstructionError(f"HPDA {key}={val} differs from closed form {expected[key]}")
    S = expected["S"]
    if h.S_m != frozenset(range(S + 1, S + 1 + expected["S_m_size"])):
        raise ConstructionError(f"S_m is not the contiguous range after S={S} of size {expected['S_m_size']}")
    if h.server_integers() != list(range(1, S + 1)):
        raise ConstructionError("server integers differ from the source PDA's integer set")
    report = validate_hpda(h)
    if not report.ok:
        raise ConstructionError(f"lifted array is not an HPDA:\n{report}")
    point = hpda_scheme_point(h)
    if point.r1 != expected["r1"] or point.r2 > expected["r2_bound"]:
        raise ConstructionError(
            f"loads (R1={point.r1}, R2={point.r2}) break closed form R1={expected['r1']}, R2 <= {expected['r2_bound']}"
        )


def hpda_scheme_point(h: Hpda, tag: str = "") -> SchemePoint:
    """Memory ratios and loads measured from the realized integer sets."""
    validate_hpda(h).require("HPDA")
    union = set().union(*h.S_k)
    return SchemePoint(
        m1=Fraction(h.Z1, h.F),
        m2=Fraction(h.Z2, h.F),
        r1=Fraction(len(union) - len(h.S_m), h.F),
        r2=max(Fraction(len(sk), h.F) for sk in h.S_k),
        f=h.F,
        tag=tag,
        K1=h.K1,
        K2=h.K2,
    )


def design_hpda_bound(d: Design, cp: ConstructionParams, inner: tuple[int, int] | None = None, tag: str = "") -> SchemePoint:
    """Closed-form operating point with R2 at its stated upper bound."""
    e = design_hpda_params(d, cp, inner)
    return SchemePoint(
        m1=Fraction(e["Z1"], e["F"]),
        m2=Fraction(e["Z2"], e["F"]),
        r1=e["r1"],
        r2=e["r2_bound"],
        f=e["F"],
        tag=tag,
        K1=e["K1"],
        K2=e["K2"],
    )


def subset_point(n: int, k: int, j: int, i: int, inner: tuple[int, int] | None = None, tag: str = "") -> SchemePoint:
    """Closed-form point of the trivial k-(n, k, 1) design without building arrays."""
    from .pda import _check_nkji

    _check_nkji(n, k, j, i)
    # the closed forms only read v, k, t and lambda
    d = _ShapeOnly(v=n, k=k, t=k, lam=1)
    return design_hpda_bound(d, ConstructionParams(i, j), inner, tag or f"subsets(n={n},k={k},j={j},i={i})")


@dataclass(frozen=True)
class _ShapeOnly:
    v: int
    k: int
    t: int
    lam: int
