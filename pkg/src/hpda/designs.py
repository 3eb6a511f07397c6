"""Combinatorial t-(v, k, lambda) designs and a small catalog of them.

Points are the integers ``1..v``. Every block is a sorted tuple. The order of
``blocks`` matters: downstream constructions use it as the column order.
"""
from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from pathlib import Path

from .errors import ParameterError, PreconditionError, Report


@dataclass(frozen=True)
class Design:
    points: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]
    t: int
    lam: int

    @property
    def v(self) -> int:
        return len(self.points)

    @property
    def k(self) -> int:
        return len(self.blocks[0]) if self.blocks else 0

    @property
    def b(self) -> int:
        return len(self.blocks)

    def __str__(self) -> str:
        return f"{self.t}-({self.v},{self.k},{self.lam}) design with {self.b} blocks"

    @classmethod
    def from_blocks(cls, v: int, blocks, t: int, lam: int, *, validate: bool = True) -> "Design":
        """Build from external input; validated eagerly unless told otherwise."""
        d = cls(
            points=tuple(range(1, v + 1)),
            blocks=tuple(tuple(sorted(int(p) for p in blk)) for blk in blocks),
            t=int(t),
            lam=int(lam),
        )
        if validate:
            validate_design(d).require("design")
        return d


def validate_design(d: Design) -> Report:
    report = Report()
    pts = set(d.points)
    if not d.blocks:
        report.add("blocks", "design has no blocks")
        return report
    k = d.k
    for idx, blk in enumerate(d.blocks):
        if len(blk) != k:
            report.add("block-size", f"block #{idx + 1} {_fmt(blk)} has size {len(blk)}, expected {k}", idx, blk)
        if len(set(blk)) != len(blk):
            report.add("block-size", f"block #{idx + 1} {_fmt(blk)} repeats a point", idx, blk)
        stray = set(blk) - pts
        if stray:
            report.add("block-subset", f"block #{idx + 1} has points {sorted(stray)} outside 1..{d.v}", idx, blk)
    # v == k is the single-block degenerate design that the all-subsets
    # constructions with k == n rely on, so only v >= k is enforced.
    if not (d.v >= k >= d.t >= 1):
        report.add("ordering", f"need v >= k >= t >= 1, got v={d.v}, k={k}, t={d.t}")
    if d.lam < 1:
        report.add("ordering", f"lambda must be positive, got {d.lam}")
    if report.ok:
        counts = _subset_counts(d.blocks, d.t)
        for sub in combinations(d.points, d.t):
            c = counts.get(sub, 0)
            if c != d.lam:
                report.add(
                    "balance",
                    f"{d.t}-subset {_fmt(sub)} is covered {c} times, expected {d.lam}",
                    sub,
                    c,
                )
    return report


def lambda_s(d: Design, s: int) -> int:
    """Number of blocks containing any fixed ``s``-subset of points (s <= t)."""
    if s < 0 or s > d.t:
        raise ParameterError(f"need 0 <= s <= t={d.t}, got s={s}")
    value = Fraction(d.lam * comb(d.v - s, d.t - s), comb(d.k - s, d.t - s))
    if value.denominator != 1:
        raise PreconditionError(f"lambda_{s} = {value} is not an integer; parameters admit no design")
    return int(value)


def count_blocks_containing(d: Design, subset) -> int:
    sub = set(subset)
    return sum(1 for blk in d.blocks if sub.issubset(blk))


def trivial_design(n: int, k: int) -> Design:
    """All k-subsets of [n], in lexicographic order: a k-(n, k, 1) design.

    ``n == k`` gives the single-block design used by the k == n special cases.
    """
    if not (1 <= k <= n):
        raise ParameterError(f"need 1 <= k <= n, got n={n}, k={k}")
    return Design(tuple(range(1, n + 1)), tuple(combinations(range(1, n + 1), k)), t=k, lam=1)


def _fano() -> Design:
    blocks = ["127", "145", "136", "467", "256", "357", "234"]
    return Design.from_blocks(7, [[int(c) for c in b] for b in blocks], t=2, lam=1, validate=False)


def _steiner_3_8_4() -> Design:
    # Blocks of the affine geometry AG(3,2): label 1..8 <-> F_2^3 vectors 0..7,
    # a 4-set is a block iff its vectors XOR to zero.
    blocks = [
        tuple(x + 1 for x in q)
        for q in combinations(range(8), 4)
        if q[0] ^ q[1] ^ q[2] ^ q[3] == 0
    ]
    return Design.from_blocks(8, blocks, t=3, lam=1, validate=False)


def _affine_2_9_3() -> Design:
    # Lines of AG(2,3); point (x, y) -> 3x + y + 1.
    lines = set()
    for a in range(3):
        for b in range(3):
            for dx, dy in ((0, 1), (1, 0), (1, 1), (1, 2)):
                line = frozenset(3 * ((a + s * dx) % 3) + (b + s * dy) % 3 + 1 for s in range(3))
                lines.add(tuple(sorted(line)))
    return Design.from_blocks(9, sorted(lines), t=2, lam=1, validate=False)


_CATALOG = {
    "fano-7-3-1": _fano,
    "steiner-3-8-4-1": _steiner_3_8_4,
    "affine-2-9-3-1": _affine_2_9_3,
}
_TRIVIAL = re.compile(r"trivial-(\d+)-(\d+)$")


def catalog_names() -> list[str]:
    return list(_CATALOG) + ["trivial-<n>-<k>"]


def builtin_design(name: str) -> Design:
    """Look up a catalog design; ``trivial-<n>-<k>`` names any trivial design."""
    if name in _CATALOG:
        return _CATALOG[name]()
    m = _TRIVIAL.match(name)
    if m:
        return trivial_design(int(m.group(1)), int(m.group(2)))
    raise KeyError(f"unknown design {name!r}; known: {', '.join(catalog_names())}")


def design_to_json(d: Design) -> dict:
    return {"v": d.v, "k": d.k, "t": d.t, "lambda": d.lam, "blocks": [list(b) for b in d.blocks]}


def design_from_json(obj: dict) -> Design:
    try:
        d = Design.from_blocks(obj["v"], obj["blocks"], obj["t"], obj["lambda"], validate=False)
    except KeyError as exc:
        raise PreconditionError(f"design JSON is missing field {exc}") from None
    if d.k != obj["k"]:
        raise PreconditionError(f"design JSON declares k={obj['k']} but blocks have size {d.k}")
    validate_design(d).require("design")
    return d


def load_design(source: str) -> Design:
    """Resolve a catalog name or a path to a JSON design file."""
    path = Path(source)
    if path.suffix == ".json" or path.exists():
        return design_from_json(json.loads(path.read_text()))
    return builtin_design(source)


def _subset_counts(blocks, s: int) -> Counter:
    counts: Counter = Counter()
    for blk in blocks:
        counts.update(combinations(blk, s))
    return counts


def _fmt(subset) -> str:
    return "{" + ",".join(str(x) for x in subset) + "}"
