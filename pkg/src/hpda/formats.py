"""CSV and JSON serialization of PDAs, HPDAs and designs.

Stars are written as ``"*"``, null mirror cells as ``"-"``. Row and column
labels are kept as strings after import so that export -> import -> export is
byte-identical.
"""
from __future__ import annotations

import csv
import io
import json
import re
from pathlib import Path

import numpy as np

from .designs import design_from_json, design_to_json
from .errors import PreconditionError
from .hpda import Hpda
from .pda import STAR, Pda, _word

_PDA_TAG = re.compile(r"^PDA\((\d+),(\d+),(\d+),(\d+)\)$")


def label(x) -> str:
    if isinstance(x, tuple):
        return _word(x)
    return str(x)


def _cell(c: int) -> str:
    return "*" if c == STAR else str(int(c))


def _parse_cell(s, where: str) -> int:
    if isinstance(s, int) and not isinstance(s, bool):
        if s < 1:
            raise PreconditionError(f"{where}: integers must be positive, got {s}")
        return s
    s = str(s).strip()
    if s == "*":
        return STAR
    if s.isdigit() and int(s) > 0:
        return int(s)
    raise PreconditionError(f"{where}: cell {s!r} is neither '*' nor a positive integer")


# ---- PDA


def pda_to_csv(p: Pda) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    K, F, Z, S = p.params
    w.writerow([f"PDA({K},{F},{Z},{S})"] + [label(c) for c in p.cols])
    for lab, row in zip(p.rows, p.cells):
        w.writerow([label(lab)] + [_cell(c) for c in row])
    return buf.getvalue()


def pda_from_csv(text: str) -> Pda:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise PreconditionError("empty PDA CSV")
    head = rows[0]
    m = _PDA_TAG.match(head[0].strip()) if head else None
    if not m:
        raise PreconditionError(f"first header cell must read PDA(K,F,Z,S), got {head[0] if head else ''!r}")
    K, F, Z, S = map(int, m.groups())
    body = rows[1:]
    if len(head) - 1 != K or len(body) != F:
        raise PreconditionError(f"header declares K={K}, F={F} but the file has {len(head) - 1} columns, {len(body)} rows")
    cells = []
    for r, row in enumerate(body, start=1):
        if len(row) != K + 1:
            raise PreconditionError(f"row {r} has {len(row) - 1} cells, expected {K}")
        cells.append([_parse_cell(c, f"row {r}, column {k}") for k, c in enumerate(row[1:], start=1)])
    return Pda(
        np.array(cells, dtype=np.int64).reshape(F, K),
        Z=Z,
        S=S,
        rows=tuple(row[0] for row in body),
        cols=tuple(head[1:]),
    )


def pda_to_json(p: Pda) -> dict:
    K, F, Z, S = p.params
    return {
        "K": K,
        "F": F,
        "Z": Z,
        "S": S,
        "rows": [label(x) for x in p.rows],
        "cols": [label(x) for x in p.cols],
        "cells": [[_cell(c) if c == STAR else int(c) for c in row] for row in p.cells],
    }


def pda_from_json(obj: dict) -> Pda:
    try:
        K, F, Z, S = obj["K"], obj["F"], obj["Z"], obj["S"]
        raw = obj["cells"]
    except KeyError as exc:
        raise PreconditionError(f"PDA JSON is missing field {exc}") from None
    cells = np.array(
        [[_parse_cell(c, f"row {r}, column {k}") for k, c in enumerate(row, start=1)] for r, row in enumerate(raw, start=1)],
        dtype=np.int64,
    ).reshape(len(raw), -1 if raw else 0)
    if cells.shape != (F, K):
        raise PreconditionError(f"declared F x K = {F} x {K} but cells are {cells.shape[0]} x {cells.shape[1]}")
    return Pda(cells, Z=Z, S=S, rows=tuple(obj.get("rows", ())), cols=tuple(obj.get("cols", ())))


# ---- HPDA


def hpda_to_json(h: Hpda) -> dict:
    return {
        "K1": h.K1,
        "K2": h.K2,
        "F": h.F,
        "Z1": h.Z1,
        "Z2": h.Z2,
        "rows": [label(x) for x in h.rows],
        "mirror_labels": [label(x) for x in h.mirror_labels],
        "user_labels": [label(x) for x in h.user_labels],
        "mirror": [["*" if c else "-" for c in row] for row in h.mirror],
        "users": [[[_cell(c) if c == STAR else int(c) for c in row] for row in arr] for arr in h.users],
        "S_m": sorted(h.S_m),
        "S": [sorted(sk) for sk in h.S_k],
    }


def hpda_from_json(obj: dict) -> Hpda:
    try:
        K1, K2, F = obj["K1"], obj["K2"], obj["F"]
        mirror_raw, users_raw = obj["mirror"], obj["users"]
        S_m, S_k = obj["S_m"], obj["S"]
        Z1, Z2 = obj["Z1"], obj["Z2"]
    except KeyError as exc:
        raise PreconditionError(f"HPDA JSON is missing field {exc}") from None
    mirror = []
    for r, row in enumerate(mirror_raw, start=1):
        out = []
        for k, c in enumerate(row, start=1):
            if c not in ("*", "-"):
                raise PreconditionError(f"mirror row {r}, column {k}: cell {c!r} must be '*' or '-'")
            out.append(c == "*")
        mirror.append(out)
    users = [
        [[_parse_cell(c, f"user array {a}, row {r}, column {k}") for k, c in enumerate(row, start=1)] for r, row in enumerate(arr, start=1)]
        for a, arr in enumerate(users_raw, start=1)
    ]
    mirror_arr = np.array(mirror, dtype=bool).reshape(len(mirror), -1 if mirror else 0)
    users_arr = np.array(users, dtype=np.int64)
    if mirror_arr.shape != (F, K1) or users_arr.shape != (K1, F, K2):
        raise PreconditionError(
            f"declared K1={K1}, K2={K2}, F={F} but mirror is {mirror_arr.shape} and user arrays are {users_arr.shape}"
        )
    return Hpda(
        mirror_arr,
        users_arr,
        Z1=Z1,
        Z2=Z2,
        S_m=frozenset(S_m),
        S_k=tuple(frozenset(s) for s in S_k),
        rows=tuple(obj.get("rows", ())),
        mirror_labels=tuple(obj.get("mirror_labels", ())),
        user_labels=tuple(obj.get("user_labels", ())),
    )


# ---- text layout


def dumps(obj: dict) -> str:
    """JSON with one top-level key per line and one array row per line."""
    lines = []
    items = list(obj.items())
    for n, (key, val) in enumerate(items):
        comma = "," if n < len(items) - 1 else ""
        if isinstance(val, list) and val and isinstance(val[0], list):
            inner = _rows(val, "  ")
            lines.append(f"  {json.dumps(key)}: [\n{inner}\n  ]{comma}")
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(val, separators=(',', ':'))}{comma}")
    return "{\n" + "\n".join(lines) + "\n}\n"


def _rows(val: list, indent: str) -> str:
    out = []
    for n, row in enumerate(val):
        comma = "," if n < len(val) - 1 else ""
        if row and isinstance(row[0], list):
            out.append(f"{indent}  [\n{_rows(row, indent + '  ')}\n{indent}  ]{comma}")
        else:
            out.append(f"{indent}  {json.dumps(row, separators=(',', ':'))}{comma}")
    return "\n".join(out)


def write_pda(p: Pda, path: str | Path) -> None:
    path = Path(path)
    text = dumps(pda_to_json(p)) if path.suffix == ".json" else pda_to_csv(p)
    path.write_text(text)


def read_pda(path: str | Path) -> Pda:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return pda_from_json(json.loads(text))
    return pda_from_csv(text)


def write_hpda(h: Hpda, path: str | Path) -> None:
    Path(path).write_text(dumps(hpda_to_json(h)))


def read_hpda(path: str | Path) -> Hpda:
    return hpda_from_json(json.loads(Path(path).read_text()))


def write_design(d, path: str | Path) -> None:
    Path(path).write_text(dumps(design_to_json(d)))


def read_design(path: str | Path):
    return design_from_json(json.loads(Path(path).read_text()))
