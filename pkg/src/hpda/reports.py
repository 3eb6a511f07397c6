"""Table and figure data: exact values computed from builds and calculators,
written as CSV, with PNG plots for the figure data sets."""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from math import comb
from pathlib import Path

from . import baselines as bl
from .designs import builtin_design, trivial_design
from .geometry import AchievablePoint, Envelope, convexity_report, share3, square_grid, trivial_points
from .hpda import build_hpda, build_hpda_with_inner, hpda_scheme_point, design_hpda_bound
from .pda import ConstructionParams, subset_pda_params
from .points import SchemePoint
from .samples import inner_pda_5x5

# ---- number rendering


def q(x) -> str:
    """Exact rendering: integers as-is, fractions as p/q."""
    if x is None:
        return ""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def dec(x, digits: int = 5) -> str:
    if x is None:
        return ""
    return f"{float(Fraction(x)):.{digits}g}"


def sci(n) -> str:
    if n is None:
        return ""
    return f"{Decimal(int(n)):.4E}"


def log10_int(n: int) -> float:
    n = int(n)
    digits = len(str(n))
    if digits <= 300:
        return math.log10(n)
    return math.log10(int(str(n)[:17])) + digits - 17


@dataclass
class Table:
    name: str
    columns: list
    rows: list = field(default_factory=list)  # dicts keyed by column name

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.columns, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for row in self.rows:
            w.writerow({k: row.get(k, "") for k in self.columns})
        return buf.getvalue()

    def write(self, outdir: Path) -> Path:
        outdir.mkdir(parents=True, exist_ok=True)
        path = outdir / f"{self.name}.csv"
        path.write_text(self.to_csv())
        return path


def _point_cols(p: SchemePoint, prefix: str = "") -> dict:
    return {
        "K1": p.K1,
        "K2": p.K2,
        "M1/N": q(p.m1),
        "M2/N": q(p.m2),
        "F": "" if p.f is None else str(p.f),
        "F_sci": sci(p.f),
        "R1": q(p.r1),
        "R1_dec": dec(p.r1),
        "R2": q(p.r2),
        "R2_dec": dec(p.r2),
        "T": q(p.t_seq),
        "T_dec": dec(p.t_seq),
    }


POINT_COLS = ["K1", "K2", "M1/N", "M2/N", "F", "F_sci", "R1", "R1_dec", "R2", "R2_dec", "T", "T_dec"]


# ---- proposed-scheme builds


@dataclass(frozen=True)
class BuiltPoint:
    bound: SchemePoint  # closed form, R2 at its upper bound
    measured: SchemePoint  # counted on the realized arrays
    seconds: float


def built_point(design_name: str, i: int, j: int, inner_z: int | None = None) -> BuiltPoint:
    t0 = time.perf_counter()
    d = builtin_design(design_name)
    cp = ConstructionParams(i, j)
    if inner_z is None:
        h = build_hpda(d, cp)
        bound = design_hpda_bound(d, cp)
    else:
        inner = inner_pda_5x5(inner_z)
        h = build_hpda_with_inner(d, cp, inner)
        bound = design_hpda_bound(d, cp, (inner.Z, inner.S))
    measured = hpda_scheme_point(h)
    return BuiltPoint(bound, measured, time.perf_counter() - t0)


def subset_built(n: int, k: int, j: int, i: int) -> BuiltPoint:
    return built_point(f"trivial-{n}-{k}", i, j)


# ---- tables


def table1() -> Table:
    """Six mirrors of five users each; the star rows of every user array are
    refilled with a 5 x 5 inner PDA with Z' stars per column."""
    t = Table("table1", ["inner", "M1/N", "M2/N", "F", "R1", "R2", "R2_dec", "R2_measured", "R2_measured_dec"])
    for z in (1, 2, 3, 4):
        inner = inner_pda_5x5(z)
        b = built_point("trivial-6-5", 2, 4, z)
        t.rows.append(
            {
                "inner": f"({inner.K},{inner.F},{inner.Z},{inner.S})",
                "M1/N": q(b.bound.m1),
                "M2/N": q(b.bound.m2),
                "F": b.bound.f,
                "R1": q(b.bound.r1),
                "R2": q(b.bound.r2),
                "R2_dec": dec(b.bound.r2),
                "R2_measured": q(b.measured.r2),
                "R2_measured_dec": dec(b.measured.r2),
            }
        )
    return t


def table2_points(n: int = 10, k: int = 9, j: int = 7, build: bool = True) -> list[tuple[int, SchemePoint, SchemePoint | None]]:
    from .hpda import subset_point

    out = []
    for i in range(1, j + 1):
        if build:
            b = subset_built(n, k, j, i)
            out.append((i, b.bound, b.measured))
        else:
            out.append((i, subset_point(n, k, j, i), None))
    return out


def table2(n: int = 10, k: int = 9, j: int = 7, build: bool = True) -> Table:
    t = Table("table2", ["i", "F", "M1/N", "M2/N", "R1", "R1_dec", "R2", "R2_dec", "T", "T_dec", "R2_measured", "R2_measured_dec"])
    for i, p, m in table2_points(n, k, j, build):
        row = _point_cols(p)
        row["i"] = i
        if m is not None:
            row["R2_measured"] = q(m.r2)
            row["R2_measured_dec"] = dec(m.r2)
        t.rows.append(row)
    return t


ROW_COLS = ["row", "scheme", "parameters"] + POINT_COLS + ["R2_measured", "note"]


def _proposed_row(n, label, params, built: BuiltPoint, note: str = "") -> dict:
    row = _point_cols(built.bound)
    row.update(row=n, scheme="proposed", parameters=params, R2_measured=q(built.measured.r2), note=note)
    return row


def _row(n, scheme, params, p: SchemePoint, note: str = "") -> dict:
    row = _point_cols(p)
    row.update(row=n, scheme=scheme, parameters=params, note=note)
    return row


def table3() -> Table:
    t = Table("table3", ROW_COLS)
    K1, K2 = 14, 4
    m1, m2 = Fraction(11, 14), Fraction(3, 28)
    t.rows.append(_proposed_row(1, "proposed", "steiner-3-8-4-1 j=3 i=2", built_point("steiner-3-8-4-1", 2, 3)))
    t.rows += _knmd_rows(2, K1, K2, m1, m2)

    K1, K2 = 7, 6
    m1 = m2 = Fraction(1, 7)
    t.rows.append(_proposed_row(5, "proposed", "n=7 k=6 j=5 i=1", subset_built(7, 6, 5, 1)))
    t.rows += _knmd_rows(6, K1, K2, m1, m2)

    N = 42
    p1, p2 = trivial_points(K2, N)[1], subset_built(7, 6, 5, 1)
    p3 = subset_built(7, 6, 5, 2)
    shared = share3(
        p1,
        AchievablePoint.from_scheme(p2.bound),
        AchievablePoint.from_scheme(p3.bound),
        Fraction(3, 5),
        Fraction(3, 10),
    )
    sp = SchemePoint(shared.m1, shared.m2, shared.r1, shared.r2, max(p2.bound.f, p3.bound.f), "shared", K1, K2)
    t.rows.append(
        _row(
            9,
            "proposed + sharing",
            "weights 3/5, 3/10, 1/10 on (0,0,N,K2), i=1, i=2",
            sp,
            "F is the largest constituent subpacketization",
        )
    )
    t.rows += _knmd_rows(10, K1, K2, shared.m1, shared.m2)
    return t


def _knmd_rows(start: int, K1: int, K2: int, m1: Fraction, m2: Fraction) -> list[dict]:
    a, b = bl.knmd_optimal_ab(K1, K2, m1, m2, 1)
    res = bl.knmd_detail(K1, K2, m1, m2, a, b)
    return [
        _row(start, "KNMD", f"alpha={a} beta={b}", res.point, "; ".join(res.notes)),
        _row(start + 1, "scheme A", "alpha=1 beta=1", bl.scheme_a_point(K1, K2, m1, m2)),
        _row(start + 2, "scheme B", "alpha=0 beta=0", bl.scheme_b_point(K1, K2, m1, m2)),
    ]


TABLE4_PRODUCTS = {
    2: ((14, 2, 1, 7), (6, 4, 1, 11)),
    4: ((28, 4, 1, 42), (15, 2, 1, 8)),
    6: ((84, 3, 1, 84), (20, 3, 1, 21)),
    8: ((8, 2, 1, 4), (35, 35, 17, 210)),
    9: ((8, 70, 35, 56), (35, 35, 17, 210)),
    11: ((8, 70, 35, 56), (7, 21, 6, 35)),
    12: ((8, 8, 4, 8), (7, 21, 6, 35)),
}


def table4() -> Table:
    t = Table("table4", ROW_COLS)
    proposed = {
        1: ("steiner-3-8-4-1 j=2 i=1", lambda: built_point("steiner-3-8-4-1", 1, 2)),
        3: ("n=8 k=6 j=2 i=1", lambda: subset_built(8, 6, 2, 1)),
        5: ("n=9 k=6 j=3 i=1", lambda: subset_built(9, 6, 3, 1)),
        7: ("n=8 k=7 j=4 i=4", lambda: subset_built(8, 7, 4, 4)),
        10: ("n=8 k=7 j=6 i=4", lambda: subset_built(8, 7, 6, 4)),
    }
    for n in range(1, 13):
        if n in proposed:
            label, make = proposed[n]
            t.rows.append(_proposed_row(n, "proposed", label, make()))
        else:
            a, b = TABLE4_PRODUCTS[n]
            t.rows.append(_row(n, "product PDA", f"A={a} B={b}", bl.kywm_scheme2_point(a, b)))
    return t


def table5(qv: int, build: bool | None = None) -> Table:
    """Closed forms next to direct evaluation; ``build`` adds the measured
    proposed row (default: when q <= 3)."""
    cols = ["q", "scheme", "F", "F_sci", "R1", "R1_dec", "R2", "R2_dec", "T", "T_dec", "direct_F", "direct_R1", "direct_R2", "direct_T", "agree", "note"]
    t = Table(f"table5_q{qv}", cols)
    for cf, dr in zip(bl.table5_closed_forms(qv), bl.table5_direct(qv)):
        agree = "" if dr.f is None else str((cf.f, cf.r1, cf.r2, cf.t) == (dr.f, dr.r1, dr.r2, dr.t))
        note = "; ".join(x for x in (cf.note, dr.note) if x)
        t.rows.append(
            {
                "q": qv,
                "scheme": cf.scheme,
                "F": str(cf.f),
                "F_sci": sci(cf.f),
                "R1": q(cf.r1),
                "R1_dec": dec(cf.r1),
                "R2": q(cf.r2),
                "R2_dec": dec(cf.r2),
                "T": q(cf.t),
                "T_dec": dec(cf.t),
                "direct_F": "" if dr.f is None else str(dr.f),
                "direct_R1": q(dr.r1),
                "direct_R2": q(dr.r2),
                "direct_T": q(dr.t),
                "agree": agree,
                "note": note,
            }
        )
    if build is None:
        build = qv <= 3
    if build:
        b = subset_built(qv * qv, qv * qv - 1, qv * qv - 2, qv)
        m = b.measured
        t.rows.append(
            {
                "q": qv,
                "scheme": "proposed (built, measured)",
                "F": str(m.f),
                "F_sci": sci(m.f),
                "R1": q(m.r1),
                "R1_dec": dec(m.r1),
                "R2": q(m.r2),
                "R2_dec": dec(m.r2),
                "T": q(m.t_seq),
                "T_dec": dec(m.t_seq),
            }
        )
    return t


# ---- figure data


def fig6_points(n: int = 10, k: int = 9, j: int = 7, N: int | None = None) -> list[AchievablePoint]:
    from .hpda import subset_point

    pts = [AchievablePoint.from_scheme(subset_point(n, k, j, i), f"i={i}") for i in range(1, j + 1)]
    K1 = comb(n, k)
    K2 = comb(k, j)
    return pts + list(trivial_points(K2, K1 * K2 if N is None else N))


def fig6(n: int = 10, k: int = 9, j: int = 7, step=Fraction(1, 20), N: int | None = None) -> tuple[Table, Table]:
    pts = fig6_points(n, k, j, N)
    env = Envelope(pts)
    pt_table = Table("fig6_points", ["source", "M1/N", "M2/N", "R1", "R2", "T", "T_dec", "on_envelope"])
    for p, e in zip(pts, convexity_report(pts)):
        pt_table.rows.append(
            {
                "source": p.source,
                "M1/N": q(p.m1),
                "M2/N": q(p.m2),
                "R1": q(p.r1),
                "R2": q(p.r2),
                "T": q(p.t_seq),
                "T_dec": dec(p.t_seq),
                "on_envelope": e.on_envelope,
            }
        )
    grid = Table("fig6_envelope", ["M1/N", "M2/N", "feasible", "T", "T_dec", "support"])
    for x, y in square_grid(step):
        v = env.query(x, y)
        grid.rows.append(
            {
                "M1/N": q(x),
                "M2/N": q(y),
                "feasible": v.feasible,
                "T": q(v.t),
                "T_dec": dec(v.t),
                "support": v.support_str(pts) if v.feasible else "",
            }
        )
    return pt_table, grid


@dataclass(frozen=True)
class FamilyPoint:
    scheme: str
    params: str
    K: int
    F: int
    Z: int
    S: int

    @property
    def m(self) -> Fraction:
        return Fraction(self.Z, self.F)

    @property
    def r(self) -> Fraction:
        return Fraction(self.S, self.F)


def pda_families(n: int = 12) -> list[FamilyPoint]:
    """Single-layer families compared at K = n(n-1) users."""
    out = []
    for i in range(1, n - 1):
        c = subset_pda_params(n, n - 1, n - 2, i)
        out.append(FamilyPoint("proposed", f"n={n} k={n - 1} j={n - 2} i={i}", c["K"], c["F"], c["Z"], c["S"]))
    K = n * (n - 1)
    for t in range(0, K + 1):
        F = comb(K, t)
        # t = K is the all-star array; keep it as the full-memory end point
        out.append(FamilyPoint("MAN", f"t={t}", K, F, comb(K - 1, t - 1) if t else 0, comb(K, t + 1) if t < K else 0))
    a = tt = 1
    for b in range(2, n):
        out.append(
            FamilyPoint(
                "JeQi",
                f"a=1 b={b} t=1",
                comb(n, a + tt) * comb(a + tt, a),
                comb(n, b - tt),
                comb(n, b - tt) - comb(n - a - tt, b - tt),
                comb(n, a + b) * comb(a + b, b),
            )
        )
    for b in range(2, n - 1):
        out.append(
            FamilyPoint(
                "ZCJ",
                f"a=1 b={b} t=1",
                comb(n, a + tt) * comb(a + tt, a),
                comb(n, a + b),
                comb(n, a + b) - comb(n - a - tt, b - tt),
                comb(n, b) * comb(b, b - tt),
            )
        )
    m, t2, w = n, 2, 1
    for s in range(2, n):
        out.append(
            FamilyPoint(
                "MWZW",
                f"m={m} s={s} t=2 w=1",
                comb(t2, w) * comb(m, t2),
                comb(m, s),
                comb(m, s) - comb(m - t2, s - w),
                comb(m, s + t2 - 2 * w),
            )
        )
    return out


def matched_comparisons(n: int = 12) -> list[dict]:
    """For each competing family point, the smallest S among all-subsets PDAs
    of the trivial n-point designs with identical (K, F, Z)."""
    best: dict[tuple[int, int, int], tuple[int, str]] = {}
    for k in range(1, n + 1):
        for j in range(1, k + 1):
            for i in range(1, j + 1):
                c = subset_pda_params(n, k, j, i)
                key = (c["K"], c["F"], c["Z"])
                if key not in best or c["S"] < best[key][0]:
                    best[key] = (c["S"], f"n={n} k={k} j={j} i={i}")
    out = []
    for p in pda_families(n):
        if p.scheme in ("proposed", "MAN"):
            continue
        hit = best.get((p.K, p.F, p.Z))
        if hit:
            out.append({"scheme": p.scheme, "params": p.params, "K": p.K, "F": p.F, "Z": p.Z, "S": p.S, "proposed": hit[1], "proposed_S": hit[0]})
    return out


def fig7(n: int = 12) -> tuple[Table, Table]:
    t = Table("fig7", ["scheme", "params", "K", "F", "Z", "S", "M/N", "M/N_dec", "R", "R_dec"])
    for p in pda_families(n):
        t.rows.append(
            {"scheme": p.scheme, "params": p.params, "K": p.K, "F": p.F, "Z": p.Z, "S": p.S, "M/N": q(p.m), "M/N_dec": dec(p.m), "R": q(p.r), "R_dec": dec(p.r)}
        )
    m = Table("fig7_matched", ["scheme", "params", "K", "F", "Z", "S", "proposed", "proposed_S"])
    m.rows = matched_comparisons(n)
    return t, m


def fig8(n: int = 12) -> Table:
    t = Table("fig8", ["scheme", "params", "K", "M/N", "M/N_dec", "F", "F_sci", "log10_F"])
    for p in pda_families(n):
        t.rows.append(
            {"scheme": p.scheme, "params": p.params, "K": p.K, "M/N": q(p.m), "M/N_dec": dec(p.m), "F": str(p.F), "F_sci": sci(p.F), "log10_F": f"{log10_int(p.F):.4f}"}
        )
    return t


# ---- plots


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _by_scheme(points: list[FamilyPoint]) -> dict[str, list[FamilyPoint]]:
    out: dict[str, list[FamilyPoint]] = {}
    for p in points:
        out.setdefault(p.scheme, []).append(p)
    return {k: sorted(v, key=lambda p: p.m) for k, v in out.items()}


def plot_fig6(points: Table, grid: Table, path: Path) -> Path:
    import numpy as np

    plt = _pyplot()
    xs = sorted({Fraction(r["M1/N"]) for r in grid.rows})
    ys = sorted({Fraction(r["M2/N"]) for r in grid.rows})
    z = np.full((len(ys), len(xs)), np.nan)
    for r in grid.rows:
        if r["feasible"]:
            z[ys.index(Fraction(r["M2/N"])), xs.index(Fraction(r["M1/N"]))] = float(Fraction(r["T"]))
    fig, ax = plt.subplots(figsize=(6, 5))
    mesh = ax.pcolormesh([float(x) for x in xs], [float(y) for y in ys], np.log10(1 + z), shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="log10(1 + T)")
    for r in points.rows:
        ax.plot(float(Fraction(r["M1/N"])), float(Fraction(r["M2/N"])), "o", color="red", ms=4)
        ax.annotate(r["source"], (float(Fraction(r["M1/N"])), float(Fraction(r["M2/N"]))), fontsize=7, color="white")
    ax.set_xlabel("M1/N")
    ax.set_ylabel("M2/N")
    ax.set_title("lower envelope of T = R1 + R2")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_family(n: int, path: Path, what: str) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for scheme, pts in _by_scheme(pda_families(n)).items():
        xs = [float(p.m) for p in pts]
        ys = [float(p.r) if what == "load" else log10_int(p.F) for p in pts]
        ax.plot(xs, ys, marker="." if scheme == "MAN" else "o", ms=3 if scheme == "MAN" else 4, label=scheme)
    ax.set_xlabel("M/N")
    if what == "load":
        ax.set_yscale("symlog", linthresh=1)
        ax.set_ylabel("load R")
    else:
        ax.set_ylabel("log10 F")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def emit_figure_data(which: str, outdir: Path, *, n: int | None = None, k: int = 9, j: int = 7, step=Fraction(1, 20), plot: bool = True) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    paths: list[Path] = []
    if which == "fig6":
        pts, grid = fig6(10 if n is None else n, k, j, step)
        paths += [pts.write(outdir), grid.write(outdir)]
        if plot:
            paths.append(plot_fig6(pts, grid, outdir / "fig6.png"))
    elif which == "fig7":
        data, matched = fig7(12 if n is None else n)
        paths += [data.write(outdir), matched.write(outdir)]
        if plot:
            paths.append(plot_family(12 if n is None else n, outdir / "fig7.png", "load"))
    elif which == "fig8":
        paths.append(fig8(12 if n is None else n).write(outdir))
        if plot:
            paths.append(plot_family(12 if n is None else n, outdir / "fig8.png", "subpacketization"))
    else:
        raise KeyError(f"unknown figure {which!r}; choose fig6, fig7 or fig8")
    return paths
