"""Command-line entry point: ``hpda <command> ...``.

Every run prints its resolved configuration as one JSON line on stderr.
Output files go to ``-o``/``--out`` or, for multi-file commands, to the
directory named by ``HPDA_OUT_DIR`` (default ``./hpda-out``).
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import baselines as bl
from . import formats, reports
from .designs import catalog_names, design_to_json, load_design, validate_design
from .errors import ConstructionError, ParameterError, PreconditionError
from .geometry import AchievablePoint, Envelope, square_grid
from .hpda import build_hpda, build_hpda_with_inner, hpda_scheme_point, validate_hpda
from .pda import ConstructionParams, build_pda_from_design, pda_scheme_point, transpose_pda, validate_pda
from .points import frac
from .simulate import DEFAULT_SEED, simulate

OUT_ENV = "HPDA_OUT_DIR"


def _out_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV, "hpda-out"))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, default=str) + "\n"


def _report_exit(report, what: str) -> int:
    print(f"{what}: {'ok' if report.ok else 'INVALID'}")
    if not report.ok:
        print(report)
        return 1
    return 0


# ---- design


def cmd_design(args) -> int:
    if args.action == "list":
        for name in catalog_names():
            print(name)
        return 0
    d = load_design(args.source)
    report = validate_design(d)
    print(json.dumps({k: v for k, v in design_to_json(d).items() if k != "blocks"} | {"b": d.b}))
    return _report_exit(report, "design")


# ---- pda


def cmd_pda(args) -> int:
    if args.action == "build":
        p = build_pda_from_design(load_design(args.design), ConstructionParams(args.i, args.j))
        _write_pda(p, args.out)
        return 0
    p = formats.read_pda(args.file)
    if args.action == "validate":
        return _report_exit(validate_pda(p), f"PDA{p.params}")
    if args.action == "transpose":
        _write_pda(transpose_pda(p), args.out)
        return 0
    pt = pda_scheme_point(p)
    print(_json({"K": pt.K, "F": pt.f, "M/N": str(pt.m), "R": str(pt.r), "R_dec": float(pt.r)}), end="")
    return 0


def _write_pda(p, out: str | None) -> None:
    if out:
        formats.write_pda(p, out)
        print(f"wrote {out} PDA{p.params}")
    else:
        sys.stdout.write(formats.pda_to_csv(p))


# ---- hpda


def cmd_hpda(args) -> int:
    if args.action == "build":
        d = load_design(args.design)
        cp = ConstructionParams(args.i, args.j)
        h = build_hpda(d, cp) if args.inner is None else build_hpda_with_inner(d, cp, formats.read_pda(args.inner))
        _emit(formats.dumps(formats.hpda_to_json(h)), args.out)
        return 0
    if args.action == "sample":
        from .samples import three_mirror_hpda

        _emit(formats.dumps(formats.hpda_to_json(three_mirror_hpda())), args.out)
        return 0
    h = formats.read_hpda(args.file)
    if args.action == "validate":
        return _report_exit(validate_hpda(h), repr(h))
    pt = hpda_scheme_point(h)
    print(
        _json(
            {
                "K1": h.K1,
                "K2": h.K2,
                "F": h.F,
                "M1/N": str(pt.m1),
                "M2/N": str(pt.m2),
                "R1": str(pt.r1),
                "R2": str(pt.r2),
                "T_seq": str(pt.t_seq),
                "T_par": str(pt.t_par),
            }
        ),
        end="",
    )
    return 0


# ---- simulate


def cmd_simulate(args) -> int:
    h = formats.read_hpda(args.hpda)
    validate_hpda(h).require("HPDA")
    policy = args.demands
    if policy.startswith("sample:"):
        policy = ("sample", int(policy.split(":", 1)[1]))
    report = simulate(h, args.N, policy, seed=args.seed, packet_bytes=args.packet_bytes)
    _emit(_json(report.to_json()), args.out)
    return 0 if report.ok else 1


# ---- compare / baseline


def cmd_compare(args) -> int:
    which = args.table
    if which == "table1":
        t = reports.table1()
    elif which == "table2":
        t = reports.table2(args.n, args.k, args.j)
    elif which == "table3":
        t = reports.table3()
    elif which == "table4":
        t = reports.table4()
    else:
        t = reports.table5(args.q)
    _emit(t.to_csv(), args.out)
    return 0


def _kv(items) -> dict[str, str]:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ParameterError(f"parameter {item!r} must look like name=value")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_baseline(args) -> int:
    p = _kv(args.params)

    def need(*names):
        missing = [n for n in names if n not in p]
        if missing:
            raise ParameterError(f"{args.scheme} needs parameters {', '.join(missing)}")

    def K(name):
        return int(p[name])

    if args.scheme == "man":
        need("K", "m")
        rate, f = bl.man_rate(frac(p["m"]), K("K"), int(p["N"]) if "N" in p else None)
        out = {"scheme": "man", "K": K("K"), "m": p["m"], "R": str(rate), "R_dec": float(rate), "F": str(f)}
    elif args.scheme == "wwcy":
        need("K1", "K2", "m1", "m2", "alpha", "beta")
        t, f = bl.wwcy_detail(K("K1"), K("K2"), frac(p["m1"]), frac(p["m2"]), frac(p["alpha"]), frac(p["beta"]))
        out = {"scheme": "wwcy", **p, "T": str(t), "T_dec": float(t), "F": str(f)}
    else:
        need("K1", "K2", "m1", "m2")
        K1, K2, m1, m2 = K("K1"), K("K2"), frac(p["m1"]), frac(p["m2"])
        if args.scheme == "jc":
            pt = bl.jc_point(K1, K2, m1, m2)
        elif args.scheme == "scheme-a":
            pt = bl.scheme_a_point(K1, K2, m1, m2)
        elif args.scheme == "scheme-b":
            pt = bl.scheme_b_point(K1, K2, m1, m2)
        else:
            if "alpha" in p and "beta" in p:
                a, b = frac(p["alpha"]), frac(p["beta"])
            else:
                a, b = bl.knmd_optimal_ab(K1, K2, m1, m2, 1)
            pt = bl.knmd_point(K1, K2, m1, m2, a, b)
        out = {"scheme": pt.tag, "K1": K1, "K2": K2, "m1": str(m1), "m2": str(m2)}
        out.update({k: str(v) for k, v in (("R1", pt.r1), ("R2", pt.r2), ("T", pt.t_seq))})
        out.update(R1_dec=float(pt.r1), R2_dec=float(pt.r2), T_dec=float(pt.t_seq), F=str(pt.f))
    print(_json(out), end="")
    return 0


# ---- envelope / figures


def _read_points(path: str) -> list[AchievablePoint]:
    aliases = {"m1": ("m1", "M1/N"), "m2": ("m2", "M2/N"), "r1": ("r1", "R1"), "r2": ("r2", "R2")}
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    pts = []
    for n, row in enumerate(rows, start=2):
        vals = {}
        for key, names in aliases.items():
            hit = next((row[x] for x in names if x in row and row[x] != ""), None)
            if hit is None:
                raise PreconditionError(f"{path}:{n}: missing column {names[0]} (or {names[1]})")
            vals[key] = frac(hit)
        pts.append(AchievablePoint(source=row.get("source", f"p{n - 1}"), **vals))
    return pts


def cmd_envelope(args) -> int:
    pts = _read_points(args.points)
    env = Envelope(pts)
    t = reports.Table("envelope", ["m1", "m2", "feasible", "T", "T_dec", "support"])
    for x, y in square_grid(frac(args.grid)):
        v = env.query(x, y)
        t.rows.append(
            {"m1": reports.q(x), "m2": reports.q(y), "feasible": v.feasible, "T": reports.q(v.t), "T_dec": reports.dec(v.t), "support": v.support_str(pts)}
        )
    _emit(t.to_csv(), args.out)
    return 0


def cmd_figure(args) -> int:
    paths = reports.emit_figure_data(
        args.figure, _out_dir(args), n=args.n, k=args.k, j=args.j, step=frac(args.grid), plot=not args.no_plot
    )
    for p in paths:
        print(f"wrote {p}")
    return 0


def cmd_report(args) -> int:
    """All tables and figure data in one directory."""
    outdir = _out_dir(args)
    written = []
    for t in (reports.table1(), reports.table2(), reports.table3(), reports.table4()):
        written.append(t.write(outdir))
    for qv in args.q or [2, 3, 4, 5]:
        written.append(reports.table5(qv).write(outdir))
    for fig in ("fig6", "fig7", "fig8"):
        written += reports.emit_figure_data(fig, outdir, plot=not args.no_plot)
    for p in written:
        print(f"wrote {p}")
    return 0


# ---- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hpda", description="Design-based placement delivery arrays for hierarchical coded caching.")
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for every randomized path")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="catalog designs and design files")
    dsub = d.add_subparsers(dest="action", required=True)
    dsub.add_parser("list")
    dv = dsub.add_parser("validate")
    dv.add_argument("source", help="catalog name or JSON file")

    p = sub.add_parser("pda", help="build, validate, transpose, point")
    psub = p.add_subparsers(dest="action", required=True)
    pb = psub.add_parser("build")
    pb.add_argument("--design", required=True)
    pb.add_argument("-i", type=int, required=True)
    pb.add_argument("-j", type=int, required=True)
    pb.add_argument("-o", "--out")
    for name in ("validate", "transpose", "point"):
        x = psub.add_parser(name)
        x.add_argument("file")
        if name == "transpose":
            x.add_argument("-o", "--out")

    h = sub.add_parser("hpda", help="build, validate, point, sample")
    hsub = h.add_subparsers(dest="action", required=True)
    hb = hsub.add_parser("build")
    hb.add_argument("--design", required=True)
    hb.add_argument("-i", type=int, required=True)
    hb.add_argument("-j", type=int, required=True)
    hb.add_argument("--inner", help="PDA file refilling the mirror-cached rows")
    hb.add_argument("-o", "--out")
    hs = hsub.add_parser("sample", help="write the three-mirror reference HPDA")
    hs.add_argument("-o", "--out")
    for name in ("validate", "point"):
        hsub.add_parser(name).add_argument("file")

    s = sub.add_parser("simulate", help="place, deliver and decode on a synthetic library")
    s.add_argument("--hpda", required=True)
    s.add_argument("--N", type=int, help="number of files (default K1*K2)")
    s.add_argument("--demands", default="auto", help="auto | exhaustive | sample:<count>")
    s.add_argument("--packet-bytes", type=int, default=16)
    s.add_argument("-o", "--out")

    c = sub.add_parser("compare", help="table data as CSV")
    c.add_argument("table", choices=["table1", "table2", "table3", "table4", "table5"])
    c.add_argument("--q", type=int, default=3)
    c.add_argument("--n", type=int, default=10)
    c.add_argument("--k", type=int, default=9)
    c.add_argument("--j", type=int, default=7)
    c.add_argument("-o", "--out")

    b = sub.add_parser("baseline", help="one comparison-scheme point as JSON")
    b.add_argument("scheme", choices=["man", "knmd", "scheme-a", "scheme-b", "jc", "wwcy"])
    b.add_argument("--params", nargs="*", metavar="NAME=VALUE")

    e = sub.add_parser("envelope", help="lower envelope of T over a memory grid")
    e.add_argument("--points", required=True, help="CSV with m1,m2,r1,r2[,source]")
    e.add_argument("--grid", default="1/20")
    e.add_argument("-o", "--out")

    f = sub.add_parser("figure-data", help="figure data sets (CSV + PNG)")
    f.add_argument("figure", choices=["fig6", "fig7", "fig8"])
    f.add_argument("--n", type=int)
    f.add_argument("--k", type=int, default=9)
    f.add_argument("--j", type=int, default=7)
    f.add_argument("--grid", default="1/20")
    f.add_argument("--no-plot", action="store_true")
    f.add_argument("-o", "--out", help=f"output directory (default ${OUT_ENV} or ./hpda-out)")

    r = sub.add_parser("report", help="every table and figure data set")
    r.add_argument("--q", type=int, nargs="*")
    r.add_argument("--no-plot", action="store_true")
    r.add_argument("-o", "--out")
    return ap


HANDLERS = {
    "design": cmd_design,
    "pda": cmd_pda,
    "hpda": cmd_hpda,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "baseline": cmd_baseline,
    "envelope": cmd_envelope,
    "figure-data": cmd_figure,
    "report": cmd_report,
}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    config = {k: v for k, v in vars(args).items() if v is not None}
    print(json.dumps({"config": config}, default=str), file=sys.stderr)
    try:
        return HANDLERS[args.command](args)
    except (ParameterError, PreconditionError, ConstructionError, KeyError, OSError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
