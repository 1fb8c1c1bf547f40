"""Command-line front end.

Subcommands: ``eval``, ``verify``, ``bench`` and ``list-scenarios``.
Exit codes: 0 when every check passes, 1 for failed checks or domain
errors, 2 for configuration errors and unsupported checks.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import bench, scenario
from .errors import ConfigError, TubeThetaError


def _parser():
    p = argparse.ArgumentParser(prog="tubetheta", description="Theta series on tube domains: evaluation and identity checks.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, jobs=False):
        sp.add_argument("--scenario", action="append", metavar="PATH",
                        help="scenario file or bundled name (repeatable; default: all)")
        sp.add_argument("--tol", type=float, help="evaluation tolerance (overrides the scenario)")
        sp.add_argument("--seed", type=int, help="seed for random sample points")
        sp.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        if jobs:
            sp.add_argument("--jobs", type=int, default=1, help="checks run concurrently")

    common(sub.add_parser("eval", help="evaluate theta at the scenario points"))
    common(sub.add_parser("verify", help="run the scenario's identity checks"), jobs=True)
    b = sub.add_parser("bench", help="time summation strategies and kernel backends")
    b.add_argument("--tol", type=float, action="append", help="tolerance (repeatable; default: sweep)")
    b.add_argument("--out", metavar="PATH")
    b.add_argument("--format", choices=("json", "csv"), default="csv")
    b.add_argument("--repeat", type=int, default=3)
    ls = sub.add_parser("list-scenarios", help="list bundled and configured scenarios")
    ls.add_argument("--format", choices=("json", "csv"), default="csv")
    ls.add_argument("--out", metavar="PATH")
    return p


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _dump_csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _write(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _scenarios(args):
    names = args.scenario or [name for name, _ in scenario.list_scenarios()]
    out = []
    for n in names:
        sc = scenario.load_scenario(scenario.resolve_scenario(n))
        out.append(scenario.with_overrides(sc, tol=args.tol, seed=args.seed))
    return out


def _cmd_eval(args):
    rows, reports, code = [], [], 0
    for sc in _scenarios(args):
        res = scenario.evaluate_points(sc)
        if any("error" in r for r in res):
            code = 1
        reports.append({"scenario": sc.name, "tol": f"{sc.tol:.6e}", "evaluations": res})
        for r in res:
            rows.append({"scenario": sc.name, **{k: (json.dumps(v) if isinstance(v, list) else v) for k, v in r.items()}})
    if args.format == "csv":
        cols = ("scenario", "point", "z", "u", "value", "tail_bound", "points_summed", "radius_used", "error", "message")
        return _dump_csv(rows, cols), code
    return _dump_json(reports[0] if len(reports) == 1 else {"reports": reports}), code


def _cmd_verify(args):
    reports, codes, rows = [], [], []
    for sc in _scenarios(args):
        results = scenario.run_checks(sc, jobs=max(1, args.jobs))
        reports.append(scenario.report(sc, results))
        codes.append(scenario.exit_code(results))
        for r in results:
            d = r.to_dict()
            rows.append({"scenario": sc.name, "tag": d["tag"], "residual": d.get("residual", ""),
                         "tolerance": d.get("tolerance", ""), "pass": d["pass"], "error": d.get("error", "")})
    code = 2 if 2 in codes else (1 if 1 in codes else 0)
    if args.format == "csv":
        return _dump_csv(rows, ("scenario", "tag", "residual", "tolerance", "pass", "error")), code
    if len(reports) == 1:
        return _dump_json(reports[0]), code
    return _dump_json({"reports": reports, "all_pass": all(r["all_pass"] for r in reports)}), code


def _cmd_bench(args):
    rows = bench.run(tols=tuple(args.tol) if args.tol else bench.TOL_SWEEP, repeat=args.repeat)
    if args.format == "json":
        return _dump_json(rows), 0
    return _dump_csv(rows, bench.COLUMNS), 0


def _cmd_list(args):
    rows = []
    for name, path in scenario.list_scenarios():
        try:
            desc = scenario.load_scenario(path).description
        except ConfigError as exc:
            desc = f"invalid: {exc}"
        rows.append({"name": name, "path": str(path), "description": desc})
    if args.format == "json":
        return _dump_json(rows), 0
    return _dump_csv(rows, ("name", "path", "description")), 0


_COMMANDS = {"eval": _cmd_eval, "verify": _cmd_verify, "bench": _cmd_bench, "list-scenarios": _cmd_list}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        text, code = _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"tubetheta: configuration error: {exc}", file=sys.stderr)
        return 2
    except TubeThetaError as exc:
        print(f"tubetheta: {exc}", file=sys.stderr)
        return 1
    _write(text, getattr(args, "out", None))
    return code


if __name__ == "__main__":
    sys.exit(main())
