"""Command-line entry point: simulate / couple / analyze / report / tw-table."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import harness
from .tracywidom import build_reference


def _cmd_simulate(args) -> int:
    config = harness.ExperimentConfig.from_file(args.config)
    record = harness.run(config)
    print(f"wrote {record.path} ({len(record.rows)} rows)")
    for w in record.summary.get("warnings", []):
        print(f"warning: {w}", file=sys.stderr)
    return 0 if record.summary.get("complete", True) else 1


def _cmd_couple(args) -> int:
    config = harness.ExperimentConfig.from_file(args.config)
    if config.kind != "coupling":
        raise ValueError("couple expects a config with kind = coupling")
    record = harness.run(config)
    print(f"wrote {record.path} ({len(record.rows)} rows)")
    return 0


def _cmd_analyze(args) -> int:
    report = harness.analyze(args.records)
    text = json.dumps(report, indent=2, default=float)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def _cmd_report(args) -> int:
    report = harness.analyze(args.records)
    os.makedirs(args.out, exist_ok=True)
    jpath = os.path.join(args.out, "report.json")
    with open(jpath, "w") as fh:
        json.dump(report, fh, indent=2, default=float)
        fh.write("\n")
    ppath = os.path.join(args.out, "plot_data.csv")
    with open(ppath, "w") as fh:
        fh.write(harness.plot_data_csv(report))
    print(f"wrote {jpath} and {ppath}")
    return 0


def _cmd_tw_table(args) -> int:
    ref = build_reference(
        s_min=args.min, s_max=args.max, step=args.step, quad_order=args.order
    )
    lines = ["s,F"]
    for s, F in zip(ref.s, ref.F):
        lines.append(f"{s:.12g},{F:.12g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lpplab",
        description="Monte Carlo laboratory for near-axis last-passage percolation fluctuations",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run an experiment config")
    s.add_argument("config")
    s.set_defaults(func=_cmd_simulate)

    c = sub.add_parser("couple", help="run a coupling experiment config")
    c.add_argument("config")
    c.set_defaults(func=_cmd_couple)

    a = sub.add_parser("analyze", help="cross-record analysis")
    a.add_argument("records", nargs="+")
    a.add_argument("--out")
    a.set_defaults(func=_cmd_analyze)

    r = sub.add_parser("report", help="analysis plus plot-data files")
    r.add_argument("records", nargs="+")
    r.add_argument("--out", required=True)
    r.set_defaults(func=_cmd_report)

    t = sub.add_parser("tw-table", help="emit the Tracy-Widom CDF grid as CSV")
    t.add_argument("--min", type=float, default=-10.0)
    t.add_argument("--max", type=float, default=6.0)
    t.add_argument("--step", type=float, default=0.25)
    t.add_argument("--order", type=int, default=120)
    t.add_argument("--out")
    t.set_defaults(func=_cmd_tw_table)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - single CLI error funnel
        err = {"error": type(exc).__name__, "message": str(exc)}
        print("error: " + json.dumps(err), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
