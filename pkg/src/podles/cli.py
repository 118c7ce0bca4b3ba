"""Batch driver.

    podles <subcommand> [--q Q ...] [--truncation N] [--tol T]
                        [--json PATH] [--csv DIR] [--jobs K]

Subcommands: relations | residues | index | chern | series-f | projmod |
report (runs everything).  Prints one line per check; exit code 0 iff all
checks pass (warnings allowed), 1 on any failure, 2 if anything was
inconclusive.  --json writes a byte-deterministic report file; --csv
writes one file per exported eigenvalue series (lambda, a_lambda, valid).
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .checks import COMMANDS, RunConfig, cmd_report
from .reports import format_line, render_json, render_series_csv, sort_key, summarize

_SUITES = tuple(COMMANDS) + ("report",)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="podles",
        description="verification suites for the quantum-sphere/disk spectral triples",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name in _SUITES:
        sp = sub.add_parser(name, help=f"run the {name} suite")
        sp.add_argument("--q", type=float, action="append", default=None,
                        help="deformation parameter in (0,1); repeatable "
                             "(default 0.3 0.5 0.7 0.9)")
        sp.add_argument("--truncation", type=int, default=120,
                        help="basis truncation (levels), default 120")
        sp.add_argument("--tol", type=float, default=1e-8,
                        help="base tolerance, default 1e-8")
        sp.add_argument("--json", type=str, default=None, metavar="PATH",
                        help="write the JSON report here")
        sp.add_argument("--csv", type=str, default=None, metavar="DIR",
                        help="write eigenvalue-series CSV files here")
        sp.add_argument("--jobs", type=int, default=1, metavar="K",
                        help="parallel workers over (suite, q) tasks")
        sp.add_argument("--triple", action="append", default=None, metavar="T",
                        choices=("mu", "pi", "N-disk", "absD-spinor"),
                        help="keep only checks for this triple (repeatable)")
        sp.add_argument("--element", action="append", default=None, metavar="EXPR",
                        help="extra algebra element for residue runs, e.g. "
                             "'a*b + q^2 b^2' or 'w(1-ww*)w*' (residues suite)")
        sp.add_argument("--quiet", action="store_true", help="suppress per-check lines")
    return p


def _run_task(args):
    name, q, truncation, tol, seed, triples, elements = args
    config = RunConfig(qs=(q,), truncation=truncation, tol=tol, seed=seed,
                       triples=triples, elements=elements)
    return COMMANDS[name](config)


def _q_free_tasks(name: str) -> bool:
    return name in ("series-f",)


def run(command: str, config: RunConfig):
    """Run a suite, parallelizing over (suite, q) when config.jobs > 1."""
    config.validate()
    names = list(COMMANDS) if command == "report" else [command]
    if config.jobs == 1 or all(_q_free_tasks(n) for n in names):
        reports, series = cmd_report(config) if command == "report" else COMMANDS[command](config)
    else:
        tasks = []
        for name in names:
            if _q_free_tasks(name):
                tasks.append((name, config.qs[0], config.truncation, config.tol,
                              config.seed, config.triples, config.elements))
            else:
                for q in config.qs:
                    tasks.append((name, q, config.truncation, config.tol,
                                  config.seed, config.triples, config.elements))
        reports, series = [], {}
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            for (r, s) in pool.map(_run_task, tasks):
                reports += r
                series.update(s)
    # q-independent checks can repeat (per q under task parallelism, per
    # suite loop otherwise); the deterministic report keeps one copy
    seen = set()
    unique = []
    for r in sorted(reports, key=sort_key):
        key = (r.check, r.triple, r.q, r.truncation)
        if key in seen:
            continue
        seen.add(key)
        unique.append(r)
    return unique, series


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = RunConfig(
        qs=tuple(args.q) if args.q else (0.3, 0.5, 0.7, 0.9),
        truncation=args.truncation,
        tol=args.tol,
        jobs=args.jobs,
        triples=tuple(args.triple) if args.triple else None,
        elements=tuple(args.element) if args.element else (),
    )
    reports, series = run(args.command, config)
    reports = sorted(reports, key=sort_key)
    if not args.quiet:
        for r in reports:
            print(format_line(r))
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(render_json(reports))
    if args.csv:
        os.makedirs(args.csv, exist_ok=True)
        for name, rows in sorted(series.items()):
            with open(os.path.join(args.csv, f"{name}.csv"), "w") as fh:
                fh.write(render_series_csv(rows))
    s = summarize(reports)
    print(f"# {s.n_pass} pass, {s.n_warn} warn, {s.n_fail} fail, "
          f"{s.n_inconclusive} inconclusive")
    for r in s.failures:
        print("#   " + format_line(r))
    return s.exit_code


if __name__ == "__main__":
    sys.exit(main())
