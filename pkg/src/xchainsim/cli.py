"""Command line entry point: ``xchainsim run|probe-matrix|campaign|replay|list``.

Exit status is 0 exactly when every invariant verdict passes (and, for the
matrix, every probed cell matches).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .deploy import all_standards_config
from .errors import ConfigError
from .harness import InvariantReport
from .matrix import capability_matrix, render_matrix, results_to_dicts, run_probes
from .scenario import build_run_report, bundled_scenarios, load_scenario, run_scenario
from .sim import dump_events, load_events
from .workload import run_campaign

log = logging.getLogger("xchainsim")
SEED_ENV = "XCHAINSIM_SEED"


def _seed(args, fallback: int | None) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return fallback


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)
        log.info("wrote %s", path)


def cmd_run(args) -> int:
    config = load_scenario(args.scenario)
    seed = _seed(args, config.seed)
    report, events = run_scenario(config, seed, probes=args.probes or None)
    _write(args.log, dump_events(events))
    _write(args.out, report.to_json())
    print(report.summary())
    if args.verbose:
        for f, v in report.invariant_report.failures().items():
            print(f"  counterexample {f}: {json.dumps(v, sort_keys=True)}")
    return 0 if report.passed else 1


def cmd_probe_matrix(args) -> int:
    results = run_probes()
    matrix = capability_matrix(results)
    if args.out:
        _write(args.out, json.dumps({"matrix": matrix, "probes": results_to_dicts(results)},
                                    sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    print(render_matrix(matrix))
    if args.verbose:
        for r in results:
            print(f"  {r.row} / {r.standard}: {r.mark} via {r.procedure}: {r.evidence}")
    return 0 if matrix["matches_table"] else 1


def _campaign_one(job: tuple[int, int]) -> tuple[int, dict, float]:
    seed, ops = job
    t0 = time.perf_counter()
    result = run_campaign(all_standards_config(), seed, ops)
    return seed, result.report.to_dict(), time.perf_counter() - t0


def cmd_campaign(args) -> int:
    start = _seed(args, 0)
    jobs = [(start + i, args.ops) for i in range(args.seeds)]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            results = list(pool.map(_campaign_one, jobs))
    else:
        results = [_campaign_one(j) for j in jobs]
    merged: InvariantReport | None = None
    for seed, report, secs in sorted(results, key=lambda r: r[0]):
        rep = InvariantReport.from_dict(report)
        log.info("seed %d: %s in %.2fs", seed, "pass" if rep.passed else "FAIL", secs)
        if args.verbose and not rep.passed:
            print(f"seed {seed} failed: {json.dumps(rep.failures(), sort_keys=True)}")
        merged = rep if merged is None else merged.merge(rep)
    assert merged is not None
    _write(args.out, merged.to_json() + "\n")
    failing = [v for v in merged.failures()]
    print(f"campaign: {len(jobs)} seeds x {args.ops} ops, {merged.events} events: "
          f"{'PASS' if merged.passed else 'FAIL ' + ', '.join(failing)}")
    return 0 if merged.passed else 1


def cmd_replay(args) -> int:
    events = load_events(Path(args.log).read_text())
    report = build_run_report(events)
    _write(args.out, report.to_json())
    print(report.summary())
    return 0 if report.passed else 1


def cmd_list(args) -> int:
    for name in bundled_scenarios():
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xchainsim",
                                description="Deterministic cross-chain token standard simulator")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_help="write the machine-readable report here"):
        sp.add_argument("--seed", type=int, default=None,
                        help=f"overrides the scenario seed and ${SEED_ENV}")
        sp.add_argument("--out", help=out_help)
        sp.add_argument("-v", "--verbose", action="count", default=0)

    r = sub.add_parser("run", help="run a scenario file or bundled scenario")
    r.add_argument("scenario", help="path to a YAML file or a bundled scenario name")
    r.add_argument("--log", help="write the event log (JSON lines) here")
    r.add_argument("--probes", action="store_true", help="also run the capability probes")
    common(r)
    r.set_defaults(func=cmd_run)

    m = sub.add_parser("probe-matrix", help="run every capability probe")
    common(m, "write the matrix as JSON here")
    m.set_defaults(func=cmd_probe_matrix)

    c = sub.add_parser("campaign", help="seeded random sweeps over every standard")
    c.add_argument("--seeds", type=int, default=10, help="number of consecutive seeds")
    c.add_argument("--ops", type=int, default=10_000, help="operations per seed")
    c.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    common(c, "write the merged invariant report here")
    c.set_defaults(func=cmd_campaign)

    rp = sub.add_parser("replay", help="rebuild a report from an event log")
    rp.add_argument("log", help="event log written by 'run --log'")
    rp.add_argument("--out")
    rp.add_argument("-v", "--verbose", action="count", default=0)
    rp.set_defaults(func=cmd_replay)

    ls = sub.add_parser("list", help="list bundled scenarios")
    ls.set_defaults(func=cmd_list, verbose=0)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
