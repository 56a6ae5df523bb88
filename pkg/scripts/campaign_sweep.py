"""Run the all-standards property campaign over a range of seeds.

    python scripts/campaign_sweep.py --seeds 100 --ops 10000 --workers 4 --out sweep.json

Prints one line per seed and writes the merged invariant report.
"""
import argparse
import time
from concurrent.futures import ProcessPoolExecutor

from xchainsim.deploy import all_standards_config
from xchainsim.harness import InvariantReport
from xchainsim.workload import run_campaign


def one(job):
    seed, ops = job
    t0 = time.perf_counter()
    res = run_campaign(all_standards_config(), seed, ops)
    return seed, res.report.to_dict(), dict(res.ops), dict(res.reverts), time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--start", type=int, default=0)
    ap.add_argument("--ops", type=int, default=10_000)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out")
    args = ap.parse_args()

    jobs = [(args.start + i, args.ops) for i in range(args.seeds)]
    t0 = time.perf_counter()
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            rows = list(pool.map(one, jobs))
    else:
        rows = [one(j) for j in jobs]
    merged = None
    for seed, rep, ops, reverts, secs in sorted(rows, key=lambda r: r[0]):
        rep = InvariantReport.from_dict(rep)
        census = rep.census
        print(f"seed {seed:4d} {'pass' if rep.passed else 'FAIL'} {secs:5.2f}s "
              f"events={rep.events} delivered={census['Delivered']} rejected={census['Rejected']} "
              f"forged={census['forged']} reverts={sum(reverts.values())}")
        merged = rep if merged is None else merged.merge(rep)
    print(f"{len(jobs)} seeds in {time.perf_counter() - t0:.1f}s: "
          f"{'all invariants hold' if merged.passed else merged.failures()}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(merged.to_json() + "\n")


if __name__ == "__main__":
    main()
