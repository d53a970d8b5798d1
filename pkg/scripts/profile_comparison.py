#!/usr/bin/env python3
"""Compare the inner-approximation solver against plain simplex direct search.

Runs both solvers on the n=10, m=200 suite under the standard budget, writes
trace/summary CSVs plus data- and performance-profile CSVs, and prints the
data-profile values at full budget for a quick read.
"""
import argparse
import json
import tempfile
from pathlib import Path

from atomdfo import cli, profiles


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/profile_comparison")
    parser.add_argument("--n", type=int, default=10)
    parser.add_argument("--m", type=int, default=200)
    parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    parser.add_argument("--tau", type=float, default=1e-3)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    out = Path(args.out)
    traces = out / "traces"
    manifest = {
        "pairs": [[args.n, args.m]],
        "seeds": args.seeds,
        "solvers": ["ord", "dfsimplex"],
    }
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(manifest, fh)
        manifest_path = fh.name

    rc = cli.main(["run", "--config", manifest_path, "--out", str(traces), "--jobs", str(args.jobs)])
    if rc != 0:
        raise SystemExit(rc)
    rc = cli.main(["profile", "--traces", str(traces), "--out", str(out), "--tau", str(args.tau)])
    if rc != 0:
        raise SystemExit(rc)

    records = cli.load_run_records(traces)
    curves = profiles.data_profile(records, tau=args.tau, kappas=[25, 50, 100])
    print(f"\ndata profile at tau={args.tau:g} (fraction of problems solved):")
    print(f"{'kappa':>8s} {'ord':>8s} {'dfsimplex':>10s}")
    for i, kappa in enumerate([25, 50, 100]):
        print(f"{kappa:>8d} {curves['ord'][i]:>8.3f} {curves['dfsimplex'][i]:>10.3f}")


if __name__ == "__main__":
    main()
