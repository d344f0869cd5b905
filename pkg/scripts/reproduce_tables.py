"""Write every experiment table as CSV into one directory.

    python3 scripts/reproduce_tables.py [OUTDIR] [--threads N]

Exit status is the largest exit code of the individual subcommands.
"""

import argparse
import sys
import time
from pathlib import Path

from fredgap.cli import main

RUNS = {
    "tw_table": ["tw-table", "-4", "-2", "0", "2", "8"],
    "airy_contour_vs_line": ["contour-vs-line", "--family", "airy", "--interval", "0,inf"],
    "pearcey_contour_vs_line": ["contour-vs-line", "--family", "pearcey", "--interval=-1,1", "--tau", "1"],
    "pearcey_two_intervals": ["contour-vs-line", "--family", "pearcey", "--interval=-2,-1", "--interval", "1,2",
                              "--tau", "1"],
    "stencil_oracle": ["pde-check", "--synthetic"],
    "pde_check": ["pde-check", "--center=-1,1,1", "--h", "0.04"],
    "factorization": ["factorization", "--lambdas", "1.0,1.1,1.2,1.3"],
    "decay": ["decay", "--interval=-1,1", "--taus", "4,5,6,7,8"],
}


def parse_args(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("outdir", nargs="?", default="results")
    p.add_argument("--threads", type=int, default=1)
    return p.parse_args(argv)


def run_all(outdir: Path, threads: int) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for name, argv in RUNS.items():
        t0 = time.perf_counter()
        code = main(argv + ["--threads", str(threads), "--out", str(outdir / f"{name}.csv")])
        print(f"{name:26s} exit {code}  {time.perf_counter() - t0:6.1f} s")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    args = parse_args()
    sys.exit(run_all(Path(args.outdir), args.threads))
