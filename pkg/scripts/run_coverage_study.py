#!/usr/bin/env python3
"""Run a config-driven coverage study and write the per-cell CSV.

Point ``--config`` at one of the files under scripts/configs/: the desk
profiles (p <= 5, 50 replicates, 4000 iterations) finish in minutes on one
core, the full-scale profiles (p <= 20, 250 replicates, 20000 iterations,
three skew levels) are an overnight run unless spread over ``--threads``.
"""

import argparse
import sys
from pathlib import Path

from tpbayes.cli import main as tpbayes

CONFIG_DIR = Path(__file__).resolve().parent / "configs"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", type=Path,
                        default=CONFIG_DIR / "coverage_desk_ar.yaml")
    parser.add_argument("--out", type=Path, default=Path("results/coverage.csv"))
    parser.add_argument("--replicates", type=int, default=None,
                        help="override the config's replicate count")
    parser.add_argument("--master-seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None,
                        help="worker processes for cell-level parallelism")
    args = parser.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)
    argv = ["coverage-study", "--config", str(args.config), "--out", str(args.out)]
    for flag, value in (("--replicates", args.replicates),
                        ("--master-seed", args.master_seed),
                        ("--threads", args.threads)):
        if value is not None:
            argv += [flag, str(value)]
    code = tpbayes(argv)
    if code == 0:
        print(f"wrote {args.out}")
    return code


if __name__ == "__main__":
    sys.exit(main())
