"""Emit CSV data for all six figures through the command-line interface.

Usage: python3 scripts/figure_data.py [--out figures] [--points 401]
"""

import argparse
import sys

from satdyn.cli import run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures")
    ap.add_argument("--points", type=int, default=401)
    args = ap.parse_args()
    for fig in range(1, 7):
        code = run(["figure", "--figure", str(fig), "--points", str(args.points), "--out", args.out])
        if code:
            sys.exit(code)


if __name__ == "__main__":
    main()
