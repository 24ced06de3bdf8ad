#!/usr/bin/env python3
"""The cross-branch involution of the twice-punctured Cantor space: a
homeomorphism of X° with no continuous extension to X.  Prints the cell
images near the first distinguished point and the cluster evidence."""

import argparse

from boolpow.cli import main as cli_main

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--depth", type=int, default=8)
    args = ap.parse_args()
    raise SystemExit(cli_main(["demo-example-2-3", "--depth", str(args.depth)]))
