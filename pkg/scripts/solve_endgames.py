#!/usr/bin/env python3
"""Solve pawnless endings exactly and report win/draw fractions.

The minor pieces are poor attackers on the annulus, but the bare-king rule
still decides many raw states: the summary separates immediate tactical
finishes from wins that need real maneuvering.
"""

import argparse
import sys
import time

sys.path.insert(0, "src")

import numpy as np

from zatrikion.oracle import OracleTable, solve, _DRAW, _ILLEGAL, _LOSS, _WIN


def report(table) -> None:
    v, d = table.values, table.dtm
    legal = v != _ILLEGAL
    n = int(legal.sum())
    idx = np.arange(table.size)
    stm_white = idx % 2 == 0
    wins, losses, draws = v == _WIN, v == _LOSS, v == _DRAW
    white_forced = int((wins & stm_white).sum() + (losses & ~stm_white).sum())
    black_forced = int((wins & ~stm_white).sum() + (losses & stm_white).sum())
    quick = int((wins & (d <= 1)).sum())
    print(f"{table.material}: {n} legal states")
    print(f"  draws: {int(draws.sum())} ({draws.sum() / n:.1%})")
    print(f"  forced wins for White: {white_forced} ({white_forced / n:.1%})")
    print(f"  forced wins for Black: {black_forced} ({black_forced / n:.1%})")
    print(f"  wins decided by an immediate capture: {quick}")
    print(f"  longest forced finish: {int(d[legal].max())} plies")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("materials", nargs="*", default=["KNvKB", "KNvKQ"])
    parser.add_argument("--save", metavar="DIR", help="write .ztb tables here")
    parser.add_argument("--load", metavar="FILE", help="probe a saved table and exit")
    args = parser.parse_args()

    if args.load:
        report(OracleTable.load(args.load))
        return 0
    for material in args.materials:
        t0 = time.time()
        table = solve(material)
        print(f"solved {material} in {time.time() - t0:.0f}s")
        report(table)
        if args.save:
            path = f"{args.save.rstrip('/')}/{material.lower()}.ztb"
            table.save(path)
            print(f"  saved to {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
