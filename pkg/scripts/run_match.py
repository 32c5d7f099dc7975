#!/usr/bin/env python3
"""Run a computer-vs-computer match and print the W/D/L summary.

Defaults reproduce the desk-scale draw-rate comparison: 100 games at fixed
depth 4 with short randomized openings.  Profiles: --depth N (applet-style
fixed depth) or --movetime MS (clock-style).
"""

import argparse
import json
import sys
import time

sys.path.insert(0, "src")

from zatrikion import Variant
from zatrikion.search import SearchLimits
from zatrikion.selfplay import (
    Diversify,
    MatchConfig,
    export_stats,
    format_stats,
    run_match,
    score,
)

VARIANTS = {
    "regular": Variant.BYZANTINE_REGULAR,
    "symmetric": Variant.BYZANTINE_SYMMETRIC,
    "circular": Variant.CIRCULAR_FIDE,
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("variant", choices=sorted(VARIANTS))
    parser.add_argument("--games", type=int, default=100)
    parser.add_argument("--depth", type=int, default=None)
    parser.add_argument("--movetime", type=int, default=None, help="ms per move")
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--workers", type=int, default=2)
    parser.add_argument("--ply-cap", type=int, default=400)
    parser.add_argument("--no-capture", type=int, default=None,
                        help="adjudicate a draw after N captureless moves")
    parser.add_argument("--opening-plies", type=int, default=4)
    parser.add_argument("--opening-top", type=int, default=3)
    parser.add_argument("--jitter", type=int, default=None, help="eval jitter in cp")
    parser.add_argument("--out", default=None, help="stats file (json or csv)")
    args = parser.parse_args()

    if args.depth is None and args.movetime is None:
        args.depth = 4
    if args.jitter is not None:
        diversify = Diversify.jitter(args.jitter)
    else:
        diversify = Diversify.random_opening(args.opening_plies, args.opening_top)
    config = MatchConfig(
        variant=VARIANTS[args.variant],
        games=args.games,
        limits=SearchLimits(max_depth=args.depth, movetime_ms=args.movetime),
        seed=args.seed,
        diversify=diversify,
        adjudicate_no_capture=args.no_capture,
        ply_cap=args.ply_cap,
        workers=args.workers,
    )
    t0 = time.time()
    stats = run_match(config)
    elapsed = time.time() - t0
    print(format_stats(stats, "json"))
    plus, eq, minus = stats.white_wins, stats.draws, stats.black_wins
    print(f"result: +{plus}={eq}-{minus}  draw rate {eq / stats.games:.2f}  "
          f"decisive {stats.decisive_rate:.2f}  mean length {stats.mean_game_length:.0f} plies")
    bonus = score(stats, mate_bonus=True)
    print(f"scores (mate bonus 1.5): white {bonus['white']}, black {bonus['black']}")
    print(f"wall time: {elapsed:.0f}s with {config.workers} workers")
    if args.out:
        fmt = "csv" if args.out.endswith(".csv") else "json"
        export_stats(stats, args.out, fmt)
        print(f"stats written to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
