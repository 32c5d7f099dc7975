"""Zobrist keys for positions on the annulus.

Keys cover (square, piece code) where the code distinguishes color, kind
and pawn travel direction, plus side to move and the en-passant target.
Tables come from a fixed seed so hashes are stable across processes and
runs, which the reproducibility guarantees rely on.
"""

from __future__ import annotations

import random

_rng = random.Random(0x5A7D1C10)

# Piece codes are -7..7 (0 = empty); index by code + 7.
PIECE_KEYS = tuple(
    tuple(_rng.getrandbits(64) for _ in range(64)) for _ in range(15)
)
SIDE_KEY = _rng.getrandbits(64)
EP_KEYS = tuple(_rng.getrandbits(64) for _ in range(64))
del _rng


def compute_hash(position) -> int:
    """Recompute the hash from scratch (the incremental path must agree)."""
    h = 0
    for sq, code in enumerate(position.board):
        if code:
            h ^= PIECE_KEYS[code + 7][sq]
    if position.stm == -1:
        h ^= SIDE_KEY
    if position.ep_sq >= 0:
        h ^= EP_KEYS[position.ep_sq]
    return h
