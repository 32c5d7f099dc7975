"""Shared helpers: seeded random-walk positions built through the rules API."""

from __future__ import annotations

import random

import pytest

from zatrikion import Variant, initial_position, legal_moves, apply_move


def random_position(variant: Variant, seed: int, max_plies: int = 40):
    """A legal position reached by a seeded random playout."""
    rng = random.Random(seed)
    pos = initial_position(variant)
    for _ in range(rng.randrange(2, max_plies)):
        moves = legal_moves(pos)
        if not moves:
            break
        apply_move(pos, rng.choice(moves))
    return pos


@pytest.fixture(scope="session")
def all_variants():
    return list(Variant)
