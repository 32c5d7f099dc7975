import pytest
from hypothesis import given, settings, strategies as st

from zatrikion import CfenError, Variant, format_cfen, parse_cfen, initial_position
from conftest import random_position

REGULAR_START = "2SQKP4skqp2/2SBBP4sbbp2/2SNNP4snnp2/2SRRP4srrp2 w - 0 1"


def test_regular_start_encoding():
    assert format_cfen(initial_position(Variant.BYZANTINE_REGULAR)) == REGULAR_START


def test_symmetric_start_encoding():
    text = format_cfen(initial_position(Variant.BYZANTINE_SYMMETRIC))
    assert text.split("/")[0] == "2SKQP4skqp2"


def test_circular_start_same_layout_as_regular():
    assert format_cfen(initial_position(Variant.CIRCULAR_FIDE)) == REGULAR_START


def test_parse_start_roundtrip():
    pos = parse_cfen(REGULAR_START, Variant.BYZANTINE_REGULAR)
    assert pos == initial_position(Variant.BYZANTINE_REGULAR)
    assert format_cfen(pos) == REGULAR_START


@pytest.mark.parametrize(
    "text",
    [
        "2SQKP4skqp2/2SBBP4sbbp2/2SNNP4snnp2 w - 0 1",  # only 3 rings
        "2SQKP4skqp1/2SBBP4sbbp2/2SNNP4snnp2/2SRRP4srrp2 w - 0 1",  # 15 squares
        "2SQKP4skqp3/2SBBP4sbbp2/2SNNP4snnp2/2SRRP4srrp2 w - 0 1",  # 17 squares
        "2SXKP4skqp2/2SBBP4sbbp2/2SNNP4snnp2/2SRRP4srrp2 w - 0 1",  # unknown letter
        REGULAR_START.replace(" w ", " x "),  # bad side
        REGULAR_START.replace(" - ", " z9 "),  # bad ep square
        REGULAR_START[:-4],  # missing fields
        REGULAR_START + " extra",
    ],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(CfenError):
        parse_cfen(text, Variant.BYZANTINE_REGULAR)


def test_error_names_ring_index():
    bad = "2SQKP4skqp1/2SBBP4sbbp2/2SNNP4snnp2/2SRRP4srrp2 w - 0 1"
    with pytest.raises(CfenError, match="ring 1"):
        parse_cfen(bad, Variant.BYZANTINE_REGULAR)


def test_empty_ring_uses_multidigit_run():
    text = "16/2K13/8k7/16 w - 3 9"
    pos = parse_cfen(text, Variant.BYZANTINE_REGULAR)
    assert format_cfen(pos) == text
    assert pos.no_capture_clock == 3 and pos.fullmove == 9


def test_pawn_direction_letters_roundtrip():
    text = "P14S/2K13/8k7/s14p w - 0 1"
    pos = parse_cfen(text, Variant.BYZANTINE_REGULAR)
    assert format_cfen(pos) == text


def test_en_passant_field_roundtrip():
    from zatrikion import apply_move, find_move

    pos = initial_position(Variant.CIRCULAR_FIDE)
    apply_move(pos, find_move(pos, "f2h2"))
    text = format_cfen(pos)
    assert " g2 " in text
    back = parse_cfen(text, Variant.CIRCULAR_FIDE)
    assert back.ep_target == pos.ep_target
    assert back.ep_victim == pos.ep_victim
    assert format_cfen(back) == text


@given(seed=st.integers(0, 5000))
@settings(max_examples=60, deadline=None)
def test_roundtrip_random_positions(seed):
    variant = list(Variant)[seed % 3]
    pos = random_position(variant, seed)
    text = format_cfen(pos)
    back = parse_cfen(text, variant)
    assert format_cfen(back) == text
    assert back.board == pos.board
    assert back.stm == pos.stm
    assert back.ep_sq == pos.ep_sq
    assert back.no_capture_clock == pos.no_capture_clock
    assert back.fullmove == pos.fullmove


def test_roundtrip_bulk_10k_positions_per_variant():
    # Snapshot every ply of seeded playouts until 10^4 distinct positions
    # per variant have round-tripped exactly.
    import random

    from zatrikion import apply_move, legal_moves, initial_position

    for variant in Variant:
        rng = random.Random(hash(variant.value) & 0xFFFF)
        seen = 0
        while seen < 10_000:
            pos = initial_position(variant)
            for _ in range(120):
                moves = legal_moves(pos)
                if not moves:
                    break
                apply_move(pos, rng.choice(moves))
                text = format_cfen(pos)
                back = parse_cfen(text, variant)
                assert format_cfen(back) == text
                assert back.board == pos.board and back.ep_sq == pos.ep_sq
                seen += 1
                if seen >= 10_000:
                    break
