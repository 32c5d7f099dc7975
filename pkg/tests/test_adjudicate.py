import pytest

from zatrikion import (
    BLACK,
    Piece,
    PieceKind,
    Variant,
    WHITE,
    custom_position,
    game_status,
    initial_position,
    is_bare,
    legal_moves,
)
from zatrikion.adjudicate import DrawReason, StatusKind
from rules_ladder import LADDER


@pytest.mark.parametrize("name,build,expected", LADDER, ids=[e[0] for e in LADDER])
def test_rules_ladder(name, build, expected):
    assert game_status(build()).result_text() == expected


@pytest.mark.parametrize("variant", list(Variant))
def test_initial_positions_ongoing(variant):
    assert game_status(initial_position(variant)).kind is StatusKind.ONGOING


def test_is_bare():
    pos = custom_position(
        Variant.BYZANTINE_REGULAR,
        {
            "a1": Piece(BLACK, PieceKind.KING),
            "e3": Piece(WHITE, PieceKind.KING),
            "h2": Piece(WHITE, PieceKind.PAWN, pawn_dir=__import__("zatrikion").CW),
        },
    )
    assert is_bare(pos, BLACK)
    assert not is_bare(pos, WHITE)
    start = initial_position(Variant.BYZANTINE_REGULAR)
    assert not is_bare(start, WHITE) and not is_bare(start, BLACK)


def test_mate_implies_check_and_no_moves():
    for name, build, expected in LADDER:
        pos = build()
        status = game_status(pos)
        moves = legal_moves(pos)
        if status.kind is StatusKind.MATE:
            from zatrikion import in_check

            assert in_check(pos) and not moves
        if status.kind in (StatusKind.STALEMATE_WIN, StatusKind.STALEMATE_DRAW):
            from zatrikion import in_check

            assert not in_check(pos) and not moves


def test_bare_king_never_scored_with_riposte_available():
    # Whenever the adjudicator says bare-king, the bared side must have no
    # legal capture of the opponent's last piece.
    for name, build, expected in LADDER:
        pos = build()
        status = game_status(pos)
        if status.kind is StatusKind.BARE_KING_WIN and pos.piece_count(-pos.stm) == 2:
            assert not any(m.captured for m in legal_moves(pos))


def test_circular_never_uses_byzantine_endings():
    for name, build, expected in LADDER:
        pos = build()
        if pos.variant is Variant.CIRCULAR_FIDE:
            status = game_status(pos)
            assert status.kind not in (StatusKind.BARE_KING_WIN, StatusKind.STALEMATE_WIN)


def test_no_capture_and_ply_cap_are_harness_level():
    # The rules-level adjudicator never returns those reasons on its own.
    for name, build, expected in LADDER:
        status = game_status(build())
        assert status.draw_reason not in (
            DrawReason.NO_CAPTURE_LIMIT,
            DrawReason.PLY_CAP,
        )


def test_result_text_codes():
    from zatrikion.adjudicate import GameStatus

    assert GameStatus(StatusKind.MATE, winner=WHITE).result_text() == "1-0 mate"
    assert GameStatus(StatusKind.BARE_KING_WIN, winner=BLACK).result_text() == "0-1 bare-king"
    assert (
        GameStatus(StatusKind.DRAW, draw_reason=DrawReason.REPETITION).result_text()
        == "1/2-1/2 repetition"
    )
