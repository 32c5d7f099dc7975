"""Position text encoding for the annular board (cFEN).

Four '/'-separated ring strings (ring 1 first, 16 squares each, digit runs
compress empties), then side to move, en-passant target or '-', the
no-capture clock and the fullmove number.  Pawns use two letters so their
travel direction survives the round trip: P = clockwise, S =
counterclockwise; uppercase is White.  The variant is session state, not
part of the text.
"""

from __future__ import annotations

from typing import Optional

from .board import (
    BISHOP,
    BLACK,
    KING,
    KNIGHT,
    PAWN_CCW,
    PAWN_CW,
    Position,
    QUEEN,
    ROOK,
    RuleConfig,
    Variant,
    WHITE,
    _infer_ep_victim,
    format_coord,
    index_to_coord,
    parse_coord,
)

_BASE_TO_LETTER = {
    KING: "K",
    QUEEN: "Q",
    ROOK: "R",
    BISHOP: "B",
    KNIGHT: "N",
    PAWN_CW: "P",
    PAWN_CCW: "S",
}
_LETTER_TO_BASE = {v: k for k, v in _BASE_TO_LETTER.items()}


class CfenError(ValueError):
    pass


def format_cfen(p: Position) -> str:
    rings = []
    for r in range(4):
        chunks = []
        empties = 0
        for f in range(16):
            code = p.board[r * 16 + f]
            if code == 0:
                empties += 1
                continue
            if empties:
                chunks.append(str(empties))
                empties = 0
            letter = _BASE_TO_LETTER[abs(code)]
            chunks.append(letter if code > 0 else letter.lower())
        if empties:
            chunks.append(str(empties))
        rings.append("".join(chunks))
    stm = "w" if p.stm == WHITE else "b"
    ep = format_coord(index_to_coord(p.ep_sq)) if p.ep_sq >= 0 else "-"
    return f"{'/'.join(rings)} {stm} {ep} {p.no_capture_clock} {p.fullmove}"


def parse_cfen(
    text: str, variant: Variant, rules: Optional[RuleConfig] = None
) -> Position:
    """Parse a cFEN under a known variant; errors carry the failing index."""
    fields = text.split()
    if len(fields) != 5:
        raise CfenError(f"expected 5 fields, got {len(fields)}")
    rings = fields[0].split("/")
    if len(rings) != 4:
        raise CfenError(f"expected 4 ring strings, got {len(rings)}")
    board = [0] * 64
    for r, ring in enumerate(rings):
        f = 0
        i = 0
        while i < len(ring):
            ch = ring[i]
            if ch.isdigit():
                # Digit runs are greedy: '16' is sixteen empties, not 1+6.
                j = i
                while j < len(ring) and ring[j].isdigit():
                    j += 1
                f += int(ring[i:j])
                i = j
                continue
            base = _LETTER_TO_BASE.get(ch.upper())
            if base is None:
                raise CfenError(f"unknown letter {ch!r} in ring {r + 1} at index {i}")
            if f > 15:
                raise CfenError(f"ring {r + 1} has more than 16 squares")
            board[r * 16 + f] = base if ch.isupper() else -base
            f += 1
            i += 1
        if f != 16:
            raise CfenError(f"ring {r + 1} has {f} squares, expected 16")
    stm_field = fields[1]
    if stm_field not in ("w", "b"):
        raise CfenError(f"bad side to move {stm_field!r}")
    stm = WHITE if stm_field == "w" else BLACK
    ep_sq = ep_victim = -1
    if fields[2] != "-":
        try:
            c = parse_coord(fields[2])
        except ValueError as e:
            raise CfenError(f"bad en-passant square: {e}") from e
        ep_sq = (c.ring - 1) * 16 + c.file
        ep_victim = _infer_ep_victim(board, ep_sq, stm)
    try:
        clock = int(fields[3])
        fullmove = int(fields[4])
    except ValueError:
        raise CfenError(f"bad clock fields {fields[3]!r} {fields[4]!r}") from None
    if clock < 0 or fullmove < 1:
        raise CfenError(f"clock fields out of range: {fields[3]} {fields[4]}")
    return Position(
        variant,
        board,
        stm,
        rules,
        ep_sq=ep_sq,
        ep_victim=ep_victim,
        no_capture_clock=clock,
        fullmove=fullmove,
    )
