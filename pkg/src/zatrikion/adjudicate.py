"""Terminal-state detection: the Byzantine win ladder and circular draws.

Byzantine games are won by mate, by stalemating the opponent, or by baring
the opponent's king; a fresh bare king escapes with a draw if it can
immediately capture the opponent's last remaining piece (both kings bare).
The circular game keeps only mate; stalemate is a draw there.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .board import BLACK, Color, KING, Position, WHITE
from .movegen import Move, in_check, legal_moves


class StatusKind(Enum):
    ONGOING = "ongoing"
    MATE = "mate"
    STALEMATE_WIN = "stalemate-win"
    STALEMATE_DRAW = "stalemate-draw"
    BARE_KING_WIN = "bare-king"
    DRAW = "draw"


class DrawReason(Enum):
    TWO_BARE_KINGS = "two-bare-kings"
    REPETITION = "repetition"
    NO_CAPTURE_LIMIT = "no-capture"
    PLY_CAP = "ply-cap"
    INSUFFICIENT_FORCE = "insufficient"


@dataclass(frozen=True)
class GameStatus:
    kind: StatusKind
    winner: Optional[Color] = None
    draw_reason: Optional[DrawReason] = None

    @property
    def is_terminal(self) -> bool:
        return self.kind is not StatusKind.ONGOING

    @property
    def is_draw(self) -> bool:
        return self.kind in (StatusKind.STALEMATE_DRAW, StatusKind.DRAW)

    @property
    def is_decisive(self) -> bool:
        return self.winner is not None

    def reason_token(self) -> str:
        if self.kind is StatusKind.DRAW:
            return self.draw_reason.value
        return self.kind.value

    def result_text(self) -> str:
        """Score plus reason code, e.g. '1-0 bare-king'."""
        if self.kind is StatusKind.ONGOING:
            return "ongoing"
        if self.winner is not None:
            score = "1-0" if self.winner == WHITE else "0-1"
        else:
            score = "1/2-1/2"
        return f"{score} {self.reason_token()}"


ONGOING = GameStatus(StatusKind.ONGOING)


def is_bare(p: Position, color: Color) -> bool:
    """True iff the color has nothing on the board but its king."""
    return p.piece_count(color) == 1


def _repetition_count(p: Position) -> int:
    # Occurrences since the last irreversible move (older ones cannot recur).
    return p.rep_counts.get(p.hash, 0)


def game_status(p: Position, moves: Optional[list[Move]] = None) -> GameStatus:
    """Adjudicate a position; mate/stalemate outrank the bare-king ladder."""
    if moves is None:
        moves = legal_moves(p)
    stm = p.stm
    if not moves:
        if in_check(p):
            return GameStatus(StatusKind.MATE, winner=-stm)
        if p.rules.stalemate_is_win:
            return GameStatus(StatusKind.STALEMATE_WIN, winner=-stm)
        return GameStatus(StatusKind.STALEMATE_DRAW)
    stm_bare = is_bare(p, stm)
    opp_bare = is_bare(p, -stm)
    if p.rules.bare_king_rule:
        if stm_bare and opp_bare:
            return GameStatus(StatusKind.DRAW, draw_reason=DrawReason.TWO_BARE_KINGS)
        if stm_bare:
            # A single riposte capture of the opponent's last piece turns
            # the loss into a two-bare-kings draw (rational play assumed).
            if p.piece_count(-stm) == 2 and any(
                m.captured and abs(m.captured) != KING for m in moves
            ):
                return GameStatus(StatusKind.DRAW, draw_reason=DrawReason.TWO_BARE_KINGS)
            return GameStatus(StatusKind.BARE_KING_WIN, winner=-stm)
    elif stm_bare and opp_bare:
        return GameStatus(StatusKind.DRAW, draw_reason=DrawReason.INSUFFICIENT_FORCE)
    if p.rules.threefold_repetition_draw and _repetition_count(p) >= 3:
        return GameStatus(StatusKind.DRAW, draw_reason=DrawReason.REPETITION)
    return ONGOING
