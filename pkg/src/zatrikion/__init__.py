"""Engine for Byzantine chess (regular and symmetric) and circular chess.

Rules, search, a retrograde endgame oracle, a self-play harness, and a
text/WebSocket protocol front end, all on the 4x16 annular board.
"""

from .board import (
    BLACK,
    CCW,
    CW,
    Coord,
    Direction,
    Piece,
    PieceKind,
    Position,
    RuleConfig,
    Variant,
    WHITE,
    advance,
    custom_position,
    format_coord,
    initial_position,
    parse_coord,
    square_parity,
)
from .movegen import (
    IllegalMoveError,
    Move,
    UndoToken,
    apply_move,
    count_legal_moves,
    find_move,
    in_check,
    is_attacked,
    legal_moves,
    mirror_position,
    move_to_text,
    perft,
    pseudo_legal_moves,
    undo_move,
)
from .adjudicate import DrawReason, GameStatus, StatusKind, game_status, is_bare
from .cfen import CfenError, format_cfen, parse_cfen
from .search import (
    EvalParams,
    SearchLimits,
    SearchResult,
    Searcher,
    evaluate,
    search,
    zobrist_hash,
)

__version__ = "0.1.0"
