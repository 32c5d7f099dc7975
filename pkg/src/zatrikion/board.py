"""Annular board geometry, piece taxonomy, variants, and start positions.

The board is an annulus: four concentric rings of 16 squares each.  Ring 1
is the king/queen home ring (rendered innermost), files 0..15 run clockwise
and wrap modulo 16.  Internally squares are flat indices 0..63 with
``sq = (ring - 1) * 16 + file``; the public surface speaks :class:`Coord`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum, IntEnum
from typing import Iterable, NamedTuple, Optional

from . import zobrist

WHITE = 1
BLACK = -1
Color = int  # +1 white, -1 black

FILE_LETTERS = "abcdefghijklmnop"


class Direction(IntEnum):
    """Travel direction around the annulus; clockwise = increasing file."""

    CLOCKWISE = 1
    COUNTERCLOCKWISE = -1

    @property
    def short(self) -> str:
        return "cw" if self is Direction.CLOCKWISE else "ccw"


CW = Direction.CLOCKWISE
CCW = Direction.COUNTERCLOCKWISE


class Coord(NamedTuple):
    """Position on the annulus: ring 1..4, file 0..15 (wraps mod 16)."""

    ring: int
    file: int

    def is_valid(self) -> bool:
        return 1 <= self.ring <= 4 and 0 <= self.file <= 15


class PieceKind(Enum):
    KING = "K"
    QUEEN = "Q"
    ROOK = "R"
    BISHOP = "B"
    KNIGHT = "N"
    PAWN = "P"


class Variant(Enum):
    """The three supported games on the 4x16 annulus."""

    BYZANTINE_REGULAR = "byzantine-regular"
    BYZANTINE_SYMMETRIC = "byzantine-symmetric"
    CIRCULAR_FIDE = "circular-fide"

    @property
    def is_byzantine(self) -> bool:
        return self is not Variant.CIRCULAR_FIDE


@dataclass(frozen=True)
class Piece:
    """A piece on the board; pawns carry their fixed travel direction."""

    color: Color
    kind: PieceKind
    pawn_dir: Optional[Direction] = None

    def __post_init__(self) -> None:
        if (self.kind is PieceKind.PAWN) != (self.pawn_dir is not None):
            raise ValueError("pawn_dir must be set exactly for pawns")


@dataclass(frozen=True)
class RuleConfig:
    """Rule toggles; defaults derive from the variant alone."""

    annihilation: bool = True
    double_step: bool = False
    en_passant: bool = False
    promotion: bool = False
    stalemate_is_win: bool = True
    bare_king_rule: bool = True
    threefold_repetition_draw: bool = True

    @classmethod
    def for_variant(cls, variant: Variant) -> "RuleConfig":
        if variant.is_byzantine:
            return cls()
        return cls(
            double_step=True,
            en_passant=True,
            promotion=True,
            stalemate_is_win=False,
            bare_king_rule=False,
        )

    def replaced(self, **overrides) -> "RuleConfig":
        return replace(self, **overrides)


# Internal piece codes: sign = color, magnitude = kind.  Pawns carry their
# direction in the code so a square lookup fully determines behaviour.
KING, QUEEN, ROOK, BISHOP, KNIGHT, PAWN_CW, PAWN_CCW = 1, 2, 3, 4, 5, 6, 7

_KIND_OF_BASE = {
    KING: PieceKind.KING,
    QUEEN: PieceKind.QUEEN,
    ROOK: PieceKind.ROOK,
    BISHOP: PieceKind.BISHOP,
    KNIGHT: PieceKind.KNIGHT,
    PAWN_CW: PieceKind.PAWN,
    PAWN_CCW: PieceKind.PAWN,
}
_BASE_OF_KIND = {
    PieceKind.KING: KING,
    PieceKind.QUEEN: QUEEN,
    PieceKind.ROOK: ROOK,
    PieceKind.BISHOP: BISHOP,
    PieceKind.KNIGHT: KNIGHT,
}


def piece_from_code(code: int) -> Optional[Piece]:
    if code == 0:
        return None
    base = abs(code)
    color = WHITE if code > 0 else BLACK
    if base == PAWN_CW:
        return Piece(color, PieceKind.PAWN, CW)
    if base == PAWN_CCW:
        return Piece(color, PieceKind.PAWN, CCW)
    return Piece(color, _KIND_OF_BASE[base])


def code_from_piece(piece: Piece) -> int:
    if piece.kind is PieceKind.PAWN:
        base = PAWN_CW if piece.pawn_dir is CW else PAWN_CCW
    else:
        base = _BASE_OF_KIND[piece.kind]
    return base * piece.color


def coord_to_index(c: Coord) -> int:
    return (c.ring - 1) * 16 + c.file


def index_to_coord(sq: int) -> Coord:
    return Coord(sq // 16 + 1, sq % 16)


def square_parity(c: Coord) -> int:
    """Checkerboard parity of a square: (ring + file) mod 2."""
    return (c.ring + c.file) % 2


def advance(c: Coord, direction: Direction, steps: int = 1) -> Coord:
    """Shift a coordinate around its ring; 16 steps is the identity."""
    return Coord(c.ring, (c.file + int(direction) * steps) % 16)


class CoordParseError(ValueError):
    pass


def parse_coord(text: str) -> Coord:
    """Parse a square name: file letter a..p + ring digit 1..4."""
    if len(text) != 2:
        raise CoordParseError(f"malformed square {text!r}")
    letter, digit = text[0], text[1]
    if letter not in FILE_LETTERS:
        raise CoordParseError(f"no such file {letter!r} in {text!r}")
    if digit not in "1234":
        raise CoordParseError(f"no such ring {digit!r} in {text!r}")
    return Coord(int(digit), FILE_LETTERS.index(letter))


def format_coord(c: Coord) -> str:
    return f"{FILE_LETTERS[c.file]}{c.ring}"


_PAWN_CODES = (PAWN_CW, PAWN_CCW, -PAWN_CW, -PAWN_CCW)


class Position:
    """Full game state: board, side to move, clocks, repetition history.

    A value object: :meth:`clone` gives an independent copy and no state is
    shared between instances, so clones may be used from other threads or
    processes.  Mutation happens only through move application in
    :mod:`zatrikion.movegen`.
    """

    __slots__ = (
        "variant",
        "rules",
        "board",
        "stm",
        "ep_sq",
        "ep_victim",
        "no_capture_clock",
        "fullmove",
        "hash",
        "history",
        "last_irreversible",
        "king_sq",
        "counts",
        "side_counts",
        "rep_counts",
        "stale_pairs",
    )

    def __init__(
        self,
        variant: Variant,
        board: list[int],
        stm: Color = WHITE,
        rules: Optional[RuleConfig] = None,
        ep_sq: int = -1,
        ep_victim: int = -1,
        no_capture_clock: int = 0,
        fullmove: int = 1,
    ) -> None:
        self.variant = variant
        self.rules = rules if rules is not None else RuleConfig.for_variant(variant)
        self.board = board
        self.stm = stm
        self.ep_sq = ep_sq
        self.ep_victim = ep_victim
        self.no_capture_clock = no_capture_clock
        self.fullmove = fullmove
        self._rebuild_derived()
        self.hash = zobrist.compute_hash(self)
        self.history = [self.hash]
        self.rep_counts = {self.hash: 1}
        self.last_irreversible = 0

    def _rebuild_derived(self) -> None:
        counts = [0] * 15
        king_sq = [-1, -1]
        for sq, code in enumerate(self.board):
            if code:
                counts[code + 7] += 1
                if code == KING:
                    king_sq[0] = sq
                elif code == -KING:
                    king_sq[1] = sq
        if counts[KING + 7] != 1 or counts[-KING + 7] != 1:
            raise ValueError("position must have exactly one king per color")
        self.counts = counts
        self.side_counts = [sum(counts[8:]), sum(counts[:7])]
        self.king_sq = king_sq
        self.stale_pairs = [
            self._has_facing_pair(WHITE),
            self._has_facing_pair(BLACK),
        ]

    def _has_facing_pair(self, color: Color) -> bool:
        board = self.board
        cw, ccw = PAWN_CW * color, PAWN_CCW * color
        for sq, code in enumerate(board):
            if code == cw and board[sq - (sq & 15) + ((sq + 1) & 15)] == ccw:
                return True
        return False

    # -- public views -----------------------------------------------------

    def piece_at(self, square: "Coord | str") -> Optional[Piece]:
        if isinstance(square, str):
            square = parse_coord(square)
        return piece_from_code(self.board[coord_to_index(square)])

    def piece_map(self) -> dict[Coord, Piece]:
        return {
            index_to_coord(sq): piece_from_code(code)
            for sq, code in enumerate(self.board)
            if code
        }

    @property
    def side_to_move(self) -> Color:
        return self.stm

    @property
    def ep_target(self) -> Optional[Coord]:
        return index_to_coord(self.ep_sq) if self.ep_sq >= 0 else None

    def king_square(self, color: Color) -> Coord:
        return index_to_coord(self.king_sq[0 if color == WHITE else 1])

    def piece_count(self, color: Color) -> int:
        return self.side_counts[0 if color == WHITE else 1]

    def clone(self) -> "Position":
        other = Position.__new__(Position)
        other.variant = self.variant
        other.rules = self.rules
        other.board = self.board[:]
        other.stm = self.stm
        other.ep_sq = self.ep_sq
        other.ep_victim = self.ep_victim
        other.no_capture_clock = self.no_capture_clock
        other.fullmove = self.fullmove
        other.hash = self.hash
        other.history = self.history[:]
        other.rep_counts = dict(self.rep_counts)
        other.last_irreversible = self.last_irreversible
        other.king_sq = self.king_sq[:]
        other.counts = self.counts[:]
        other.side_counts = self.side_counts[:]
        other.stale_pairs = self.stale_pairs[:]
        return other

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Position):
            return NotImplemented
        return (
            self.variant == other.variant
            and self.rules == other.rules
            and self.board == other.board
            and self.stm == other.stm
            and self.ep_sq == other.ep_sq
            and self.ep_victim == other.ep_victim
            and self.no_capture_clock == other.no_capture_clock
            and self.fullmove == other.fullmove
            and self.hash == other.hash
            and self.history == other.history
            and self.last_irreversible == other.last_irreversible
        )

    def __repr__(self) -> str:
        stm = "w" if self.stm == WHITE else "b"
        return f"<Position {self.variant.value} {stm} move {self.fullmove}>"


def initial_position(variant: Variant, rules: Optional[RuleConfig] = None) -> Position:
    """Start position: White on files 2-5, Black on files 10-13.

    Column layout per camp, outward ring order: K/Q home ring, bishops,
    knights, rooks; pawn columns flank the pieces on every ring.  Pawns on
    files 2 and 10 travel counterclockwise, on files 5 and 13 clockwise.
    """
    board = [0] * 64
    for ring in range(4):
        base = ring * 16
        board[base + 2] = PAWN_CCW
        board[base + 5] = PAWN_CW
        board[base + 10] = -PAWN_CCW
        board[base + 13] = -PAWN_CW
    majors = {0: (QUEEN, KING), 1: (BISHOP, BISHOP), 2: (KNIGHT, KNIGHT), 3: (ROOK, ROOK)}
    for ring, (a, b) in majors.items():
        base = ring * 16
        board[base + 3], board[base + 4] = a, b
        # Black mirrors White across the camp axis: king faces king.
        board[base + 11], board[base + 12] = -b, -a
    if variant is Variant.BYZANTINE_SYMMETRIC:
        board[3], board[4] = KING, QUEEN
    return Position(variant, board, WHITE, rules)


def custom_position(
    variant: Variant,
    pieces: "dict[Coord | str, Piece] | Iterable[tuple[Coord | str, Piece]]",
    side_to_move: Color = WHITE,
    rules: Optional[RuleConfig] = None,
    ep_target: "Coord | str | None" = None,
    ep_victim: "Coord | str | None" = None,
    no_capture_clock: int = 0,
    fullmove: int = 1,
) -> Position:
    """Build an arbitrary position (test scaffolding and cFEN parsing)."""
    board = [0] * 64
    items = pieces.items() if isinstance(pieces, dict) else pieces
    for square, piece in items:
        if isinstance(square, str):
            square = parse_coord(square)
        if not square.is_valid():
            raise ValueError(f"invalid coordinate {square}")
        sq = coord_to_index(square)
        if board[sq]:
            raise ValueError(f"two pieces on {format_coord(square)}")
        board[sq] = code_from_piece(piece)
    ep_sq = ep_vic = -1
    if ep_target is not None:
        if isinstance(ep_target, str):
            ep_target = parse_coord(ep_target)
        ep_sq = coord_to_index(ep_target)
        if ep_victim is not None:
            if isinstance(ep_victim, str):
                ep_victim = parse_coord(ep_victim)
            ep_vic = coord_to_index(ep_victim)
        else:
            ep_vic = _infer_ep_victim(board, ep_sq, side_to_move)
    return Position(
        variant,
        board,
        side_to_move,
        rules,
        ep_sq=ep_sq,
        ep_victim=ep_vic,
        no_capture_clock=no_capture_clock,
        fullmove=fullmove,
    )


def _infer_ep_victim(board: list[int], ep_sq: int, stm: Color) -> int:
    """Locate the pawn that double-stepped through ep_sq.

    The victim sits one file past the target in its own travel direction;
    in positions reachable from the start at most one candidate fits.
    """
    ring_base = ep_sq - (ep_sq & 15)
    f = ep_sq & 15
    for dir_ in (1, -1):
        sq = ring_base + ((f + dir_) & 15)
        code = board[sq]
        if code * stm < 0 and abs(code) == (PAWN_CW if dir_ == 1 else PAWN_CCW):
            return sq
    raise ValueError("no pawn consistent with the en-passant target")
