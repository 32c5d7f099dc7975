"""Move generation, attack detection, and reversible move application.

Byzantine piece set: king/rook/knight move as in orthodox chess (files wrap
around the ring), the bishop leaps exactly two squares diagonally over any
intermediate piece, the queen steps one square diagonally, and pawns have
no double step, no en passant and no promotion.  The circular game keeps
the board but uses orthodox sliders and pawn rules.

Same-color pawns travelling in opposite directions that meet face to face
are both removed as part of the move that created the contact (the
annihilation rule); the removal costs no turn.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .board import (
    BISHOP,
    BLACK,
    CCW,
    CW,
    Color,
    Coord,
    Direction,
    KING,
    KNIGHT,
    PAWN_CCW,
    PAWN_CW,
    Piece,
    PieceKind,
    Position,
    QUEEN,
    ROOK,
    WHITE,
    coord_to_index,
    format_coord,
    index_to_coord,
    parse_coord,
    piece_from_code,
)
from .zobrist import EP_KEYS, PIECE_KEYS, SIDE_KEY, compute_hash


class IllegalMoveError(ValueError):
    pass


class StaleUndoError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Geometry tables.  Internal rings are 0..3, files 0..15; sq = ring*16 + file.


def _sq(ring: int, file: int) -> int:
    return ring * 16 + (file & 15)


def _build_tables():
    knight, king, alfil, fers = [], [], [], []
    rook_rays, diag_rays = [], []
    push_cw, push_ccw, caps_cw, caps_ccw = [], [], [], []
    att_cw, att_ccw = [], []
    for r in range(4):
        for f in range(16):
            knight.append(
                tuple(
                    _sq(r + dr, f + df)
                    for dr, df in (
                        (1, 2), (1, -2), (-1, 2), (-1, -2),
                        (2, 1), (2, -1), (-2, 1), (-2, -1),
                    )
                    if 0 <= r + dr <= 3
                )
            )
            king.append(
                tuple(
                    _sq(r + dr, f + df)
                    for dr in (-1, 0, 1)
                    for df in (-1, 0, 1)
                    if (dr or df) and 0 <= r + dr <= 3
                )
            )
            alfil.append(
                tuple(
                    _sq(r + dr, f + df)
                    for dr in (-2, 2)
                    for df in (-2, 2)
                    if 0 <= r + dr <= 3
                )
            )
            fers.append(
                tuple(
                    _sq(r + dr, f + df)
                    for dr in (-1, 1)
                    for df in (-1, 1)
                    if 0 <= r + dr <= 3
                )
            )
            # Ring rays stop after 15 squares: a slide never passes through
            # or lands on its own origin.
            rays = [
                tuple(_sq(r, f + i) for i in range(1, 16)),
                tuple(_sq(r, f - i) for i in range(1, 16)),
                tuple(_sq(rr, f) for rr in range(r + 1, 4)),
                tuple(_sq(rr, f) for rr in range(r - 1, -1, -1)),
            ]
            rook_rays.append(tuple(ray for ray in rays if ray))
            drays = []
            for dr, df in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                ray, rr, ff = [], r + dr, f + df
                while 0 <= rr <= 3:
                    ray.append(_sq(rr, ff))
                    rr += dr
                    ff += df
                if ray:
                    drays.append(tuple(ray))
            diag_rays.append(tuple(drays))
            push_cw.append(_sq(r, f + 1))
            push_ccw.append(_sq(r, f - 1))
            caps_cw.append(tuple(_sq(r + dr, f + 1) for dr in (-1, 1) if 0 <= r + dr <= 3))
            caps_ccw.append(tuple(_sq(r + dr, f - 1) for dr in (-1, 1) if 0 <= r + dr <= 3))
            att_cw.append(tuple(_sq(r + dr, f - 1) for dr in (-1, 1) if 0 <= r + dr <= 3))
            att_ccw.append(tuple(_sq(r + dr, f + 1) for dr in (-1, 1) if 0 <= r + dr <= 3))
    return (
        tuple(knight), tuple(king), tuple(alfil), tuple(fers),
        tuple(rook_rays), tuple(diag_rays),
        tuple(push_cw), tuple(push_ccw), tuple(caps_cw), tuple(caps_ccw),
        tuple(att_cw), tuple(att_ccw),
    )


(
    KNIGHT_TGTS, KING_TGTS, ALFIL_TGTS, FERS_TGTS,
    ROOK_RAYS, DIAG_RAYS,
    PUSH_CW, PUSH_CCW, CAPS_CW, CAPS_CCW,
    PAWN_ATT_CW, PAWN_ATT_CCW,
) = _build_tables()

# Home files of the pawn columns, keyed by (color, travel direction); a
# pawn may double-step only from its own column's file (circular rules).
START_FILE = {(WHITE, 1): 5, (WHITE, -1): 2, (BLACK, 1): 13, (BLACK, -1): 10}
# A pawn promotes on reaching the home file of the opposing pawns it walks
# toward (circular rules only).
PROMO_FILE = {(WHITE, 1): 10, (WHITE, -1): 13, (BLACK, 1): 2, (BLACK, -1): 5}
PROMO_BASES = (QUEEN, ROOK, BISHOP, KNIGHT)


@dataclass(slots=True)
class Move:
    """One move: squares are internal indices, codes are signed piece codes.

    ``annihilated`` lists the own pawns removed by the annihilation rule as
    (square, code) pairs; it has length 0 or 2 per facing pair.
    """

    fsq: int
    tsq: int
    piece: int
    captured: int = 0
    capture_sq: int = -1
    promotion: int = 0
    is_en_passant: bool = False
    is_double_step: bool = False
    annihilated: tuple = ()

    @property
    def from_coord(self) -> Coord:
        return index_to_coord(self.fsq)

    @property
    def to_coord(self) -> Coord:
        return index_to_coord(self.tsq)

    @property
    def captured_piece(self) -> Optional[Piece]:
        return piece_from_code(self.captured)

    @property
    def promotion_kind(self) -> Optional[PieceKind]:
        if not self.promotion:
            return None
        return piece_from_code(self.promotion).kind

    @property
    def annihilated_pieces(self) -> list[tuple[Coord, Piece]]:
        return [(index_to_coord(s), piece_from_code(c)) for s, c in self.annihilated]

    @property
    def is_capture(self) -> bool:
        return self.captured != 0

    def __str__(self) -> str:
        return move_to_text(self)


@dataclass(slots=True)
class UndoToken:
    """Everything needed to restore the exact pre-move state."""

    move: Move
    prev_ep_sq: int
    prev_ep_victim: int
    prev_clock: int
    prev_last_irreversible: int
    prev_hash: int
    prev_stale: tuple
    prev_rep_counts: Optional[dict] = None
    post_hash: int = 0


_PROMO_SUFFIX = {QUEEN: "=Q", ROOK: "=R", BISHOP: "=B", KNIGHT: "=N"}
_SUFFIX_PROMO = {"Q": QUEEN, "R": ROOK, "B": BISHOP, "N": KNIGHT}


def move_to_text(m: Move) -> str:
    text = format_coord(index_to_coord(m.fsq)) + format_coord(index_to_coord(m.tsq))
    if m.promotion:
        text += _PROMO_SUFFIX[m.promotion]
    return text


def parse_move_text(text: str) -> tuple[int, int, int]:
    """Split move text into (from_sq, to_sq, promotion_base)."""
    promo = 0
    if "=" in text:
        text, _, suffix = text.partition("=")
        if suffix not in _SUFFIX_PROMO:
            raise IllegalMoveError(f"bad promotion suffix {suffix!r}")
        promo = _SUFFIX_PROMO[suffix]
    if len(text) != 4:
        raise IllegalMoveError(f"malformed move {text!r}")
    try:
        return (
            coord_to_index(parse_coord(text[:2])),
            coord_to_index(parse_coord(text[2:])),
            promo,
        )
    except ValueError as e:
        raise IllegalMoveError(f"malformed move {text!r}: {e}") from None


def find_move(p: Position, text: str) -> Move:
    """Resolve move text against the legal moves of a position."""
    fsq, tsq, promo = parse_move_text(text)
    for m in legal_moves(p):
        if m.fsq == fsq and m.tsq == tsq and m.promotion == promo:
            return m
    raise IllegalMoveError(f"illegal move {text!r}")


# ---------------------------------------------------------------------------
# Attack detection.


def _attacked(
    board: list[int], sq: int, by: Color, byz: bool, counts=None
) -> bool:
    """Attack probe; `counts` (when given) may overcount the board during
    make/unmake probes, which only costs a wasted scan, never a miss."""
    kn = KNIGHT * by
    if counts is None or counts[kn + 7]:
        for s in KNIGHT_TGTS[sq]:
            if board[s] == kn:
                return True
    kk = KING * by
    for s in KING_TGTS[sq]:
        if board[s] == kk:
            return True
    pc = PAWN_CW * by
    if counts is None or counts[pc + 7]:
        for s in PAWN_ATT_CW[sq]:
            if board[s] == pc:
                return True
    pc = PAWN_CCW * by
    if counts is None or counts[pc + 7]:
        for s in PAWN_ATT_CCW[sq]:
            if board[s] == pc:
                return True
    rk = ROOK * by
    qn = QUEEN * by
    bp = BISHOP * by
    if byz:
        if counts is None or counts[qn + 7]:
            for s in FERS_TGTS[sq]:
                if board[s] == qn:
                    return True
        if counts is None or counts[bp + 7]:
            for s in ALFIL_TGTS[sq]:
                if board[s] == bp:
                    return True
        if counts is None or counts[rk + 7]:
            for ray in ROOK_RAYS[sq]:
                for s in ray:
                    c = board[s]
                    if c:
                        if c == rk:
                            return True
                        break
    else:
        if counts is None or counts[rk + 7] or counts[qn + 7]:
            for ray in ROOK_RAYS[sq]:
                for s in ray:
                    c = board[s]
                    if c:
                        if c == rk or c == qn:
                            return True
                        break
        if counts is None or counts[bp + 7] or counts[qn + 7]:
            for ray in DIAG_RAYS[sq]:
                for s in ray:
                    c = board[s]
                    if c:
                        if c == bp or c == qn:
                            return True
                        break
    return False


def is_attacked(p: Position, target: Coord, by: Color) -> bool:
    """True iff any piece of `by` could capture on the target square."""
    return _attacked(p.board, coord_to_index(target), by, p.variant.is_byzantine, p.counts)


def in_check(p: Position, color: Optional[Color] = None) -> bool:
    if color is None:
        color = p.stm
    ksq = p.king_sq[0 if color == WHITE else 1]
    return _attacked(p.board, ksq, -color, p.variant.is_byzantine, p.counts)


# ---------------------------------------------------------------------------
# Annihilation bookkeeping.


def _pair_partner(board: list[int], stm: Color, base: int, tsq: int, fsq: int, cap_sq: int):
    """Facing partner of a pawn arriving on tsq, if any.

    A clockwise pawn on file f faces an own counterclockwise pawn on f+1
    (and vice versa): each blocks the other's forward square.
    """
    if base == PAWN_CW:
        partner = PUSH_CW[tsq]
        want = PAWN_CCW * stm
    else:
        partner = PUSH_CCW[tsq]
        want = PAWN_CW * stm
    if partner != fsq and partner != cap_sq and board[partner] == want:
        return ((tsq, base * stm), (partner, want))
    return ()


def _facing_pairs_after(board, stm: Color, fsq: int, tsq: int, arrival: int, cap_sq: int):
    """All facing own-pawn pairs present once the move has been made.

    Only needed when a position was set up with pairs already standing
    (annihilation toggled off and back on, or a hand-built position).
    """
    cw, ccw = PAWN_CW * stm, PAWN_CCW * stm

    def at(sq: int) -> int:
        if sq == tsq:
            return arrival
        if sq == fsq or sq == cap_sq:
            return 0
        return board[sq]

    pairs = []
    for sq in range(64):
        if at(sq) == cw:
            nxt = sq - (sq & 15) + ((sq + 1) & 15)
            if at(nxt) == ccw:
                pairs.append((sq, cw))
                pairs.append((nxt, ccw))
    return tuple(pairs)


# ---------------------------------------------------------------------------
# Pseudo-legal generation.


def _slide_ring_and_spokes(moves, board, stm, fsq, code) -> None:
    """Rook-pattern slides.  The two ring rays cover the same wrapped circle
    from opposite sides, so the second stops on reaching any square the
    first already visited: a slide is its target square, not its path.
    """
    rays = ROOK_RAYS[fsq]
    covered = set()
    for t in rays[0]:
        covered.add(t)
        tc = board[t]
        if tc == 0:
            moves.append(Move(fsq, t, code))
            continue
        if tc * stm < 0:
            moves.append(Move(fsq, t, code, tc, t))
        break
    for t in rays[1]:
        if t in covered:
            break
        tc = board[t]
        if tc == 0:
            moves.append(Move(fsq, t, code))
            continue
        if tc * stm < 0:
            moves.append(Move(fsq, t, code, tc, t))
        break
    for ray in rays[2:]:
        for t in ray:
            tc = board[t]
            if tc == 0:
                moves.append(Move(fsq, t, code))
                continue
            if tc * stm < 0:
                moves.append(Move(fsq, t, code, tc, t))
            break


def pseudo_legal_moves(p: Position) -> list[Move]:
    """Variant movement without the own-king-safety filter."""
    moves: list[Move] = []
    board = p.board
    stm = p.stm
    byz = p.variant.is_byzantine
    rules = p.rules
    ann_on = rules.annihilation
    stale = ann_on and p.stale_pairs[0 if stm == WHITE else 1]
    ep_sq = p.ep_sq

    for fsq in range(64):
        code = board[fsq]
        if code == 0:
            continue
        base = code * stm
        if base <= 0:
            continue
        if base == PAWN_CW or base == PAWN_CCW:
            d = 1 if base == PAWN_CW else -1
            push = PUSH_CW if d == 1 else PUSH_CCW
            promo_file = PROMO_FILE[(stm, d)] if rules.promotion else -1
            t = push[fsq]
            if board[t] == 0:
                if t & 15 == promo_file:
                    for pb in PROMO_BASES:
                        moves.append(Move(fsq, t, code, promotion=pb))
                else:
                    ann = _pair_partner(board, stm, base, t, fsq, -1) if ann_on else ()
                    moves.append(Move(fsq, t, code, annihilated=ann))
                    if rules.double_step and fsq & 15 == START_FILE[(stm, d)]:
                        t2 = push[t]
                        if board[t2] == 0:
                            ann = _pair_partner(board, stm, base, t2, fsq, -1) if ann_on else ()
                            moves.append(
                                Move(fsq, t2, code, is_double_step=True, annihilated=ann)
                            )
            caps = CAPS_CW[fsq] if d == 1 else CAPS_CCW[fsq]
            for t in caps:
                tc = board[t]
                if tc * stm < 0:
                    if t & 15 == promo_file:
                        for pb in PROMO_BASES:
                            moves.append(Move(fsq, t, code, tc, t, promotion=pb))
                    else:
                        ann = _pair_partner(board, stm, base, t, fsq, t) if ann_on else ()
                        moves.append(Move(fsq, t, code, tc, t, annihilated=ann))
                elif t == ep_sq and rules.en_passant:
                    vic = p.ep_victim
                    ann = _pair_partner(board, stm, base, t, fsq, vic) if ann_on else ()
                    moves.append(
                        Move(fsq, t, code, board[vic], vic, is_en_passant=True, annihilated=ann)
                    )
        elif base == KNIGHT:
            for t in KNIGHT_TGTS[fsq]:
                tc = board[t]
                if tc * stm <= 0:
                    moves.append(Move(fsq, t, code, tc, t if tc else -1))
        elif base == KING:
            for t in KING_TGTS[fsq]:
                tc = board[t]
                if tc * stm <= 0:
                    moves.append(Move(fsq, t, code, tc, t if tc else -1))
        elif base == ROOK:
            _slide_ring_and_spokes(moves, board, stm, fsq, code)
        elif base == BISHOP:
            if byz:
                for t in ALFIL_TGTS[fsq]:
                    tc = board[t]
                    if tc * stm <= 0:
                        moves.append(Move(fsq, t, code, tc, t if tc else -1))
            else:
                for ray in DIAG_RAYS[fsq]:
                    for t in ray:
                        tc = board[t]
                        if tc == 0:
                            moves.append(Move(fsq, t, code))
                            continue
                        if tc * stm < 0:
                            moves.append(Move(fsq, t, code, tc, t))
                        break
        else:  # queen
            if byz:
                for t in FERS_TGTS[fsq]:
                    tc = board[t]
                    if tc * stm <= 0:
                        moves.append(Move(fsq, t, code, tc, t if tc else -1))
            else:
                _slide_ring_and_spokes(moves, board, stm, fsq, code)
                for ray in DIAG_RAYS[fsq]:
                    for t in ray:
                        tc = board[t]
                        if tc == 0:
                            moves.append(Move(fsq, t, code))
                            continue
                        if tc * stm < 0:
                            moves.append(Move(fsq, t, code, tc, t))
                        break

    if stale:
        for m in moves:
            arrival = stm * m.promotion if m.promotion else m.piece
            m.annihilated = _facing_pairs_after(
                board, stm, m.fsq, m.tsq, arrival, m.capture_sq
            )
    return moves


def _king_safe_after(p: Position, m: Move) -> bool:
    """Board-only make/test/unmake: does the move leave the mover's king safe?

    Annihilation removals are part of the move, so a pawn push whose pair
    removal opens a rook line onto the own king is illegal.
    """
    board = p.board
    stm = p.stm
    captured = m.captured
    arrival = stm * m.promotion if m.promotion else m.piece
    board[m.fsq] = 0
    if captured:
        board[m.capture_sq] = 0
    board[m.tsq] = arrival
    for s, _ in m.annihilated:
        board[s] = 0
    if m.piece * stm == KING:
        ksq = m.tsq
    else:
        ksq = p.king_sq[0 if stm == WHITE else 1]
    safe = not _attacked(board, ksq, -stm, p.variant.is_byzantine, p.counts)
    for s, c in m.annihilated:
        if s != m.tsq:
            board[s] = c
    board[m.tsq] = 0
    if captured:
        board[m.capture_sq] = captured
    board[m.fsq] = m.piece
    return safe


def legal_moves(p: Position) -> list[Move]:
    return [m for m in pseudo_legal_moves(p) if _king_safe_after(p, m)]


# ---------------------------------------------------------------------------
# Fast legal-move counting (mobility evaluation).


def _pinned_squares(board: list[int], ksq: int, own: Color, byz: bool) -> list[int]:
    """Squares of own pieces that shield the king from an enemy slider."""
    pinned = []
    rk = -own * ROOK
    qn = -own * QUEEN
    for ray in ROOK_RAYS[ksq]:
        shield = -1
        for s in ray:
            c = board[s]
            if c == 0:
                continue
            if shield < 0:
                if c * own > 0:
                    shield = s
                    continue
                break
            if c == rk or (not byz and c == qn):
                pinned.append(shield)
            break
    if not byz:
        bp = -own * BISHOP
        for ray in DIAG_RAYS[ksq]:
            shield = -1
            for s in ray:
                c = board[s]
                if c == 0:
                    continue
                if shield < 0:
                    if c * own > 0:
                        shield = s
                        continue
                    break
                if c == bp or c == qn:
                    pinned.append(shield)
                break
    return pinned


def _raw_safe(board, stm, byz, ksq, fsq, tsq, piece, captured, cap_sq, ann, counts) -> bool:
    """Minimal make/test/unmake king-safety probe for non-king moves."""
    board[fsq] = 0
    if captured:
        board[cap_sq] = 0
    board[tsq] = piece
    for s, _ in ann:
        board[s] = 0
    safe = not _attacked(board, ksq, -stm, byz, counts)
    for s, c in ann:
        if s != tsq:
            board[s] = c
    board[tsq] = 0
    if captured:
        board[cap_sq] = captured
    board[fsq] = piece
    return safe


def count_legal_moves(p: Position, color: Color) -> int:
    """Legal moves `color` would have if it were on turn.

    En-passant rights never transfer to the side not on turn, so they are
    masked while counting for the opponent.
    """
    if p.stm == color:
        return _count_legal_stm(p)
    saved_ep, saved_vic = p.ep_sq, p.ep_victim
    p.stm, p.ep_sq, p.ep_victim = color, -1, -1
    try:
        return _count_legal_stm(p)
    finally:
        p.stm, p.ep_sq, p.ep_victim = -color, saved_ep, saved_vic


def _count_legal_stm(p: Position) -> int:
    """Count without building Move objects.

    Only king steps, pinned pieces, en passant, and annihilation-triggering
    pawn moves can be illegal once the king is known to be out of check, so
    everything else counts without a probe.
    """
    board = p.board
    stm = p.stm
    byz = p.variant.is_byzantine
    stm_idx = 0 if stm == WHITE else 1
    ksq = p.king_sq[stm_idx]
    rules = p.rules
    ann_on = rules.annihilation
    counts = p.counts
    if (ann_on and p.stale_pairs[stm_idx]) or _attacked(board, ksq, -stm, byz, counts):
        return sum(1 for m in pseudo_legal_moves(p) if _king_safe_after(p, m))
    pinned = _pinned_squares(board, ksq, stm, byz)
    n = 0
    for fsq in range(64):
        code = board[fsq]
        if code == 0:
            continue
        base = code * stm
        if base <= 0:
            continue
        if base == PAWN_CW or base == PAWN_CCW:
            d = 1 if base == PAWN_CW else -1
            push = PUSH_CW if d == 1 else PUSH_CCW
            promo_file = PROMO_FILE[(stm, d)] if rules.promotion else -1
            opp_code = stm * (PAWN_CCW if d == 1 else PAWN_CW)
            risky = fsq in pinned
            t = push[fsq]
            if board[t] == 0:
                promo = (t & 15) == promo_file
                partner = push[t]
                if ann_on and not promo and board[partner] == opp_code and partner != fsq:
                    ann = ((t, code), (partner, opp_code))
                else:
                    ann = ()
                gain = 4 if promo else 1
                if not (risky or ann) or _raw_safe(
                    board, stm, byz, ksq, fsq, t, code, 0, -1, ann, counts
                ):
                    n += gain
                if rules.double_step and (fsq & 15) == START_FILE[(stm, d)]:
                    t2 = push[t]
                    if board[t2] == 0:
                        partner = push[t2]
                        if ann_on and board[partner] == opp_code and partner != fsq:
                            ann2 = ((t2, code), (partner, opp_code))
                        else:
                            ann2 = ()
                        if not (risky or ann2) or _raw_safe(
                            board, stm, byz, ksq, fsq, t2, code, 0, -1, ann2, counts
                        ):
                            n += 1
            caps = CAPS_CW[fsq] if d == 1 else CAPS_CCW[fsq]
            for t in caps:
                tc = board[t]
                if tc * stm < 0:
                    promo = (t & 15) == promo_file
                    partner = push[t]
                    if (
                        ann_on
                        and not promo
                        and board[partner] == opp_code
                        and partner != fsq
                        and partner != t
                    ):
                        ann = ((t, code), (partner, opp_code))
                    else:
                        ann = ()
                    gain = 4 if promo else 1
                    if not (risky or ann) or _raw_safe(
                        board, stm, byz, ksq, fsq, t, code, tc, t, ann, counts
                    ):
                        n += gain
                elif t == p.ep_sq and rules.en_passant:
                    vic = p.ep_victim
                    ann = (
                        _pair_partner(board, stm, base, t, fsq, vic) if ann_on else ()
                    )
                    if _raw_safe(
                        board, stm, byz, ksq, fsq, t, code, board[vic], vic, ann, counts
                    ):
                        n += 1
        elif base == KING:
            board[fsq] = 0
            for t in KING_TGTS[fsq]:
                if board[t] * stm <= 0 and not _attacked(board, t, -stm, byz, counts):
                    n += 1
            board[fsq] = code
        elif base == KNIGHT:
            if fsq in pinned:
                for t in KNIGHT_TGTS[fsq]:
                    tc = board[t]
                    if tc * stm <= 0 and _raw_safe(
                        board, stm, byz, ksq, fsq, t, code, tc, t if tc else -1, (), counts
                    ):
                        n += 1
            else:
                for t in KNIGHT_TGTS[fsq]:
                    if board[t] * stm <= 0:
                        n += 1
        elif base == ROOK:
            risky = fsq in pinned
            n += _count_ring_and_spokes(
                board, stm, byz, ksq, fsq, code, risky, counts
            )
        elif base == BISHOP:
            if byz:
                if fsq in pinned:
                    for t in ALFIL_TGTS[fsq]:
                        tc = board[t]
                        if tc * stm <= 0 and _raw_safe(
                            board, stm, byz, ksq, fsq, t, code, tc, t if tc else -1, (), counts
                        ):
                            n += 1
                else:
                    for t in ALFIL_TGTS[fsq]:
                        if board[t] * stm <= 0:
                            n += 1
            else:
                risky = fsq in pinned
                for ray in DIAG_RAYS[fsq]:
                    for t in ray:
                        tc = board[t]
                        if tc == 0:
                            if not risky or _raw_safe(
                                board, stm, byz, ksq, fsq, t, code, 0, -1, (), counts
                            ):
                                n += 1
                            continue
                        if tc * stm < 0:
                            if not risky or _raw_safe(
                                board, stm, byz, ksq, fsq, t, code, tc, t, (), counts
                            ):
                                n += 1
                        break
        else:  # queen
            if byz:
                if fsq in pinned:
                    for t in FERS_TGTS[fsq]:
                        tc = board[t]
                        if tc * stm <= 0 and _raw_safe(
                            board, stm, byz, ksq, fsq, t, code, tc, t if tc else -1, (), counts
                        ):
                            n += 1
                else:
                    for t in FERS_TGTS[fsq]:
                        if board[t] * stm <= 0:
                            n += 1
            else:
                risky = fsq in pinned
                n += _count_ring_and_spokes(
                    board, stm, byz, ksq, fsq, code, risky, counts
                )
                for ray in DIAG_RAYS[fsq]:
                    for t in ray:
                        tc = board[t]
                        if tc == 0:
                            if not risky or _raw_safe(
                                board, stm, byz, ksq, fsq, t, code, 0, -1, (), counts
                            ):
                                n += 1
                            continue
                        if tc * stm < 0:
                            if not risky or _raw_safe(
                                board, stm, byz, ksq, fsq, t, code, tc, t, (), counts
                            ):
                                n += 1
                        break
    return n


def _count_ring_and_spokes(board, stm, byz, ksq, fsq, code, risky, counts) -> int:
    """Rook-slide counting with the wrapped-ring dedup (see the generator)."""
    rays = ROOK_RAYS[fsq]
    n = 0
    covered = set()
    for t in rays[0]:
        covered.add(t)
        tc = board[t]
        if tc == 0:
            if not risky or _raw_safe(board, stm, byz, ksq, fsq, t, code, 0, -1, (), counts):
                n += 1
            continue
        if tc * stm < 0:
            if not risky or _raw_safe(board, stm, byz, ksq, fsq, t, code, tc, t, (), counts):
                n += 1
        break
    for t in rays[1]:
        if t in covered:
            break
        tc = board[t]
        if tc == 0:
            if not risky or _raw_safe(board, stm, byz, ksq, fsq, t, code, 0, -1, (), counts):
                n += 1
            continue
        if tc * stm < 0:
            if not risky or _raw_safe(board, stm, byz, ksq, fsq, t, code, tc, t, (), counts):
                n += 1
        break
    for ray in rays[2:]:
        for t in ray:
            tc = board[t]
            if tc == 0:
                if not risky or _raw_safe(board, stm, byz, ksq, fsq, t, code, 0, -1, (), counts):
                    n += 1
                continue
            if tc * stm < 0:
                if not risky or _raw_safe(board, stm, byz, ksq, fsq, t, code, tc, t, (), counts):
                    n += 1
            break
    return n


def noisy_moves(p: Position) -> list[Move]:
    """Material-changing moves: captures, en passant, capture promotions,
    and quiet pawn moves that trigger annihilation."""
    stm = p.stm
    stm_idx = 0 if stm == WHITE else 1
    if p.rules.annihilation and p.stale_pairs[stm_idx]:
        return [m for m in pseudo_legal_moves(p) if m.captured or m.annihilated]
    moves: list[Move] = []
    board = p.board
    byz = p.variant.is_byzantine
    rules = p.rules
    ann_on = rules.annihilation
    ep_sq = p.ep_sq
    for fsq in range(64):
        code = board[fsq]
        if code == 0:
            continue
        base = code * stm
        if base <= 0:
            continue
        if base == PAWN_CW or base == PAWN_CCW:
            d = 1 if base == PAWN_CW else -1
            push = PUSH_CW if d == 1 else PUSH_CCW
            promo_file = PROMO_FILE[(stm, d)] if rules.promotion else -1
            t = push[fsq]
            if board[t] == 0:
                if (t & 15) == promo_file:
                    # Quiet promotions change material like captures do.
                    for pb in PROMO_BASES:
                        moves.append(Move(fsq, t, code, promotion=pb))
                elif ann_on:
                    ann = _pair_partner(board, stm, base, t, fsq, -1)
                    if ann:
                        moves.append(Move(fsq, t, code, annihilated=ann))
                    if rules.double_step and (fsq & 15) == START_FILE[(stm, d)]:
                        t2 = push[t]
                        if board[t2] == 0:
                            ann2 = _pair_partner(board, stm, base, t2, fsq, -1)
                            if ann2:
                                moves.append(
                                    Move(fsq, t2, code, is_double_step=True, annihilated=ann2)
                                )
            caps = CAPS_CW[fsq] if d == 1 else CAPS_CCW[fsq]
            for t in caps:
                tc = board[t]
                if tc * stm < 0:
                    if (t & 15) == promo_file:
                        for pb in PROMO_BASES:
                            moves.append(Move(fsq, t, code, tc, t, promotion=pb))
                    else:
                        ann = _pair_partner(board, stm, base, t, fsq, t) if ann_on else ()
                        moves.append(Move(fsq, t, code, tc, t, annihilated=ann))
                elif t == ep_sq and rules.en_passant:
                    vic = p.ep_victim
                    ann = _pair_partner(board, stm, base, t, fsq, vic) if ann_on else ()
                    moves.append(
                        Move(fsq, t, code, board[vic], vic, is_en_passant=True, annihilated=ann)
                    )
        elif base == KNIGHT or base == KING:
            tgts = KNIGHT_TGTS[fsq] if base == KNIGHT else KING_TGTS[fsq]
            for t in tgts:
                tc = board[t]
                if tc * stm < 0:
                    moves.append(Move(fsq, t, code, tc, t))
        elif base == ROOK or (not byz and base == QUEEN) or (not byz and base == BISHOP):
            if base == BISHOP:
                ray_groups = (DIAG_RAYS[fsq],)
            else:
                # Ring rays wrap: the same target can be reached both ways,
                # so the second ring ray skips a blocker the first captured.
                rays = ROOK_RAYS[fsq]
                first_block = -1
                for t in rays[0]:
                    tc = board[t]
                    if tc == 0:
                        continue
                    if tc * stm < 0:
                        moves.append(Move(fsq, t, code, tc, t))
                    first_block = t
                    break
                for t in rays[1]:
                    tc = board[t]
                    if tc == 0:
                        continue
                    if tc * stm < 0 and t != first_block:
                        moves.append(Move(fsq, t, code, tc, t))
                    break
                ray_groups = (rays[2:],) if base == ROOK else (rays[2:], DIAG_RAYS[fsq])
            for rays_group in ray_groups:
                for ray in rays_group:
                    for t in ray:
                        tc = board[t]
                        if tc == 0:
                            continue
                        if tc * stm < 0:
                            moves.append(Move(fsq, t, code, tc, t))
                        break
        else:  # byzantine bishop (alfil) or queen (fers)
            tgts = ALFIL_TGTS[fsq] if base == BISHOP else FERS_TGTS[fsq]
            for t in tgts:
                tc = board[t]
                if tc * stm < 0:
                    moves.append(Move(fsq, t, code, tc, t))
    return moves


# ---------------------------------------------------------------------------
# Apply / undo.


def apply_move(p: Position, m: Move, validated: bool = False) -> UndoToken:
    """Make a move on the position in place and return its undo token.

    Callers outside the search pass moves straight from
    :func:`legal_moves`; with ``validated`` unset the move is re-checked
    and an :class:`IllegalMoveError` names the reason.
    """
    board = p.board
    stm = p.stm
    if not validated:
        if m.piece * stm <= 0:
            raise IllegalMoveError("wrong turn")
        if board[m.fsq] != m.piece:
            raise IllegalMoveError("no such piece on the origin square")
        if not _king_safe_after(p, m):
            raise IllegalMoveError("leaves king in check")
    tok = UndoToken(
        m,
        p.ep_sq,
        p.ep_victim,
        p.no_capture_clock,
        p.last_irreversible,
        p.hash,
        (p.stale_pairs[0], p.stale_pairs[1]),
    )
    h = p.hash
    counts = p.counts
    stm_idx = 0 if stm == WHITE else 1
    captured = m.captured
    if captured:
        board[m.capture_sq] = 0
        h ^= PIECE_KEYS[captured + 7][m.capture_sq]
        counts[captured + 7] -= 1
        p.side_counts[1 - stm_idx] -= 1
    board[m.fsq] = 0
    h ^= PIECE_KEYS[m.piece + 7][m.fsq]
    arrival = stm * m.promotion if m.promotion else m.piece
    board[m.tsq] = arrival
    h ^= PIECE_KEYS[arrival + 7][m.tsq]
    if m.promotion:
        counts[m.piece + 7] -= 1
        counts[arrival + 7] += 1
    base = m.piece * stm
    if base == KING:
        p.king_sq[stm_idx] = m.tsq
    for s, c in m.annihilated:
        board[s] = 0
        h ^= PIECE_KEYS[c + 7][s]
        counts[c + 7] -= 1
        p.side_counts[stm_idx] -= 1
    if p.ep_sq >= 0:
        h ^= EP_KEYS[p.ep_sq]
    if m.is_double_step:
        mid = m.fsq - (m.fsq & 15) + (((m.fsq & 15) + (1 if base == PAWN_CW else -1)) & 15)
        p.ep_sq = mid
        p.ep_victim = m.tsq
        h ^= EP_KEYS[mid]
    else:
        p.ep_sq = -1
        p.ep_victim = -1
    if captured or m.annihilated:
        p.no_capture_clock = 0
    else:
        p.no_capture_clock += 1
    if stm == BLACK:
        p.fullmove += 1
    p.stm = -stm
    h ^= SIDE_KEY
    p.hash = h
    p.history.append(h)
    if captured or m.annihilated or base == PAWN_CW or base == PAWN_CCW:
        p.last_irreversible = len(p.history) - 1
        tok.prev_rep_counts = p.rep_counts
        p.rep_counts = {h: 1}
    else:
        rep = p.rep_counts
        rep[h] = rep.get(h, 0) + 1
    if p.rules.annihilation:
        # All of the mover's facing pairs were just resolved.
        p.stale_pairs[stm_idx] = False
    tok.post_hash = h
    return tok


def undo_move(p: Position, tok: UndoToken) -> None:
    """Restore the exact state prior to the matching apply_move."""
    if p.hash != tok.post_hash or p.history[-1] != tok.post_hash:
        raise StaleUndoError("undo token does not match the current position")
    m = tok.move
    board = p.board
    p.stm = -p.stm
    stm = p.stm
    stm_idx = 0 if stm == WHITE else 1
    if stm == BLACK:
        p.fullmove -= 1
    counts = p.counts
    for s, c in m.annihilated:
        if s != m.tsq:
            board[s] = c
        counts[c + 7] += 1
        p.side_counts[stm_idx] += 1
    arrival = stm * m.promotion if m.promotion else m.piece
    if m.promotion:
        counts[arrival + 7] -= 1
        counts[m.piece + 7] += 1
    board[m.tsq] = 0
    if m.captured:
        board[m.capture_sq] = m.captured
        counts[m.captured + 7] += 1
        p.side_counts[1 - stm_idx] += 1
    board[m.fsq] = m.piece
    if m.piece * stm == KING:
        p.king_sq[stm_idx] = m.fsq
    p.ep_sq = tok.prev_ep_sq
    p.ep_victim = tok.prev_ep_victim
    p.no_capture_clock = tok.prev_clock
    p.last_irreversible = tok.prev_last_irreversible
    p.history.pop()
    p.hash = tok.prev_hash
    if tok.prev_rep_counts is not None:
        p.rep_counts = tok.prev_rep_counts
    else:
        rep = p.rep_counts
        n = rep[tok.post_hash] - 1
        if n:
            rep[tok.post_hash] = n
        else:
            del rep[tok.post_hash]
    p.stale_pairs[0] = tok.prev_stale[0]
    p.stale_pairs[1] = tok.prev_stale[1]


def perft(p: Position, depth: int) -> int:
    """Legal-move-tree leaf count; annihilation is part of its causing move."""
    if depth <= 0:
        return 1
    total = 0
    for m in pseudo_legal_moves(p):
        if not _king_safe_after(p, m):
            continue
        if depth == 1:
            total += 1
            continue
        tok = apply_move(p, m, validated=True)
        total += perft(p, depth - 1)
        undo_move(p, tok)
    return total


def mirror_position(p: Position, flip_side_to_move: bool = True) -> Position:
    """Color-reflect a position: files f -> 15-f, colors and pawn directions
    swapped, so the camps exchange places.

    With ``flip_side_to_move`` the mover's army is mirrored too and the
    legal move sets correspond one-to-one; without it the same side is on
    turn facing the exchanged armies, which negates zero-sum evaluations.
    """
    board = [0] * 64
    for sq, code in enumerate(p.board):
        if code == 0:
            continue
        base = abs(code)
        if base == PAWN_CW:
            mbase = PAWN_CCW
        elif base == PAWN_CCW:
            mbase = PAWN_CW
        else:
            mbase = base
        msq = (sq & 48) + (15 - (sq & 15))
        board[msq] = -mbase if code > 0 else mbase
    stm = -p.stm if flip_side_to_move else p.stm
    mirrored = Position(p.variant, board, stm, p.rules)
    if p.ep_sq >= 0 and flip_side_to_move:
        mirrored.ep_sq = (p.ep_sq & 48) + (15 - (p.ep_sq & 15))
        mirrored.ep_victim = (p.ep_victim & 48) + (15 - (p.ep_victim & 15))
        mirrored.hash = compute_hash(mirrored)
        mirrored.history = [mirrored.hash]
    return mirrored
