"""Retrograde solver for pawnless 3- and 4-piece Byzantine endings.

States are canonicalized by rotating the white king to file 0 and, when it
sits on the outer two rings, reflecting radially; both symmetries act
freely (no board square is fixed and there is only one white king), so the
quotient is exact and probe results are invariant under them.

Captures in these tables always bare the opponent, so every capture leads
straight to an adjudicated finish (win, or a riposte draw); the solve
therefore closes over a single material set: value propagation runs only
along non-capture moves, with captures folded in as immediate outcomes.
Values ignore the repetition rule, as usual for distance-to-terminal
tables: positions where neither side can force a finish are draws anyway.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from collections import deque
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from .board import (
    BISHOP,
    BLACK,
    Color,
    KING,
    KNIGHT,
    PieceKind,
    Position,
    QUEEN,
    RuleConfig,
    Variant,
    WHITE,
    _BASE_OF_KIND,
    index_to_coord,
    piece_from_code,
)
from .movegen import (
    ALFIL_TGTS,
    FERS_TGTS,
    KING_TGTS,
    KNIGHT_TGTS,
    ROOK_RAYS,
    _attacked,
    _king_safe_after,
    apply_move,
    count_legal_moves,
    noisy_moves,
    undo_move,
)

_UNKNOWN, _DRAW, _WIN, _LOSS, _ILLEGAL = 0, 1, 2, 3, 4

_FILE_MAGIC = "ZTB1"


class OracleError(ValueError):
    pass


class ValueKind(Enum):
    WIN = "win"
    LOSS = "loss"
    DRAW = "draw"


@dataclass(frozen=True)
class OracleValue:
    """Game-theoretic value from the mover's perspective.

    Win distances are minimal, loss distances maximal (best resistance),
    both in plies to the adjudicated end of the game.
    """

    kind: ValueKind
    dtm: Optional[int] = None

    def __str__(self) -> str:
        if self.kind is ValueKind.DRAW:
            return "draw"
        return f"{self.kind.value}({self.dtm})"


WIN_VALUE = ValueKind.WIN
LOSS_VALUE = ValueKind.LOSS
DRAW_VALUE = ValueKind.DRAW


@dataclass(frozen=True)
class OracleState:
    """Up to four pieces (both kings included) plus the side to move."""

    pieces: tuple
    side_to_move: Color

    @property
    def pending_bare(self) -> bool:
        """True when the mover is freshly bare against an armed opponent:
        the riposte window the adjudicator resolves by one-ply lookahead."""
        stm_has = opp_has = 0
        for _, piece in self.pieces:
            if piece.color == self.side_to_move:
                stm_has += 1
            else:
                opp_has += 1
        return stm_has == 1 and opp_has > 1


def _material_name(white_extra, black_extra) -> str:
    letters = {
        PieceKind.QUEEN: "Q",
        PieceKind.ROOK: "R",
        PieceKind.BISHOP: "B",
        PieceKind.KNIGHT: "N",
    }
    w = "K" + "".join(letters[k] for k in white_extra)
    b = "K" + "".join(letters[k] for k in black_extra)
    return f"{w}v{b}"


def parse_material(name: str) -> tuple[list[PieceKind], list[PieceKind]]:
    """Parse a material string such as 'KNvKB' into per-color extras."""
    try:
        w, b = name.upper().split("V")
    except ValueError:
        raise OracleError(f"bad material name {name!r}") from None
    kinds = {"Q": PieceKind.QUEEN, "R": PieceKind.ROOK, "B": PieceKind.BISHOP, "N": PieceKind.KNIGHT}
    out = []
    for side in (w, b):
        if not side.startswith("K"):
            raise OracleError(f"each side needs a king in {name!r}")
        extras = []
        for ch in side[1:]:
            if ch == "P" or ch == "S":
                raise OracleError("pawn endings are not supported")
            if ch not in kinds:
                raise OracleError(f"unknown piece letter {ch!r} in {name!r}")
            extras.append(kinds[ch])
        out.append(extras)
    return out[0], out[1]


def _canonical(squares: list[int], twin_slots) -> tuple[int, ...]:
    """Rotate the white king (squares[0]) to file 0; reflect to rings 1-2."""
    rot = squares[0] & 15
    if rot:
        squares = [sq - (sq & 15) + (((sq & 15) - rot) & 15) for sq in squares]
    if squares[0] >= 32:
        squares = [(3 - (sq >> 4)) * 16 + (sq & 15) for sq in squares]
    for a, b in twin_slots:
        if squares[a] > squares[b]:
            squares[a], squares[b] = squares[b], squares[a]
    return tuple(squares)


class OracleTable:
    """Solved table for one material set; probe is read-only and shareable."""

    def __init__(self, variant: Variant, white_extra, black_extra):
        if not variant.is_byzantine:
            raise OracleError("only the Byzantine games have closed material")
        for kind in list(white_extra) + list(black_extra):
            if kind in (PieceKind.PAWN, PieceKind.KING):
                raise OracleError("material lists the non-king, non-pawn extras")
        if len(white_extra) + len(black_extra) > 2:
            raise OracleError("at most 4 pieces including kings")
        self.variant = variant
        self.white_extra = tuple(white_extra)
        self.black_extra = tuple(black_extra)
        self.material = _material_name(white_extra, black_extra)
        # Piece slots: white king, black king, white extras, black extras.
        self.codes = (
            [KING, -KING]
            + [_BASE_OF_KIND[k] for k in white_extra]
            + [-_BASE_OF_KIND[k] for k in black_extra]
        )
        self.n_pieces = len(self.codes)
        self.twin_slots = [
            (i, j)
            for i in range(2, self.n_pieces)
            for j in range(i + 1, self.n_pieces)
            if self.codes[i] == self.codes[j]
        ]
        self.size = 2 * (64 ** (self.n_pieces - 1)) * 2
        self.values = np.full(self.size, _ILLEGAL, dtype=np.uint8)
        self.dtm = np.zeros(self.size, dtype=np.uint16)
        self.solved = False

    # -- indexing ----------------------------------------------------------

    def index_of(self, squares, stm: Color) -> int:
        """Flat index of a canonical square tuple (white king first)."""
        sq = _canonical(list(squares), self.twin_slots)
        idx = sq[0] >> 4  # 0 or 1 after canonicalization
        for s in sq[1:]:
            idx = idx * 64 + s
        return idx * 2 + (0 if stm == WHITE else 1)

    def decode(self, idx: int) -> tuple[list[int], Color]:
        stm = WHITE if idx % 2 == 0 else BLACK
        idx //= 2
        squares = []
        for _ in range(self.n_pieces - 1):
            squares.append(idx % 64)
            idx //= 64
        squares.reverse()
        squares.insert(0, idx * 16)  # white king: ring slot, file 0
        return squares, stm

    def state_of(self, idx: int) -> OracleState:
        squares, stm = self.decode(idx)
        pieces = tuple(
            (index_to_coord(sq), piece_from_code(code))
            for sq, code in zip(squares, self.codes)
        )
        return OracleState(pieces=pieces, side_to_move=stm)

    def index_of_state(self, state: OracleState) -> int:
        by_code: dict[int, list[int]] = {}
        from .board import code_from_piece, coord_to_index

        for coord, piece in state.pieces:
            by_code.setdefault(code_from_piece(piece), []).append(
                coord_to_index(coord)
            )
        squares = []
        for code in self.codes:
            bucket = by_code.get(code)
            if not bucket:
                raise OracleError(
                    f"state material does not match table {self.material}"
                )
            squares.append(bucket.pop(0))
        if any(bucket for bucket in by_code.values()):
            raise OracleError(f"state material does not match table {self.material}")
        return self.index_of(squares, state.side_to_move)

    # -- probing -----------------------------------------------------------

    def probe_index(self, idx: int) -> OracleValue:
        v = self.values[idx]
        if v == _ILLEGAL:
            raise OracleError("illegal or out-of-table state")
        if v == _DRAW:
            return OracleValue(ValueKind.DRAW)
        kind = ValueKind.WIN if v == _WIN else ValueKind.LOSS
        return OracleValue(kind, int(self.dtm[idx]))

    def probe(self, state: OracleState) -> OracleValue:
        if not self.solved:
            raise OracleError("table not solved")
        return self.probe_index(self.index_of_state(state))

    def legal_indices(self) -> np.ndarray:
        return np.nonzero(self.values != _ILLEGAL)[0]

    def summary(self) -> dict:
        legal = self.values != _ILLEGAL
        n_legal = int(legal.sum())
        draws = int((self.values == _DRAW).sum())
        wins = int((self.values == _WIN).sum())
        losses = int((self.values == _LOSS).sum())
        return {
            "material": self.material,
            "legal_states": n_legal,
            "draws": draws,
            "wins_for_side_to_move": wins,
            "losses_for_side_to_move": losses,
            "draw_fraction": round(draws / n_legal, 6) if n_legal else 0.0,
            "max_dtm": int(self.dtm.max()) if n_legal else 0,
        }

    # -- persistence ---------------------------------------------------------

    def save(self, path: str) -> str:
        """Flat binary: one JSON header line, then one value byte per state.

        Byte encoding (documented here and in the header): 0 illegal,
        1 draw, 2+n win in n plies, 130+n loss in n plies.
        """
        win_mask = self.values == _WIN
        loss_mask = self.values == _LOSS
        if win_mask.any() and int(self.dtm[win_mask].max()) > 120:
            raise OracleError("win distance exceeds the byte encoding")
        if loss_mask.any() and int(self.dtm[loss_mask].max()) > 120:
            raise OracleError("loss distance exceeds the byte encoding")
        enc = np.zeros(self.size, dtype=np.uint8)
        enc[self.values == _DRAW] = 1
        enc[win_mask] = 2 + self.dtm[win_mask]
        enc[loss_mask] = 130 + self.dtm[loss_mask]
        header = {
            "magic": _FILE_MAGIC,
            "version": 1,
            "variant": self.variant.value,
            "material": self.material,
            "index": "(((wk_ring*64+sq1)*64+...)*2+stm); slots: WK,BK,"
            + ",".join(
                piece_from_code(c).kind.value for c in self.codes[2:]
            )
            + "; WK canonical at file 0, rings 1-2; twins sorted ascending",
            "byte": "0=illegal 1=draw 2+n=win(n plies) 130+n=loss(n plies)",
            "states": self.size,
        }
        try:
            with open(path, "wb") as f:
                f.write((json.dumps(header, sort_keys=True) + "\n").encode())
                f.write(enc.tobytes())
        except OSError as e:
            raise OSError(f"cannot write table to {path}: {e}") from e
        return path

    @classmethod
    def load(cls, path: str) -> "OracleTable":
        try:
            with open(path, "rb") as f:
                header = json.loads(f.readline().decode())
                raw = f.read()
        except OSError as e:
            raise OSError(f"cannot read table from {path}: {e}") from e
        if header.get("magic") != _FILE_MAGIC:
            raise OracleError(f"{path} is not an oracle table")
        white_extra, black_extra = parse_material(header["material"])
        table = cls(Variant(header["variant"]), white_extra, black_extra)
        enc = np.frombuffer(raw, dtype=np.uint8)
        if enc.size != table.size:
            raise OracleError("table size mismatch")
        table.values = np.full(table.size, _ILLEGAL, dtype=np.uint8)
        table.dtm = np.zeros(table.size, dtype=np.uint16)
        table.values[enc == 1] = _DRAW
        win = (enc >= 2) & (enc < 130)
        loss = enc >= 130
        table.values[win] = _WIN
        table.dtm[win] = enc[win] - 2
        table.values[loss] = _LOSS
        table.dtm[loss] = enc[loss] - 130
        table.solved = True
        return table


class _Scratch:
    """One mutable Position reused for every enumerated state."""

    def __init__(self, table: OracleTable):
        rules = RuleConfig.for_variant(table.variant).replaced(
            threefold_repetition_draw=False
        )
        board = [0] * 64
        # Seed with the right material on arbitrary distinct squares.
        for sq, code in enumerate(table.codes):
            board[sq] = code
        self.pos = Position(table.variant, board, WHITE, rules)
        self.codes = table.codes
        self.occupied = list(range(len(table.codes)))

    def set_state(self, squares, stm: Color) -> Position:
        pos = self.pos
        board = pos.board
        for sq in self.occupied:
            board[sq] = 0
        for sq, code in zip(squares, self.codes):
            board[sq] = code
        self.occupied = list(squares)
        pos.stm = stm
        pos.king_sq[0] = squares[0]
        pos.king_sq[1] = squares[1]
        return pos


def _classify_terminal(pos: Position, captures: list, n_legal: int) -> Optional[int]:
    """Adjudicate a state; None when the game goes on.

    Mirrors the adjudicator's ladder: mate/stalemate first, then the
    bare-king rule with its riposte escape.
    """
    stm = pos.stm
    if n_legal == 0:
        return _LOSS  # mated, or stalemate-lost under Byzantine rules
    stm_bare = pos.piece_count(stm) == 1
    opp_bare = pos.piece_count(-stm) == 1
    if stm_bare and opp_bare:
        return _DRAW
    if stm_bare:
        if pos.piece_count(-stm) == 2 and captures:
            return _DRAW  # riposte: take the last piece, two bare kings
        return _LOSS
    return None


def _legal_captures(pos: Position) -> list:
    return [m for m in noisy_moves(pos) if _king_safe_after(pos, m)]


def solve(
    material: "str | tuple",
    variant: Variant = Variant.BYZANTINE_REGULAR,
    progress: bool = False,
) -> OracleTable:
    """Solve a pawnless material set by backward induction.

    `material` is either a name like 'KNvKB' or a (white_extras,
    black_extras) pair of PieceKind lists.
    """
    if isinstance(material, str):
        white_extra, black_extra = parse_material(material)
    else:
        white_extra, black_extra = material
    table = OracleTable(variant, white_extra, black_extra)
    values = table.values
    dtm = table.dtm
    counts = np.zeros(table.size, dtype=np.int16)
    escape = np.zeros(table.size, dtype=bool)

    scratch = _Scratch(table)
    byz = True
    queue: deque[int] = deque()
    second_wave: deque[int] = deque()

    # Pass 1: legality, terminal adjudication, capture outcomes, move counts.
    n_slots = table.n_pieces - 1
    for idx in range(table.size):
        squares, stm = table.decode(idx)
        if len(set(squares)) != table.n_pieces:
            continue
        if table.twin_slots and table.index_of(squares, stm) != idx:
            continue  # twin-duplicate cell: canonical order only
        pos = scratch.set_state(squares, stm)
        # The side not on turn may not stand in check.
        opp_ksq = pos.king_sq[0 if stm == BLACK else 1]
        if _attacked(pos.board, opp_ksq, stm, byz, pos.counts):
            continue
        captures = _legal_captures(pos)
        n_legal = count_legal_moves(pos, stm)
        terminal = _classify_terminal(pos, captures, n_legal)
        if terminal is not None:
            values[idx] = terminal
            dtm[idx] = 0
            if terminal == _LOSS:
                queue.append(idx)
            continue
        capture_win = capture_draw = False
        for m in captures:
            tok = apply_move(pos, m, validated=True)
            succ_caps = _legal_captures(pos)
            succ = _classify_terminal(pos, succ_caps, count_legal_moves(pos, pos.stm))
            undo_move(pos, tok)
            if succ is None:
                raise OracleError(
                    "capture led to a live position: material not closed"
                )
            if succ == _LOSS:
                capture_win = True
                break
            capture_draw = True
        if capture_win:
            values[idx] = _WIN
            dtm[idx] = 1
            second_wave.append(idx)
            continue
        if capture_draw:
            escape[idx] = True
        values[idx] = _UNKNOWN
        counts[idx] = n_legal - len(captures)

    queue.extend(second_wave)

    # Pass 2: backward propagation over non-capture moves.  A predecessor
    # retracts one piece of the side that just moved; it is a legal state
    # exactly when the side newly on turn in the successor was not already
    # in check before the move was made.
    board = scratch.pos.board
    codes = table.codes
    counts_vec = scratch.pos.counts
    index_of = table.index_of
    while queue:
        idx = queue.popleft()
        v = values[idx]
        n = int(dtm[idx])
        squares, stm = table.decode(idx)
        mover = -stm  # predecessors have the opponent on turn
        scratch.set_state(squares, stm)
        target_ksq = squares[0] if stm == WHITE else squares[1]
        for slot in range(table.n_pieces):
            code = codes[slot]
            if (code > 0) != (mover > 0):
                continue
            here = squares[slot]
            base = code * mover
            if base == KING:
                sources = KING_TGTS[here]
            elif base == KNIGHT:
                sources = KNIGHT_TGTS[here]
            elif base == BISHOP:
                sources = ALFIL_TGTS[here]
            elif base == QUEEN:
                sources = FERS_TGTS[here]
            else:  # rook: reverse-slide along empty ray squares
                sources = None
            pre_squares = list(squares)
            if sources is not None:
                for q in sources:
                    if board[q] != 0:
                        continue
                    board[here] = 0
                    board[q] = code
                    s_legal = not _attacked(board, target_ksq, mover, True, counts_vec)
                    board[q] = 0
                    board[here] = code
                    if not s_legal:
                        continue
                    pre_squares[slot] = q
                    pidx = index_of(pre_squares, mover)
                    pv = values[pidx]
                    if pv == _UNKNOWN:
                        if v == _LOSS:
                            values[pidx] = _WIN
                            dtm[pidx] = n + 1
                            queue.append(pidx)
                        else:
                            counts[pidx] -= 1
                            if counts[pidx] == 0 and not escape[pidx]:
                                values[pidx] = _LOSS
                                dtm[pidx] = n + 1
                                queue.append(pidx)
            else:
                for ray in ROOK_RAYS[here]:
                    for q in ray:
                        if board[q] != 0:
                            break
                        board[here] = 0
                        board[q] = code
                        s_legal = not _attacked(board, target_ksq, mover, True, counts_vec)
                        board[q] = 0
                        board[here] = code
                        if not s_legal:
                            continue
                        pre_squares[slot] = q
                        pidx = index_of(pre_squares, mover)
                        pv = values[pidx]
                        if pv == _UNKNOWN:
                            if v == _LOSS:
                                values[pidx] = _WIN
                                dtm[pidx] = n + 1
                                queue.append(pidx)
                            else:
                                counts[pidx] -= 1
                                if counts[pidx] == 0 and not escape[pidx]:
                                    values[pidx] = _LOSS
                                    dtm[pidx] = n + 1
                                    queue.append(pidx)
            pre_squares[slot] = here

    # Everything never decided is a draw by the standard convention.
    values[values == _UNKNOWN] = _DRAW
    table.solved = True
    return table


def probe(table: OracleTable, state: OracleState) -> OracleValue:
    """Constant-time lookup consistent with solve."""
    return table.probe(state)
