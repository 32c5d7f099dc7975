"""Evaluation and iterative-deepening alpha-beta search.

Byzantine queens and bishops are worth 1.5 pawns each, so material alone
degenerates into shuffling; a small mobility term keeps play directed.
Scores are centipawns from the mover's perspective; forced finishes use a
mate band (stalemating the opponent is a mate-class win in the Byzantine
games, baring the opponent sits a small offset below it so true mate is
preferred).

The search is fail-hard and full-width, and the transposition table only
serves entries whose draft equals the remaining depth, so switching the
table on or off cannot change the root score at a fixed depth.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
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
    Variant,
    WHITE,
)
from .movegen import (
    Move,
    _king_safe_after,
    apply_move,
    count_legal_moves,
    in_check,
    legal_moves,
    noisy_moves,
    pseudo_legal_moves,
    undo_move,
)
from . import zobrist
from .zobrist import SIDE_KEY as _SIDE_KEY

MATE = 100_000
MATE_BAND = MATE - 2_000  # scores beyond this are forced finishes
BARE_KING_OFFSET = 256
INF = MATE + 1

_TT_EXACT, _TT_LOWER, _TT_UPPER = 0, 1, 2
_MAX_QPLY = 10
_TT_LIMIT = 1_000_000
_FUTILITY_MARGINS = {1: 220, 2: 520}


class SearchError(ValueError):
    pass


@dataclass(frozen=True)
class EvalParams:
    """Piece values in centipawns plus the mobility and jitter knobs."""

    pawn: int = 100
    queen: int = 150
    bishop: int = 150
    knight: int = 300
    rook: int = 500
    mobility_weight: int = 2
    jitter_cp: int = 0

    def __post_init__(self) -> None:
        if min(self.pawn, self.queen, self.bishop, self.knight, self.rook) <= 0:
            raise ValueError("piece values must be strictly positive")

    @classmethod
    def for_variant(cls, variant: Variant) -> "EvalParams":
        if variant.is_byzantine:
            return cls()
        return cls(queen=1000, bishop=350)

    def value_vector(self) -> tuple[int, ...]:
        """Centipawn value by piece code + 7 (kings count zero)."""
        by_base = {
            KING: 0,
            QUEEN: self.queen,
            ROOK: self.rook,
            BISHOP: self.bishop,
            KNIGHT: self.knight,
            PAWN_CW: self.pawn,
            PAWN_CCW: self.pawn,
        }
        vec = [0] * 15
        for base, val in by_base.items():
            vec[base + 7] = val
            vec[-base + 7] = val
        return tuple(vec)


@dataclass(frozen=True)
class SearchLimits:
    """Depth, wall-clock and node budgets; at least one must be set."""

    max_depth: Optional[int] = None
    movetime_ms: Optional[int] = None
    max_nodes: Optional[int] = None

    def __post_init__(self) -> None:
        if self.max_depth is None and self.movetime_ms is None and self.max_nodes is None:
            raise ValueError("at least one search limit must be set")


@dataclass
class SearchResult:
    best_move: Move
    score: int
    principal_variation: list[Move]
    nodes: int
    depth_reached: int


def zobrist_hash(p: Position) -> int:
    """Incrementally maintained position hash (equals a fresh recompute)."""
    return p.hash


def recompute_hash(p: Position) -> int:
    return zobrist.compute_hash(p)


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def _jitter(hash_: int, seed: int, amplitude: int) -> int:
    return _splitmix64(hash_ ^ seed) % (2 * amplitude + 1) - amplitude


# Entries are keyed by position hash xor a per-draft key, so a hit always
# carries the exact remaining depth: no grafting of deeper results, which
# keeps the root score identical with the table on or off at a fixed depth.
_DEPTH_KEYS = tuple(_splitmix64(0xD5A7 + d) for d in range(80))


def evaluate(p: Position, params: Optional[EvalParams] = None, seed: int = 0) -> int:
    """Material plus mobility from the mover's perspective.

    Deterministic with jitter_cp = 0; otherwise a symmetric offset keyed by
    (position hash, seed) is added, so repeat calls agree.
    """
    if params is None:
        params = EvalParams.for_variant(p.variant)
    vec = params.value_vector()
    counts = p.counts
    material = 0
    for base in range(1, 8):
        material += (counts[base + 7] - counts[7 - base]) * vec[base + 7]
    if p.stm == BLACK:
        material = -material
    mobility = count_legal_moves(p, p.stm) - count_legal_moves(p, -p.stm)
    score = material + params.mobility_weight * mobility
    if params.jitter_cp:
        score += _jitter(p.hash, seed, params.jitter_cp)
    return score


class _SearchStop(Exception):
    pass


class Searcher:
    """One search instance: its own transposition table and eval cache.

    Not shareable between threads; clone the position and build one
    searcher per worker instead.
    """

    def __init__(
        self,
        params: Optional[EvalParams] = None,
        seed: int = 0,
        use_tt: bool = True,
        contempt: int = 16,
    ) -> None:
        self.params = params
        self.seed = seed
        self.use_tt = use_tt
        # Repetition draws inside the search score slightly against the
        # root side, so two equal engines keep playing instead of
        # shuffling into threefold; genuine terminal draws stay at zero.
        self.contempt = contempt
        self._root_stm = WHITE
        self.tt: dict = {}
        self.eval_cache: dict = {}
        self.nodes = 0
        self.last_root_ranking: list[Move] = []
        self._stop = False
        self._move_hint: dict = {}
        self._history = [[0] * 64 for _ in range(15)]
        self._deadline: Optional[float] = None
        self._node_limit: Optional[int] = None
        self._killers: list = []
        self._vec: tuple = ()
        self._mobility_w = 0
        self._jitter_cp = 0

    # -- bookkeeping -------------------------------------------------------

    def request_stop(self) -> None:
        """Abort the running search at the next node (thread-safe flag)."""
        self._stop = True

    def _checkpoint(self) -> None:
        if self._stop:
            raise _SearchStop()
        if self._node_limit is not None and self.nodes >= self._node_limit:
            raise _SearchStop()
        if self._deadline is not None and self.nodes % 512 == 0:
            if time.monotonic() >= self._deadline:
                raise _SearchStop()

    # Generous per-piece legal-move caps (promotion fan-out included), used
    # for sound lazy-eval bounds; indexed by piece kind code.
    _MOVE_CAPS = (0, 8, 30, 18, 12, 8, 12, 12)

    def _eval(self, p: Position, alpha: int = -INF, beta: int = INF) -> int:
        # Without jitter the evaluation is antisymmetric in the side to
        # move, so the cache stores the White-perspective score under a
        # side-independent key and serves both colors.
        sign = 1 if p.stm == WHITE else -1
        symmetric = not self._jitter_cp and p.ep_sq < 0
        if symmetric:
            key = p.hash if p.stm == WHITE else p.hash ^ _SIDE_KEY
            cached = self.eval_cache.get(key)
            if cached is not None:
                return sign * cached
        else:
            key = p.hash
            cached = self.eval_cache.get(key)
            if cached is not None:
                return cached
        vec = self._vec
        counts = p.counts
        material = 0
        for base in range(1, 8):
            material += (counts[base + 7] - counts[7 - base]) * vec[base + 7]
        if p.stm == BLACK:
            material = -material
        jit = _jitter(p.hash, self.seed, self._jitter_cp) if self._jitter_cp else 0
        w = self._mobility_w
        if w and (alpha > -INF or beta < INF):
            # Mobility is bounded by each side's move-count cap; if even the
            # extreme can't re-enter the window, the clamped result is exact
            # under fail-hard and the costly count can be skipped.
            caps = self._MOVE_CAPS
            white_cap = sum(counts[base + 7] * caps[base] for base in range(1, 8))
            black_cap = sum(counts[7 - base] * caps[base] for base in range(1, 8))
            cap_stm, cap_opp = (
                (white_cap, black_cap) if p.stm == WHITE else (black_cap, white_cap)
            )
            if material + jit - w * cap_opp >= beta:
                return beta
            if material + jit + w * cap_stm <= alpha:
                return alpha
        mobility = count_legal_moves(p, p.stm) - count_legal_moves(p, -p.stm)
        score = material + w * mobility + jit
        if len(self.eval_cache) > _TT_LIMIT:
            self.eval_cache.clear()
        self.eval_cache[key] = sign * score if symmetric else score
        return score

    @staticmethod
    def _repetition(p: Position) -> bool:
        return p.rep_counts.get(p.hash, 0) >= 3

    def _draw_score(self, p: Position) -> int:
        return -self.contempt if p.stm == self._root_stm else self.contempt

    def _bare_terminal(self, p: Position, ply: int) -> Optional[int]:
        """Mover-perspective score when a bare-king adjudication applies."""
        stm_idx = 0 if p.stm == WHITE else 1
        stm_bare = p.piece_count(p.stm) == 1
        opp_bare = p.piece_count(-p.stm) == 1
        if not p.rules.bare_king_rule:
            if stm_bare and opp_bare:
                return 0
            return None
        if not stm_bare:
            return None
        if opp_bare:
            return 0
        moves = legal_moves(p)
        if not moves:
            return -(MATE - ply)  # mated or stalemate-lost while bare
        if p.piece_count(-p.stm) == 2 and any(
            m.captured and abs(m.captured) != KING for m in moves
        ):
            return 0  # riposte draw
        return -(MATE - BARE_KING_OFFSET - ply)

    # -- move ordering -----------------------------------------------------

    def _order(self, p: Position, moves: list[Move], ply: int, tt_move) -> list[Move]:
        vec = self._vec
        killers = self._killers[ply] if ply < len(self._killers) else ()
        scored = []
        history = self._history
        for m in moves:
            if tt_move is not None and m.fsq == tt_move[0] and m.tsq == tt_move[1] and m.promotion == tt_move[2]:
                key = 1_000_000
            elif m.captured:
                key = 200_000 + vec[m.captured + 7] * 8 - vec[m.piece + 7] // 8
            elif (m.fsq, m.tsq) in killers:
                key = 150_000
            elif m.annihilated:
                key = -1  # giving up two own pawns is almost always last
            else:
                key = history[m.piece + 7][m.tsq]
            scored.append((key, m))
        scored.sort(key=lambda t: t[0], reverse=True)
        return [m for _, m in scored]

    def _note_killer(self, ply: int, m: Move) -> None:
        while len(self._killers) <= ply:
            self._killers.append([])
        ks = self._killers[ply]
        entry = (m.fsq, m.tsq)
        if entry not in ks:
            ks.insert(0, entry)
            del ks[2:]

    def _note_history(self, m: Move, depth: int) -> None:
        row = self._history[m.piece + 7]
        row[m.tsq] += depth * depth
        if row[m.tsq] > 100_000:
            for r in self._history:
                for i in range(64):
                    r[i] >>= 1

    # -- core recursion ----------------------------------------------------

    def _negamax(self, p: Position, depth: int, alpha: int, beta: int, ply: int) -> int:
        self.nodes += 1
        self._checkpoint()
        if ply > 0 and self._repetition(p):
            return self._draw_score(p)
        bare = self._bare_terminal(p, ply)
        if bare is not None:
            return bare
        if depth <= 0:
            return self._quiesce(p, alpha, beta, ply, 0)

        tt_move = None
        key = p.hash ^ _DEPTH_KEYS[depth]
        if self.use_tt:
            tt_move = self._move_hint.get(p.hash)
            entry = self.tt.get(key)
            if entry is not None and ply > 0:
                e_flag, e_score = entry
                score = e_score
                if score > MATE_BAND:
                    score -= ply
                elif score < -MATE_BAND:
                    score += ply
                if e_flag == _TT_EXACT:
                    return min(max(score, alpha), beta)
                if e_flag == _TT_LOWER and score >= beta:
                    return beta
                if e_flag == _TT_UPPER and score <= alpha:
                    return alpha

        # Frontier futility: when the static score sits hopelessly below
        # alpha, quiet moves cannot rescue the node and only material moves
        # are tried.  Small piece counts are exempt so stalemate-class
        # finishes are never misjudged.
        futile = False
        if (
            depth <= 2
            and ply > 0
            and p.piece_count(p.stm) > 3
            and not in_check(p)
            and self._eval(p) + _FUTILITY_MARGINS[depth] <= alpha
        ):
            futile = True

        moves = self._order(p, pseudo_legal_moves(p), ply, tt_move)
        best = -INF
        best_move = None
        found_legal = False
        orig_alpha = alpha
        for m in moves:
            if (
                futile
                and found_legal
                and not m.captured
                and not m.annihilated
                and not m.promotion
            ):
                continue
            if not _king_safe_after(p, m):
                continue
            found_legal = True
            tok = apply_move(p, m, validated=True)
            score = -self._negamax(p, depth - 1, -beta, -alpha, ply + 1)
            undo_move(p, tok)
            if score > best:
                best = score
                best_move = m
            if best > alpha:
                alpha = best
            if alpha >= beta:
                if not m.captured:
                    self._note_killer(ply, m)
                    self._note_history(m, depth)
                break
        if not found_legal:
            if in_check(p):
                return -(MATE - ply)
            if p.rules.stalemate_is_win:
                return -(MATE - ply)
            return 0
        best = min(max(best, orig_alpha), beta)  # fail-hard
        if self.use_tt:
            if best <= orig_alpha:
                flag = _TT_UPPER
            elif best >= beta:
                flag = _TT_LOWER
            else:
                flag = _TT_EXACT
            stored = best
            if stored > MATE_BAND:
                stored += ply
            elif stored < -MATE_BAND:
                stored -= ply
            if len(self.tt) > _TT_LIMIT:
                self.tt.clear()
                self._move_hint.clear()
            self.tt[key] = (flag, stored)
            if best_move is not None and flag != _TT_UPPER:
                self._move_hint[p.hash] = (
                    best_move.fsq,
                    best_move.tsq,
                    best_move.promotion,
                )
        return best

    def _quiesce(self, p: Position, alpha: int, beta: int, ply: int, qply: int) -> int:
        self.nodes += 1
        self._checkpoint()
        if self._repetition(p):
            return self._draw_score(p)
        bare = self._bare_terminal(p, ply)
        if bare is not None:
            return bare
        checked = in_check(p)
        if checked:
            # Evasion node: no stand-pat, every legal move must be tried.
            orig_alpha = alpha
            best = -INF
            found = False
            for m in pseudo_legal_moves(p):
                if not _king_safe_after(p, m):
                    continue
                found = True
                if qply >= _MAX_QPLY:
                    return min(max(self._eval(p), orig_alpha), beta)
                tok = apply_move(p, m, validated=True)
                score = -self._quiesce(p, -beta, -alpha, ply + 1, qply + 1)
                undo_move(p, tok)
                if score > best:
                    best = score
                if best > alpha:
                    alpha = best
                if alpha >= beta:
                    break
            if not found:
                return -(MATE - ply)
            return min(max(best, orig_alpha), beta)
        stand = self._eval(p, alpha, beta)
        if stand >= beta:
            return beta
        if stand > alpha:
            alpha = stand
        if qply >= _MAX_QPLY:
            return alpha
        vec = self._vec
        pawn_val = vec[PAWN_CW + 7]
        delta = 2 * self._mobility_w * 16 + 80
        # Nothing on the board can gain more than the best enemy piece plus
        # a promotion jump; bail out before generating captures if even
        # that cannot reach the window.
        counts = p.counts
        maxgain = 0
        for base in (QUEEN, ROOK, BISHOP, KNIGHT, PAWN_CW, PAWN_CCW):
            if counts[(-base if p.stm == WHITE else base) + 7]:
                v = vec[base + 7]
                if v > maxgain:
                    maxgain = v
        if p.rules.promotion:
            maxgain += vec[QUEEN + 7] - pawn_val
        if stand + maxgain + delta <= alpha:
            return alpha
        noisy = noisy_moves(p)
        noisy.sort(
            key=lambda m: vec[m.captured + 7] * 8 - vec[m.piece + 7] // 8,
            reverse=True,
        )
        for m in noisy:
            # Delta pruning: skip exchanges that cannot lift alpha even
            # with a generous positional margin.
            gain = vec[m.captured + 7]
            if m.annihilated:
                gain -= 2 * pawn_val
            if m.promotion:
                gain += vec[m.promotion + 7] - pawn_val
            if stand + gain + delta <= alpha:
                continue
            if not _king_safe_after(p, m):
                continue
            tok = apply_move(p, m, validated=True)
            score = -self._quiesce(p, -beta, -alpha, ply + 1, qply + 1)
            undo_move(p, tok)
            if score > alpha:
                alpha = score
            if alpha >= beta:
                return beta
        return alpha

    # -- public entry ------------------------------------------------------

    def search(
        self, p: Position, limits: SearchLimits, rank_all: bool = False
    ) -> SearchResult:
        """Search the position; with ``rank_all`` every root move is scored
        with a full window so :attr:`last_root_ranking` is exact."""
        params = self.params or EvalParams.for_variant(p.variant)
        self._vec = params.value_vector()
        self._mobility_w = params.mobility_weight
        self._jitter_cp = params.jitter_cp
        root_moves = legal_moves(p)
        if not root_moves:
            raise SearchError("no legal moves: consult the adjudicator")
        if self._bare_terminal(p, 0) is not None or self._repetition(p):
            raise SearchError("position is already terminal: consult the adjudicator")
        self._root_stm = p.stm
        self.nodes = 0
        self._stop = False
        self._killers = []
        self._deadline = None
        self._node_limit = None
        start = time.monotonic()
        deadline = None
        if limits.movetime_ms is not None:
            deadline = start + limits.movetime_ms / 1000.0
        max_depth = limits.max_depth if limits.max_depth is not None else 64

        best_move = root_moves[0]
        best_score = -INF
        depth_reached = 0
        root_scores: dict[int, int] = {}
        try:
            for depth in range(1, max_depth + 1):
                if depth > 1:
                    # Budgets only interrupt from depth 2 on: the first
                    # iteration always completes so a move is available.
                    self._deadline = deadline
                    self._node_limit = limits.max_nodes
                    root_moves.sort(
                        key=lambda m: root_scores.get(id(m), -INF), reverse=True
                    )
                iter_best = None
                iter_score = -INF
                alpha, beta = -INF, INF
                for m in root_moves:
                    tok = apply_move(p, m, validated=True)
                    window_alpha = -INF if rank_all else alpha
                    score = -self._negamax(p, depth - 1, -beta, -window_alpha, 1)
                    undo_move(p, tok)
                    root_scores[id(m)] = score
                    if score > iter_score:
                        iter_score = score
                        iter_best = m
                    if score > alpha:
                        alpha = score
                best_move = iter_best
                best_score = iter_score
                depth_reached = depth
                if deadline is not None and time.monotonic() >= deadline:
                    break
                if limits.max_nodes is not None and self.nodes >= limits.max_nodes:
                    break
                if abs(best_score) > MATE_BAND:
                    break
        except _SearchStop:
            if depth_reached == 0:
                best_score = 0  # stopped before the first iteration finished

        self.last_root_ranking = sorted(
            root_moves, key=lambda m: root_scores.get(id(m), -INF), reverse=True
        )
        pv = self._extract_pv(p, best_move, depth_reached)
        return SearchResult(
            best_move=best_move,
            score=best_score,
            principal_variation=pv,
            nodes=self.nodes,
            depth_reached=depth_reached,
        )

    def _extract_pv(self, p: Position, first: Move, max_len: int) -> list[Move]:
        pv = [first]
        tokens = [apply_move(p, first, validated=True)]
        seen = {p.hash}
        while len(pv) < max(max_len, 1):
            hint = self._move_hint.get(p.hash)
            if hint is None:
                break
            fsq, tsq, promo = hint
            nxt = None
            for m in legal_moves(p):
                if m.fsq == fsq and m.tsq == tsq and m.promotion == promo:
                    nxt = m
                    break
            if nxt is None:
                break
            pv.append(nxt)
            tokens.append(apply_move(p, nxt, validated=True))
            if p.hash in seen:
                break
            seen.add(p.hash)
        for tok in reversed(tokens):
            undo_move(p, tok)
        return pv


def search(
    p: Position,
    limits: SearchLimits,
    params: Optional[EvalParams] = None,
    seed: int = 0,
    use_tt: bool = True,
) -> SearchResult:
    """One-shot search; identical inputs give identical results.

    Wall-clock limits are honored within a small overshoot but naturally
    make the reached depth machine-dependent; depth and node limits are
    fully deterministic.
    """
    return Searcher(params=params, seed=seed, use_tt=use_tt).search(p, limits)
