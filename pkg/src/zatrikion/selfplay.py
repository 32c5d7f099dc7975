"""Computer-vs-computer match runner with adjudication and statistics.

Games are deterministic given (config, game_index): per-game randomness is
derived from the match seed, engines alternate seats when requested, and
aggregation is a commutative sum, so runs parallelize without changing the
exported bytes.
"""

from __future__ import annotations

import csv
import io
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

from .adjudicate import DrawReason, GameStatus, StatusKind, game_status
from .board import BLACK, Position, RuleConfig, Variant, WHITE, initial_position
from .movegen import apply_move, find_move, legal_moves, move_to_text
from .search import EvalParams, Searcher, SearchLimits, _splitmix64


class HarnessError(RuntimeError):
    pass


@dataclass(frozen=True)
class Diversify:
    """How to vary otherwise-deterministic games within a match."""

    kind: str = "random-opening"  # none | jitter | random-opening
    jitter_cp: int = 0
    plies: int = 4
    top_m: int = 3

    @classmethod
    def none(cls) -> "Diversify":
        return cls(kind="none", plies=0, top_m=0)

    @classmethod
    def jitter(cls, cp: int) -> "Diversify":
        return cls(kind="jitter", jitter_cp=cp, plies=0, top_m=0)

    @classmethod
    def random_opening(cls, plies: int = 4, top_m: int = 3) -> "Diversify":
        return cls(kind="random-opening", plies=plies, top_m=top_m)


@dataclass(frozen=True)
class MatchConfig:
    variant: Variant
    games: int = 100
    limits: SearchLimits = field(default_factory=lambda: SearchLimits(max_depth=4))
    seed: int = 0
    diversify: Diversify = field(default_factory=Diversify)
    adjudicate_no_capture: Optional[int] = None  # full moves without capture
    ply_cap: int = 400
    swap_colors: bool = True
    workers: int = 1
    params: Optional[EvalParams] = None
    rules: Optional[RuleConfig] = None

    def __post_init__(self) -> None:
        if self.games < 1:
            raise ValueError("games must be >= 1")
        if self.ply_cap <= 0:
            raise ValueError("ply_cap must be positive")


@dataclass
class GameRecord:
    variant: Variant
    seed: int
    game_index: int
    moves: list[str]
    result_text: str
    reason: str
    ply_count: int
    ply_cap: int
    no_capture_limit: Optional[int]
    error: Optional[str] = None


@dataclass
class MatchStats:
    variant: str
    games: int
    white_wins: int
    black_wins: int
    draws: int
    white_wins_by_reason: dict
    black_wins_by_reason: dict
    draws_by_reason: dict
    decisive_rate: float
    mean_game_length: float
    score_white: float
    score_black: float

    @property
    def reason_histogram(self) -> dict:
        out: dict = {}
        for d in (self.white_wins_by_reason, self.black_wins_by_reason, self.draws_by_reason):
            for k, v in d.items():
                out[k] = out.get(k, 0) + v
        return dict(sorted(out.items()))


def _game_seed(seed: int, game_index: int, salt: int = 0) -> int:
    return _splitmix64(_splitmix64(seed ^ (game_index * 0x9E3779B97F4A7C15)) ^ salt)


def _harness_draw(reason: DrawReason) -> GameStatus:
    return GameStatus(StatusKind.DRAW, draw_reason=reason)


def play_game(config: MatchConfig, game_index: int) -> GameRecord:
    """Play one game; identical (config, game_index) replays identically."""
    rng = random.Random(_game_seed(config.seed, game_index))
    params = config.params or EvalParams.for_variant(config.variant)
    div = config.diversify
    if div.kind == "jitter":
        params = replace(params, jitter_cp=div.jitter_cp)
    # Seats A/B alternate colors; both run the same engine, so swapping
    # only decides which derived seed sits behind which color.
    a_is_white = (game_index % 2 == 0) or not config.swap_colors
    seat_seed = {
        WHITE: _game_seed(config.seed, game_index, 0xA if a_is_white else 0xB),
        BLACK: _game_seed(config.seed, game_index, 0xB if a_is_white else 0xA),
    }
    engines = {
        color: Searcher(params=params, seed=seat_seed[color])
        for color in (WHITE, BLACK)
    }
    pos = initial_position(config.variant, config.rules)
    moves: list[str] = []
    cap_plies = (
        2 * config.adjudicate_no_capture if config.adjudicate_no_capture else None
    )
    error = None
    while True:
        legal = legal_moves(pos)
        status = game_status(pos, legal)
        if status.is_terminal:
            break
        if cap_plies is not None and pos.no_capture_clock >= cap_plies:
            status = _harness_draw(DrawReason.NO_CAPTURE_LIMIT)
            break
        if len(moves) >= config.ply_cap:
            status = _harness_draw(DrawReason.PLY_CAP)
            break
        engine = engines[pos.stm]
        sampling = div.kind == "random-opening" and len(moves) < div.plies
        result = engine.search(pos, config.limits, rank_all=sampling)
        move = result.best_move
        if sampling:
            pool = engine.last_root_ranking[: max(1, div.top_m)]
            move = pool[rng.randrange(len(pool))]
        legal_texts = {move_to_text(m) for m in legal}
        text = move_to_text(move)
        if text not in legal_texts:
            error = f"engine produced illegal move {text} at ply {len(moves)}"
            status = _harness_draw(DrawReason.PLY_CAP)
            break
        apply_move(pos, move)
        moves.append(text)
    return GameRecord(
        variant=config.variant,
        seed=config.seed,
        game_index=game_index,
        moves=moves,
        result_text=status.result_text(),
        reason=status.reason_token(),
        ply_count=len(moves),
        ply_cap=config.ply_cap,
        no_capture_limit=config.adjudicate_no_capture,
        error=error,
    )


def _play_chunk(args) -> list[GameRecord]:
    config, indices = args
    return [play_game(config, i) for i in indices]


def play_all_games(config: MatchConfig) -> list[GameRecord]:
    """All games of a match, in game-index order regardless of scheduling."""
    indices = list(range(config.games))
    if config.workers <= 1 or config.games == 1:
        return [play_game(config, i) for i in indices]
    chunks = [
        (config, indices[k :: config.workers]) for k in range(config.workers)
    ]
    records: list[GameRecord] = []
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        for part in pool.map(_play_chunk, chunks):
            records.extend(part)
    records.sort(key=lambda r: r.game_index)
    return records


def aggregate(config: MatchConfig, records: list[GameRecord]) -> MatchStats:
    bad = [r for r in records if r.error]
    if bad:
        raise HarnessError(
            f"match invalid: {len(bad)} flagged game(s), first: {bad[0].error}"
        )
    white = black = draws = 0
    w_reasons: dict = {}
    b_reasons: dict = {}
    d_reasons: dict = {}
    total_plies = 0
    for r in records:
        total_plies += r.ply_count
        if r.result_text.startswith("1-0"):
            white += 1
            w_reasons[r.reason] = w_reasons.get(r.reason, 0) + 1
        elif r.result_text.startswith("0-1"):
            black += 1
            b_reasons[r.reason] = b_reasons.get(r.reason, 0) + 1
        else:
            draws += 1
            d_reasons[r.reason] = d_reasons.get(r.reason, 0) + 1
    games = len(records)
    stats = MatchStats(
        variant=config.variant.value,
        games=games,
        white_wins=white,
        black_wins=black,
        draws=draws,
        white_wins_by_reason=dict(sorted(w_reasons.items())),
        black_wins_by_reason=dict(sorted(b_reasons.items())),
        draws_by_reason=dict(sorted(d_reasons.items())),
        decisive_rate=round((white + black) / games, 6),
        mean_game_length=round(total_plies / games, 6),
        score_white=0.0,
        score_black=0.0,
    )
    table = score(stats, mate_bonus=False)
    stats.score_white = table["white"]
    stats.score_black = table["black"]
    return stats


def run_match(config: MatchConfig) -> MatchStats:
    return aggregate(config, play_all_games(config))


def run_match_with_records(config: MatchConfig):
    records = play_all_games(config)
    return aggregate(config, records), records


def score(stats: MatchStats, mate_bonus: bool = False) -> dict:
    """Score table: win 1, draw 1/2; with the bonus a mate-win pays 1.5."""
    def side_total(by_reason: dict) -> float:
        total = 0.0
        for reason, n in by_reason.items():
            total += n * (1.5 if mate_bonus and reason == "mate" else 1.0)
        return total

    half_draws = stats.draws * 0.5
    return {
        "white": side_total(stats.white_wins_by_reason) + half_draws,
        "black": side_total(stats.black_wins_by_reason) + half_draws,
    }


# ---------------------------------------------------------------------------
# Persistence.

_CSV_REASONS = (
    "mate",
    "stalemate-win",
    "bare-king",
    "two-bare-kings",
    "stalemate-draw",
    "repetition",
    "no-capture",
    "ply-cap",
    "insufficient",
)


def stats_to_dict(stats: MatchStats) -> dict:
    return {
        "variant": stats.variant,
        "games": stats.games,
        "white_wins": stats.white_wins,
        "black_wins": stats.black_wins,
        "draws": stats.draws,
        "white_wins_by_reason": stats.white_wins_by_reason,
        "black_wins_by_reason": stats.black_wins_by_reason,
        "draws_by_reason": stats.draws_by_reason,
        "decisive_rate": stats.decisive_rate,
        "mean_game_length": stats.mean_game_length,
        "score_white": stats.score_white,
        "score_black": stats.score_black,
    }


def stats_from_dict(data: dict) -> MatchStats:
    return MatchStats(**data)


def format_stats(stats: MatchStats, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(stats_to_dict(stats), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        hist = stats.reason_histogram
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = ["variant", "games", "+", "=", "-"] + list(_CSV_REASONS) + [
            "decisive_rate",
            "mean_game_length",
            "score_white",
            "score_black",
        ]
        row = (
            [stats.variant, stats.games, stats.white_wins, stats.draws, stats.black_wins]
            + [hist.get(r, 0) for r in _CSV_REASONS]
            + [stats.decisive_rate, stats.mean_game_length, stats.score_white, stats.score_black]
        )
        writer.writerow(header)
        writer.writerow(row)
        return buf.getvalue()
    raise ValueError(f"unknown stats format {fmt!r}")


def export_stats(stats: MatchStats, path: str, fmt: str = "json") -> str:
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(format_stats(stats, fmt))
    except OSError as e:
        raise OSError(f"cannot write stats to {path}: {e}") from e
    return path


def import_stats(path: str) -> MatchStats:
    try:
        with open(path, encoding="utf-8") as f:
            return stats_from_dict(json.load(f))
    except OSError as e:
        raise OSError(f"cannot read stats from {path}: {e}") from e


def export_record(record: GameRecord) -> str:
    lines = [
        f"variant: {record.variant.value}",
        f"seed: {record.seed}",
        f"game: {record.game_index}",
        f"ply-cap: {record.ply_cap}",
        f"no-capture-limit: {record.no_capture_limit if record.no_capture_limit else '-'}",
        f"result: {record.result_text}",
        f"plies: {record.ply_count}",
        "",
    ]
    for i in range(0, len(record.moves), 2):
        num = i // 2 + 1
        pair = " ".join(record.moves[i : i + 2])
        lines.append(f"{num}. {pair}")
    return "\n".join(lines) + "\n"


def parse_record(text: str) -> GameRecord:
    headers: dict[str, str] = {}
    moves: list[str] = []
    in_moves = False
    for line in text.splitlines():
        line = line.strip()
        if not line:
            in_moves = True
            continue
        if not in_moves and ":" in line:
            key, _, value = line.partition(":")
            headers[key.strip()] = value.strip()
        else:
            parts = line.split()
            if parts and parts[0].endswith("."):
                parts = parts[1:]
            moves.extend(parts)
    ncl = headers.get("no-capture-limit", "-")
    return GameRecord(
        variant=Variant(headers["variant"]),
        seed=int(headers.get("seed", "0")),
        game_index=int(headers.get("game", "0")),
        moves=moves,
        result_text=headers["result"],
        reason=headers["result"].split(" ", 1)[1] if " " in headers["result"] else "",
        ply_count=len(moves),
        ply_cap=int(headers.get("ply-cap", "400")),
        no_capture_limit=None if ncl == "-" else int(ncl),
    )


def replay_record(record: GameRecord) -> GameStatus:
    """Replay a record through the public rules API and re-adjudicate."""
    pos = initial_position(record.variant)
    cap_plies = 2 * record.no_capture_limit if record.no_capture_limit else None
    for i, text in enumerate(record.moves):
        move = find_move(pos, text)
        apply_move(pos, move)
    status = game_status(pos)
    if not status.is_terminal:
        if cap_plies is not None and pos.no_capture_clock >= cap_plies:
            status = _harness_draw(DrawReason.NO_CAPTURE_LIMIT)
        elif len(record.moves) >= record.ply_cap:
            status = _harness_draw(DrawReason.PLY_CAP)
    return status
