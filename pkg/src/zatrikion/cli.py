"""Line protocol (stdio and WebSocket) exposing the engine to front ends.

Commands: variant <name>; position start|cfen <...> [moves <list>];
move <movetext>; go depth N | movetime MS [seed S] | nodes N; stop;
perft N; eval; status; cfen; selfplay <config-file>; serve --port P; quit.
Unknown or malformed commands answer `error <msg>` and leave the session
unchanged.  The WebSocket bridge speaks the same protocol, one session per
connection, and additionally pushes `state <cfen> <status> <moves...>`
after every command that changes the position, so clients never have to
evaluate rules themselves.
"""

from __future__ import annotations

import argparse
import sys
import threading
from typing import Optional

from .adjudicate import game_status
from .board import Position, RuleConfig, Variant, initial_position
from .cfen import format_cfen, parse_cfen
from .movegen import apply_move, find_move, legal_moves, move_to_text, perft
from .search import EvalParams, SearchLimits, Searcher, evaluate
from .selfplay import Diversify, MatchConfig, export_stats, run_match

_VARIANT_ALIASES = {
    "byzantine-regular": Variant.BYZANTINE_REGULAR,
    "byzantine-symmetric": Variant.BYZANTINE_SYMMETRIC,
    "circular-fide": Variant.CIRCULAR_FIDE,
    "byzantine": Variant.BYZANTINE_REGULAR,
    "symmetric": Variant.BYZANTINE_SYMMETRIC,
    "circular": Variant.CIRCULAR_FIDE,
}


class ProtocolError(ValueError):
    pass


def parse_match_config(text: str) -> tuple[MatchConfig, str, str]:
    """Flat key=value match configuration; returns (config, out_path, fmt)."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ProtocolError(f"config line {lineno}: expected key=value")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    try:
        variant = _VARIANT_ALIASES[values.get("variant", "byzantine-regular")]
    except KeyError:
        raise ProtocolError(f"unknown variant {values.get('variant')!r}") from None
    limits = SearchLimits(
        max_depth=int(values["depth"]) if "depth" in values else None,
        movetime_ms=int(values["movetime"]) if "movetime" in values else None,
        max_nodes=int(values["nodes"]) if "nodes" in values else None,
    ) if any(k in values for k in ("depth", "movetime", "nodes")) else SearchLimits(max_depth=4)
    div_spec = values.get("diversify", "random-opening:4:3")
    if div_spec == "none":
        diversify = Diversify.none()
    elif div_spec.startswith("jitter:"):
        diversify = Diversify.jitter(int(div_spec.split(":")[1]))
    elif div_spec.startswith("random-opening"):
        parts = div_spec.split(":")
        plies = int(parts[1]) if len(parts) > 1 else 4
        top_m = int(parts[2]) if len(parts) > 2 else 3
        diversify = Diversify.random_opening(plies, top_m)
    else:
        raise ProtocolError(f"unknown diversify {div_spec!r}")
    config = MatchConfig(
        variant=variant,
        games=int(values.get("games", "100")),
        limits=limits,
        seed=int(values.get("seed", "0")),
        diversify=diversify,
        adjudicate_no_capture=(
            int(values["no-capture"]) if "no-capture" in values else None
        ),
        ply_cap=int(values.get("ply-cap", "400")),
        swap_colors=values.get("swap-colors", "on") != "off",
        workers=int(values.get("workers", "1")),
    )
    return config, values.get("out", "match-stats.json"), values.get("format", "json")


class ProtocolSession:
    """One protocol conversation: variant, position, engine, search state."""

    def __init__(self, variant: Variant = Variant.BYZANTINE_REGULAR):
        self.variant = variant
        self.rules: Optional[RuleConfig] = None
        self.position: Position = initial_position(variant)
        self.searcher: Optional[Searcher] = None
        self.state_changed = False

    # -- helpers -----------------------------------------------------------

    def state_frame(self) -> str:
        status = game_status(self.position).result_text().replace(" ", ";")
        moves = " ".join(move_to_text(m) for m in legal_moves(self.position))
        return f"state {format_cfen(self.position)} {status} {moves}".rstrip()

    def _set_position(self, args: list[str]) -> None:
        if not args:
            raise ProtocolError("position needs 'start' or 'cfen <text>'")
        if args[0] == "start":
            pos = initial_position(self.variant, self.rules)
            rest = args[1:]
        elif args[0] == "cfen":
            if len(args) < 6:
                raise ProtocolError("cfen needs 5 fields")
            pos = parse_cfen(" ".join(args[1:6]), self.variant, self.rules)
            rest = args[6:]
        else:
            raise ProtocolError(f"unknown position kind {args[0]!r}")
        if rest:
            if rest[0] != "moves":
                raise ProtocolError(f"expected 'moves', got {rest[0]!r}")
            for text in rest[1:]:
                apply_move(pos, find_move(pos, text))
        self.position = pos
        self.state_changed = True

    def _go(self, args: list[str]) -> list[str]:
        depth = movetime = nodes = None
        seed = 0
        it = iter(args)
        for tok in it:
            if tok == "depth":
                depth = int(next(it, "0"))
            elif tok == "movetime":
                movetime = int(next(it, "0"))
            elif tok == "nodes":
                nodes = int(next(it, "0"))
            elif tok == "seed":
                seed = int(next(it, "0"))
            else:
                raise ProtocolError(f"unknown go argument {tok!r}")
        if depth is None and movetime is None and nodes is None:
            depth = 4
        status = game_status(self.position)
        if status.is_terminal:
            raise ProtocolError(f"game over: {status.result_text()}")
        limits = SearchLimits(max_depth=depth, movetime_ms=movetime, max_nodes=nodes)
        self.searcher = Searcher(
            params=EvalParams.for_variant(self.variant), seed=seed
        )
        result = self.searcher.search(self.position, limits)
        pv = " ".join(move_to_text(m) for m in result.principal_variation)
        info = (
            f"info depth {result.depth_reached} score cp {result.score} "
            f"nodes {result.nodes} pv {pv}"
        )
        return [info, f"bestmove {move_to_text(result.best_move)}"]

    # -- dispatch ----------------------------------------------------------

    def handle(self, line: str) -> list[str]:
        """Process one command line; returns the response lines."""
        self.state_changed = False
        parts = line.split()
        if not parts:
            return []
        cmd, args = parts[0], parts[1:]
        try:
            if cmd == "variant":
                if not args or args[0] not in _VARIANT_ALIASES:
                    raise ProtocolError(f"unknown variant {' '.join(args)!r}")
                self.variant = _VARIANT_ALIASES[args[0]]
                self.position = initial_position(self.variant, self.rules)
                self.state_changed = True
                return ["ok"]
            if cmd == "position":
                self._set_position(args)
                return ["ok"]
            if cmd == "move":
                if len(args) != 1:
                    raise ProtocolError("move needs one argument")
                move = find_move(self.position, args[0])
                apply_move(self.position, move)
                self.state_changed = True
                return [f"ok {args[0]}"]
            if cmd == "go":
                return self._go(args)
            if cmd == "stop":
                if self.searcher is not None:
                    self.searcher.request_stop()
                return ["ok"]
            if cmd == "perft":
                depth = int(args[0]) if args else 1
                return [str(perft(self.position, depth))]
            if cmd == "eval":
                return [str(evaluate(self.position, EvalParams.for_variant(self.variant)))]
            if cmd == "status":
                return [game_status(self.position).result_text()]
            if cmd == "cfen":
                return [format_cfen(self.position)]
            if cmd == "selfplay":
                if len(args) != 1:
                    raise ProtocolError("selfplay needs a config file path")
                try:
                    with open(args[0], encoding="utf-8") as f:
                        config, out, fmt = parse_match_config(f.read())
                except OSError as e:
                    raise ProtocolError(f"cannot read config {args[0]}: {e}") from e
                stats = run_match(config)
                export_stats(stats, out, fmt)
                return [out]
            raise ProtocolError(f"unknown command {cmd!r}")
        except (ProtocolError, ValueError) as e:
            return [f"error {e}"]

    def handle_with_state(self, line: str) -> list[str]:
        out = self.handle(line)
        if self.state_changed:
            out.append(self.state_frame())
        return out


def protocol_loop(
    instream=None, outstream=None, variant: Variant = Variant.BYZANTINE_REGULAR
) -> int:
    """Read commands line by line until 'quit'; returns the exit code.

    `go` runs on a helper thread so a concurrent 'stop' stays responsive;
    other commands are processed strictly one at a time.
    """
    instream = instream if instream is not None else sys.stdin
    outstream = outstream if outstream is not None else sys.stdout
    session = ProtocolSession(variant)
    pending: Optional[threading.Thread] = None

    def emit(lines: list[str]) -> None:
        for ln in lines:
            outstream.write(ln + "\n")
        outstream.flush()

    for raw in instream:
        line = raw.strip()
        if not line:
            continue
        if line == "quit":
            # A pending `go` runs to completion; `stop` is the interrupt.
            if pending is not None:
                pending.join()
            return 0
        if line == "stop":
            if session.searcher is not None:
                session.searcher.request_stop()
            if pending is not None:
                pending.join()
                pending = None
            emit(["ok"])
            continue
        if pending is not None:
            pending.join()
            pending = None
        if line == "go" or line.startswith("go "):
            def run_go(cmdline=line):
                emit(session.handle(cmdline))

            pending = threading.Thread(target=run_go, daemon=True)
            pending.start()
            continue
        if line.startswith("serve"):
            args = line.split()[1:]
            port = 8765
            if "--port" in args:
                port = int(args[args.index("--port") + 1])
            emit([f"serving port {port}"])
            serve(port, variant=session.variant)
            continue
        emit(session.handle(line))
    if pending is not None:
        pending.join()
    return 0


def serve(port: int, variant: Variant = Variant.BYZANTINE_REGULAR) -> None:
    """WebSocket bridge: the same line protocol, one session per connection,
    with a `state` frame pushed after every applied move."""
    import asyncio

    import websockets

    async def handler(ws):
        session = ProtocolSession(variant)
        loop = asyncio.get_running_loop()
        await ws.send(session.state_frame())
        async for message in ws:
            line = message.strip()
            if line == "quit":
                await ws.close()
                return
            if line == "stop":
                if session.searcher is not None:
                    session.searcher.request_stop()
                await ws.send("ok")
                continue
            lines = await loop.run_in_executor(None, session.handle_with_state, line)
            for ln in lines:
                await ws.send(ln)

    async def main() -> None:
        async with websockets.serve(handler, "127.0.0.1", port):
            await asyncio.Future()

    asyncio.run(main())


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="zatrikion",
        description="Engine for Byzantine chess and circular chess on the 4x16 annulus.",
    )
    parser.add_argument(
        "--variant",
        default="byzantine-regular",
        choices=sorted(_VARIANT_ALIASES),
        help="initial variant for the session",
    )
    parser.add_argument(
        "--protocol", default="stdio", choices=("stdio", "ws"), help="front-end protocol"
    )
    parser.add_argument("--port", type=int, default=8765, help="WebSocket port")
    parser.add_argument("--config", help="run a self-play match from a key=value file and exit")
    args = parser.parse_args(argv)
    variant = _VARIANT_ALIASES[args.variant]
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as f:
                config, out, fmt = parse_match_config(f.read())
        except (OSError, ProtocolError) as e:
            print(f"error: {e}", file=sys.stderr)
            return 2
        stats = run_match(config)
        export_stats(stats, out, fmt)
        print(out)
        return 0
    if args.protocol == "ws":
        try:
            serve(args.port, variant)
        except OSError as e:
            print(f"error: cannot serve on port {args.port}: {e}", file=sys.stderr)
            return 2
        return 0
    return protocol_loop(variant=variant)


if __name__ == "__main__":
    raise SystemExit(main())
