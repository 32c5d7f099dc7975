import asyncio
import threading
import time

import pytest

from zatrikion import Variant
from zatrikion.cli import ProtocolSession, parse_match_config, protocol_loop, serve


@pytest.fixture()
def session():
    return ProtocolSession()


def one(session, cmd):
    out = session.handle(cmd)
    assert len(out) >= 1
    return out


def test_variant_position_perft(session):
    assert one(session, "variant byzantine-regular") == ["ok"]
    assert one(session, "position start") == ["ok"]
    assert one(session, "perft 2") == ["196"]


def test_position_moves_and_status(session):
    one(session, "position start moves c1b1")
    assert one(session, "status") == ["ongoing"]


def test_go_depth_on_mate_in_one(session):
    one(session, "variant byzantine-regular")
    out = session.handle("position cfen " + _mate_in_one_cfen())
    assert out == ["ok"]
    lines = session.handle("go depth 1")
    assert lines[-1] == "bestmove c2a2"
    assert lines[0].startswith("info depth 1 score cp ")


def _mate_in_one_cfen():
    from zatrikion import custom_position, Piece, PieceKind, WHITE, BLACK
    from zatrikion.cfen import format_cfen

    pos = custom_position(
        Variant.BYZANTINE_REGULAR,
        {
            "a1": Piece(BLACK, PieceKind.KING),
            "i2": Piece(WHITE, PieceKind.KING),
            "c2": Piece(WHITE, PieceKind.ROOK),
            "p4": Piece(WHITE, PieceKind.ROOK),
            "c3": Piece(WHITE, PieceKind.KNIGHT),
            "h4": Piece(BLACK, PieceKind.PAWN, __import__("zatrikion").CW),
        },
        side_to_move=WHITE,
    )
    return format_cfen(pos)


def test_cfen_load_and_dump(session):
    one(session, "variant byzantine-symmetric")
    text = session.handle("cfen")[0]
    assert text.split("/")[0] == "2SKQP4skqp2"
    assert session.handle(f"position cfen {text}") == ["ok"]
    assert session.handle("cfen") == [text]


def test_errors_keep_session_alive(session):
    before = session.handle("cfen")[0]
    assert session.handle("nonsense")[0].startswith("error ")
    assert session.handle("variant klingon")[0].startswith("error ")
    assert session.handle("move zz99")[0].startswith("error ")
    assert session.handle("position cfen bogus")[0].startswith("error ")
    assert session.handle("cfen") == [before]


def test_move_command_updates_state(session):
    out = session.handle("move c1b1")
    assert out == ["ok c1b1"]
    assert session.state_changed
    frame = session.state_frame()
    assert frame.startswith("state ")
    assert " ongoing " in frame or frame.endswith("ongoing")


def test_eval_outputs_number(session):
    value = int(session.handle("eval")[0])
    assert value == 0  # symmetric start


def test_parse_match_config_roundtrip():
    cfg, out, fmt = parse_match_config(
        """
        variant=circular-fide
        games=5
        depth=2
        seed=7
        diversify=random-opening:4:3
        no-capture=20
        ply-cap=120
        workers=2
        out=stats.csv
        format=csv
        """
    )
    assert cfg.variant is Variant.CIRCULAR_FIDE
    assert cfg.games == 5
    assert cfg.limits.max_depth == 2
    assert cfg.adjudicate_no_capture == 20
    assert cfg.ply_cap == 120
    assert (out, fmt) == ("stats.csv", "csv")


def test_selfplay_command(tmp_path, session):
    config = tmp_path / "match.cfg"
    out_path = tmp_path / "stats.json"
    config.write_text(
        f"variant=byzantine-regular\ngames=2\ndepth=1\nseed=3\nply-cap=40\nout={out_path}\n"
    )
    result = session.handle(f"selfplay {config}")
    assert result == [str(out_path)]
    import json

    data = json.loads(out_path.read_text())
    assert data["games"] == 2


def test_protocol_loop_quit_vs_eof(tmp_path):
    import io

    out = io.StringIO()
    code = protocol_loop(io.StringIO("position start\nperft 1\nquit\n"), out)
    assert code == 0
    lines = out.getvalue().strip().splitlines()
    assert lines == ["ok", "14"]


def test_stop_interrupts_go(tmp_path):
    import io

    out = io.StringIO()
    start = time.monotonic()
    code = protocol_loop(
        io.StringIO("go depth 40\nstop\nquit\n"), out
    )
    elapsed = time.monotonic() - start
    assert code == 0
    assert elapsed < 30
    text = out.getvalue()
    assert "bestmove " in text


# ---------------------------------------------------------------------------
# WebSocket bridge.


@pytest.fixture()
def ws_server():
    import socket

    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    thread = threading.Thread(
        target=serve, args=(port,), kwargs={"variant": Variant.BYZANTINE_REGULAR},
        daemon=True,
    )
    thread.start()
    time.sleep(0.6)
    return port


def test_ws_sessions_are_isolated_and_push_state(ws_server):
    import websockets

    async def scenario():
        async with websockets.connect(f"ws://127.0.0.1:{ws_server}") as a, \
                websockets.connect(f"ws://127.0.0.1:{ws_server}") as b:
            hello_a = await a.recv()
            hello_b = await b.recv()
            assert hello_a.startswith("state ") and hello_b.startswith("state ")

            await a.send("variant byzantine-symmetric")
            reply = await a.recv()
            assert reply == "ok"
            frame = await a.recv()
            assert frame.startswith("state 2SKQP4skqp2/")

            # Session b still sits on the regular setup.
            await b.send("cfen")
            cfen_b = await b.recv()
            assert cfen_b.startswith("2SQKP4skqp2/")

            await a.send("move c1b1")
            assert (await a.recv()).startswith("ok")
            frame = await a.recv()
            assert frame.startswith("state 1S1KQP4skqp2/")

            await a.send("move zz99")
            err = await a.recv()
            assert err.startswith("error ")

    asyncio.run(scenario())
