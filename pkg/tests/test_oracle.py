import random

import numpy as np
import pytest

from zatrikion import BLACK, Coord, Piece, PieceKind, Variant, WHITE
from zatrikion.oracle import (
    OracleError,
    OracleState,
    OracleTable,
    ValueKind,
    _DRAW,
    _ILLEGAL,
    _LOSS,
    _WIN,
    parse_material,
    probe,
    solve,
)

K, Q, R, B, N = (
    PieceKind.KING,
    PieceKind.QUEEN,
    PieceKind.ROOK,
    PieceKind.BISHOP,
    PieceKind.KNIGHT,
)


@pytest.fixture(scope="module")
def kvk():
    return solve("KvK")


@pytest.fixture(scope="module")
def knvk():
    return solve("KNvK")


def state(pieces, stm):
    return OracleState(pieces=tuple(pieces), side_to_move=stm)


def test_parse_material():
    assert parse_material("KNvKB") == ([N], [B])
    assert parse_material("KvK") == ([], [])
    with pytest.raises(OracleError):
        parse_material("NvK")
    with pytest.raises(OracleError):
        parse_material("KPvK")
    with pytest.raises(OracleError):
        parse_material("KXvK")


def test_unsupported_materials_rejected():
    with pytest.raises(OracleError):
        solve(([N, B, R], []))  # 5 pieces with kings
    with pytest.raises(OracleError):
        solve("KNvKB", variant=Variant.CIRCULAR_FIDE)


def test_kvk_every_state_draws(kvk):
    summary = kvk.summary()
    assert summary["draws"] == summary["legal_states"] > 0
    value = probe(
        kvk,
        state([(Coord(1, 0), Piece(WHITE, K)), (Coord(3, 8), Piece(BLACK, K))], WHITE),
    )
    assert value.kind is ValueKind.DRAW


def test_knvk_bare_side_to_move_loses_without_riposte(knvk):
    # Knight far from the bare king: an immediate bare-king loss.
    value = probe(
        knvk,
        state(
            [
                (Coord(1, 0), Piece(BLACK, K)),
                (Coord(2, 2), Piece(WHITE, K)),
                (Coord(2, 4), Piece(WHITE, N)),
            ],
            BLACK,
        ),
    )
    assert value.kind is ValueKind.LOSS and value.dtm == 0


def test_knvk_riposte_draws(knvk):
    value = probe(
        knvk,
        state(
            [
                (Coord(1, 0), Piece(BLACK, K)),
                (Coord(3, 4), Piece(WHITE, K)),
                (Coord(2, 1), Piece(WHITE, N)),
            ],
            BLACK,
        ),
    )
    assert value.kind is ValueKind.DRAW


def test_win_in_one_by_baring_capture():
    table = solve("KNvKB")
    # White knight takes the bishop; the bared king has no riposte.
    value = probe(
        table,
        state(
            [
                (Coord(1, 0), Piece(WHITE, K)),
                (Coord(2, 4), Piece(WHITE, N)),
                (Coord(3, 6), Piece(BLACK, B)),
                (Coord(1, 11), Piece(BLACK, K)),
            ],
            WHITE,
        ),
    )
    assert value.kind is ValueKind.WIN and value.dtm == 1


def test_probe_invariant_under_rotation_and_reflection(knvk):
    rng = random.Random(3)
    legal = knvk.legal_indices()
    for idx in rng.sample(list(legal), 200):
        st = knvk.state_of(int(idx))
        base = probe(knvk, st)
        rot = rng.randrange(1, 16)
        rotated = OracleState(
            pieces=tuple(
                (Coord(c.ring, (c.file + rot) % 16), piece) for c, piece in st.pieces
            ),
            side_to_move=st.side_to_move,
        )
        reflected = OracleState(
            pieces=tuple(
                (Coord(5 - c.ring, c.file), piece) for c, piece in st.pieces
            ),
            side_to_move=st.side_to_move,
        )
        assert probe(knvk, rotated) == base
        assert probe(knvk, reflected) == base


def test_probe_rejects_wrong_material(knvk):
    with pytest.raises(OracleError):
        probe(
            knvk,
            state(
                [
                    (Coord(1, 0), Piece(WHITE, K)),
                    (Coord(3, 8), Piece(BLACK, K)),
                    (Coord(2, 2), Piece(WHITE, B)),
                ],
                WHITE,
            ),
        )


def test_pending_bare_property():
    s = state(
        [
            (Coord(1, 0), Piece(BLACK, K)),
            (Coord(2, 2), Piece(WHITE, K)),
            (Coord(2, 4), Piece(WHITE, N)),
        ],
        BLACK,
    )
    assert s.pending_bare
    assert not OracleState(s.pieces, WHITE).pending_bare


def test_save_load_roundtrip(tmp_path, knvk):
    path = str(tmp_path / "knvk.ztb")
    knvk.save(path)
    loaded = OracleTable.load(path)
    assert loaded.material == knvk.material
    assert np.array_equal(loaded.values, knvk.values)
    assert np.array_equal(loaded.dtm, knvk.dtm)
    with open(path, "rb") as f:
        header = f.readline().decode()
    assert "index" in header and "byte" in header


def test_totals_cover_all_legal_states(knvk):
    # No unknowns remain after propagation.
    assert int((knvk.values == 0).sum()) == 0
    summary = knvk.summary()
    assert (
        summary["draws"]
        + summary["wins_for_side_to_move"]
        + summary["losses_for_side_to_move"]
        == summary["legal_states"]
    )


def test_consistency_sampled(knvk):
    # Win(N) has a move to an opponent Loss(N-1) and nothing faster; a Draw
    # has no move to an opponent Loss and keeps a drawing move available.
    from zatrikion.movegen import count_legal_moves, legal_moves, apply_move, undo_move
    from zatrikion.oracle import _Scratch, _classify_terminal, _legal_captures

    scratch = _Scratch(knvk)
    rng = random.Random(11)

    def successor_value(pos, move):
        tok = apply_move(pos, move, validated=True)
        caps = _legal_captures(pos)
        term = _classify_terminal(pos, caps, count_legal_moves(pos, pos.stm))
        if term is not None:
            out = (term, 0)
        else:
            squares = []
            for code in knvk.codes:
                squares.append(pos.board.index(code))
            idx = knvk.index_of(squares, pos.stm)
            out = (int(knvk.values[idx]), int(knvk.dtm[idx]))
        undo_move(pos, tok)
        return out

    checked = 0
    for idx in rng.sample(list(knvk.legal_indices()), 800):
        squares, stm = knvk.decode(int(idx))
        pos = scratch.set_state(squares, stm)
        caps = _legal_captures(pos)
        if _classify_terminal(pos, caps, count_legal_moves(pos, stm)) is not None:
            continue
        v, n = int(knvk.values[idx]), int(knvk.dtm[idx])
        vals = [successor_value(pos, m) for m in legal_moves(pos)]
        if v == _WIN:
            assert any(cv == _LOSS and dn == n - 1 for cv, dn in vals)
            assert not any(cv == _LOSS and dn < n - 1 for cv, dn in vals)
        elif v == _LOSS:
            assert all(cv == _WIN for cv, dn in vals)
            assert max(dn for _, dn in vals) == n - 1
        else:
            assert not any(cv == _LOSS for cv, dn in vals)
            assert any(cv == _DRAW for cv, dn in vals)
        checked += 1
    assert checked > 300
