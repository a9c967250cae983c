"""Session persistence: op-log replay, undo, canonical save/load, and
corruption detection."""

import json

import numpy as np
import pytest

from hollowcut.board import Element, Provenance, new_board, validate_board
from hollowcut.errors import CorruptSession
from hollowcut.ideation import DesignIntent, IdeaDescription, SuggestionSet
from hollowcut.patterns import VectorPath
from hollowcut.session import (
    SESSION_SCHEMA,
    Session,
    apply_op,
    board_doc,
    board_from_doc,
    boards_equal,
    dumps_session,
    element_doc,
    load_session,
    replay,
    save_session,
    session_from_doc,
)
from hollowcut.svgio import export_svg


def rect_path(x0, y0, w, h):
    pts = np.array(
        [[x0, y0], [x0 + w, y0], [x0 + w, y0 + h], [x0, y0 + h], [x0, y0]],
        dtype=float,
    )
    return VectorPath((pts,))


def rec_add(el):
    return {"op": "add_element", "id": el.id, "element": element_doc(el)}


def build_session(sid="s1"):
    s = Session(session_id=sid, canvas=(64.0, 64.0))
    s.mutate(
        rec_add(
            Element(
                id="t",
                path=rect_path(4, 4, 30, 30),
                provenance=Provenance(source="retrieved", work_id="w003"),
            )
        )
    )
    s.mutate(
        rec_add(
            Element(
                id="c",
                path=rect_path(10, 10, 6, 6),
                kind="cutout",
                fill="hole",
                provenance=Provenance(source="extracted", work_id="w003", cutout_id="h1"),
            )
        )
    )
    s.mutate({"op": "transform", "id": "t", "name": "rotate", "params": {"degrees": 15}})
    s.mutate({"op": "apply_cutout", "cutout_id": "c", "target_id": "t"})
    s.mutate(rec_add(Element(id="d", path=rect_path(40, 40, 10, 10))))
    s.mutate({"op": "duplicate", "id": "d"})
    s.mutate({"op": "group", "ids": ["d", "n1"]})
    return s


def test_board_doc_round_trip():
    s = build_session()
    restored = board_from_doc(board_doc(s.board))
    assert boards_equal(restored, s.board)
    assert validate_board(restored) == []
    hole = restored.nodes["t"].holes[0]
    assert hole.id == "c" and hole.provenance.cutout_id == "h1"
    assert np.array_equal(hole.transform, s.board.nodes["t"].holes[0].transform)


def test_mutate_logs_and_versions():
    s = build_session()
    assert len(s.op_log) == 7
    assert s.version == 7
    assert boards_equal(replay(s.canvas, s.op_log), s.board)


def test_apply_op_rejects_bad_records():
    b = new_board((64, 64))
    with pytest.raises(CorruptSession):
        apply_op(b, {"op": "teleport", "id": "x"})
    with pytest.raises(CorruptSession):
        apply_op(b, {"op": "transform", "name": "rotate"})  # id missing


def test_undo_rolls_back_one_op():
    s = build_session()
    before_last = replay(s.canvas, s.op_log[:-1])
    v = s.version
    assert s.undo() is True
    assert boards_equal(s.board, before_last)
    assert s.version == v + 1
    while s.undo():
        pass
    assert s.op_log == [] and boards_equal(s.board, new_board(s.canvas))
    assert Session(session_id="x").undo() is False


def test_save_load_round_trip(tmp_path):
    s = build_session()
    s.intent = DesignIntent("festive window", {"Style": "Abstract"})
    s.suggestions = SuggestionSet(
        objects=(("magpie", "joy"),), patterns=(("crescent", "feathers"),), source="fallback"
    )
    s.idea = IdeaDescription(text="an idea", accepted=("magpie",), intent=s.intent)
    s.references = {"retrieved": ["w001", "w002"], "generated": ["gen:abc"]}
    path = tmp_path / "s1.json"
    save_session(s, path)

    loaded = load_session(path)
    assert loaded.session_id == "s1"
    assert loaded.intent == s.intent
    assert loaded.suggestions == s.suggestions
    assert loaded.idea == s.idea
    assert loaded.references == s.references
    assert loaded.version == s.version
    assert boards_equal(loaded.board, s.board)
    assert export_svg(loaded.board) == export_svg(s.board)


def test_dumps_is_canonical_and_stable(tmp_path):
    s = build_session()
    text = dumps_session(s)
    assert dumps_session(s) == text
    path = tmp_path / "s.json"
    save_session(s, path)
    assert dumps_session(load_session(path)) == text


def test_identical_histories_dump_identically():
    assert dumps_session(build_session()) == dumps_session(build_session())


def test_corruption_is_detected(tmp_path):
    s = build_session()
    doc = json.loads(dumps_session(s))

    with pytest.raises(CorruptSession):
        session_from_doc({**doc, "schema": "hollowcut/session@999"})

    # silently edited board that the log cannot reproduce
    tampered = json.loads(dumps_session(s))
    tampered["board"]["nodes"]["t"]["transform"][0][2] += 5.0
    with pytest.raises(CorruptSession):
        session_from_doc(tampered)

    # op log record with an unknown verb
    bad_log = json.loads(dumps_session(s))
    bad_log["op_log"][2]["op"] = "teleport"
    with pytest.raises(CorruptSession):
        session_from_doc(bad_log)

    missing = json.loads(dumps_session(s))
    del missing["op_log"]
    with pytest.raises(CorruptSession):
        session_from_doc(missing)

    half = tmp_path / "half.json"
    half.write_text(dumps_session(s)[: len(dumps_session(s)) // 2])
    with pytest.raises(CorruptSession):
        load_session(half)

    with pytest.raises(CorruptSession):
        load_session(tmp_path / "nope.json")


def test_replayed_boards_export_identically():
    s = build_session()
    rebuilt = replay(s.canvas, json.loads(json.dumps(s.op_log)))
    assert export_svg(rebuilt) == export_svg(s.board)
