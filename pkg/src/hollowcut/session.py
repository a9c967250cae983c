"""Session state: the board plus the ordered mutation log that rebuilds it.

Every board change goes through a small record vocabulary so that replaying
the log from an empty board always lands on the current state, byte for
byte once exported. Sessions persist as one canonical JSON document; load
re-replays the log and refuses documents whose stored board disagrees.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .board import (
    Board,
    Element,
    Group,
    Hole,
    Provenance,
    add_element,
    apply_cutout,
    apply_transform,
    duplicate,
    group,
    new_board,
    ungroup,
)
from .errors import CorruptSession, SchemaError
from .ideation import DesignIntent, IdeaDescription, SuggestionSet
from .patterns import VectorPath

SESSION_SCHEMA = "hollowcut/session@1"


# ------------------------------------------------------------- board docs

def _matrix_doc(m) -> list:
    return [[float(v) for v in row] for row in np.asarray(m, dtype=np.float64)]


def _path_doc(path: VectorPath) -> dict:
    return {
        "fill_rule": path.fill_rule,
        "subpaths": [[[float(x), float(y)] for x, y in sp] for sp in path.subpaths],
    }


def _path_from_doc(doc) -> VectorPath:
    return VectorPath(tuple(tuple((x, y) for x, y in sp) for sp in doc["subpaths"]))


def _prov_doc(p: Provenance | None):
    if p is None:
        return None
    return {"source": p.source, "work_id": p.work_id, "cutout_id": p.cutout_id}


def _prov_from_doc(doc):
    if doc is None:
        return None
    return Provenance(source=doc["source"], work_id=doc.get("work_id"), cutout_id=doc.get("cutout_id"))


def element_doc(el: Element) -> dict:
    return {
        "type": "element",
        "kind": el.kind,
        "fill": el.fill,
        "transform": _matrix_doc(el.transform),
        "path": _path_doc(el.path),
        "provenance": _prov_doc(el.provenance),
        "holes": [
            {
                "id": h.id,
                "transform": _matrix_doc(h.transform),
                "path": _path_doc(h.path),
                "provenance": _prov_doc(h.provenance),
            }
            for h in el.holes
        ],
    }


def element_from_doc(node_id: str, doc) -> Element:
    holes = tuple(
        Hole(
            id=h["id"],
            path=_path_from_doc(h["path"]),
            transform=np.asarray(h["transform"], dtype=np.float64),
            provenance=_prov_from_doc(h.get("provenance")),
        )
        for h in doc.get("holes", [])
    )
    return Element(
        id=node_id,
        path=_path_from_doc(doc["path"]),
        transform=np.asarray(doc["transform"], dtype=np.float64),
        kind=doc["kind"],
        fill=doc["fill"],
        provenance=_prov_from_doc(doc.get("provenance")),
        holes=holes,
    )


def board_doc(board: Board) -> dict:
    nodes = {}
    for nid, node in board.nodes.items():
        if isinstance(node, Group):
            nodes[nid] = {
                "type": "group",
                "children": list(node.children),
                "transform": _matrix_doc(node.transform),
            }
        else:
            nodes[nid] = element_doc(node)
    return {
        "canvas": [float(board.canvas[0]), float(board.canvas[1])],
        "next_id": board.next_id,
        "roots": list(board.roots),
        "nodes": nodes,
    }


def board_from_doc(doc) -> Board:
    try:
        nodes = {}
        for nid, nd in doc["nodes"].items():
            if nd["type"] == "group":
                nodes[nid] = Group(
                    id=nid,
                    children=tuple(nd["children"]),
                    transform=np.asarray(nd["transform"], dtype=np.float64),
                )
            elif nd["type"] == "element":
                nodes[nid] = element_from_doc(nid, nd)
            else:
                raise SchemaError(f"unknown node type {nd['type']!r}")
        return Board(
            canvas=(float(doc["canvas"][0]), float(doc["canvas"][1])),
            nodes=nodes,
            roots=tuple(doc["roots"]),
            next_id=int(doc["next_id"]),
        )
    except (KeyError, TypeError, ValueError, SchemaError) as exc:
        raise CorruptSession(f"bad board document: {exc}") from exc


def boards_equal(a: Board, b: Board) -> bool:
    return board_doc(a) == board_doc(b)


# --------------------------------------------------------------- op replay

def apply_op(board: Board, record: dict) -> Board:
    """One log record applied to a board; minted ids are deterministic, so
    replay reconstructs the same graph every time."""
    try:
        op = record["op"]
        if op == "add_element":
            return add_element(board, element_from_doc(record["id"], record["element"]))
        if op == "transform":
            return apply_transform(board, record["id"], record["name"], record.get("params") or {})
        if op == "group":
            return group(board, record["ids"])[0]
        if op == "ungroup":
            return ungroup(board, record["id"])
        if op == "duplicate":
            return duplicate(board, record["id"])[0]
        if op == "apply_cutout":
            return apply_cutout(board, record["cutout_id"], record["target_id"])
    except KeyError as exc:
        raise CorruptSession(f"op record missing field: {exc}") from exc
    raise CorruptSession(f"unknown op {record.get('op')!r}")


def replay(canvas, op_log) -> Board:
    board = new_board(canvas)
    for record in op_log:
        board = apply_op(board, record)
    return board


# ----------------------------------------------------------------- session

@dataclass
class Session:
    session_id: str
    intent: DesignIntent | None = None
    suggestions: SuggestionSet | None = None
    idea: IdeaDescription | None = None
    references: dict = field(default_factory=lambda: {"retrieved": [], "generated": []})
    canvas: tuple[float, float] = (1024.0, 1024.0)
    op_log: list = field(default_factory=list)
    board: Board = None
    version: int = 0

    def __post_init__(self):
        if self.board is None:
            self.board = new_board(self.canvas)

    def mutate(self, record: dict) -> Board:
        """Apply one op, append it to the log, bump the version."""
        self.board = apply_op(self.board, record)
        self.op_log.append(record)
        self.version += 1
        return self.board

    def undo(self) -> bool:
        """Drop the newest op and rebuild by replay. False when nothing to drop."""
        if not self.op_log:
            return False
        self.op_log.pop()
        self.board = replay(self.canvas, self.op_log)
        self.version += 1
        return True

    def touch(self):
        self.version += 1


def _intent_doc(intent: DesignIntent | None):
    if intent is None:
        return None
    return {"intent_text": intent.intent_text, "selections": dict(intent.selections)}


def _intent_from_doc(doc):
    if doc is None:
        return None
    return DesignIntent(intent_text=doc["intent_text"], selections=doc["selections"])


def _idea_doc(idea: IdeaDescription | None):
    if idea is None:
        return None
    return {"text": idea.text, "accepted": list(idea.accepted), "intent": _intent_doc(idea.intent)}


def _idea_from_doc(doc):
    if doc is None:
        return None
    return IdeaDescription(
        text=doc["text"], accepted=tuple(doc["accepted"]), intent=_intent_from_doc(doc["intent"])
    )


def _suggestions_doc(s: SuggestionSet | None):
    if s is None:
        return None
    return {
        "objects": [[n, m] for n, m in s.objects],
        "patterns": [[n, m] for n, m in s.patterns],
        "source": s.source,
    }


def _suggestions_from_doc(doc):
    if doc is None:
        return None
    return SuggestionSet(
        objects=tuple((n, m) for n, m in doc["objects"]),
        patterns=tuple((n, m) for n, m in doc["patterns"]),
        source=doc["source"],
    )


def session_doc(session: Session) -> dict:
    return {
        "schema": SESSION_SCHEMA,
        "session_id": session.session_id,
        "intent": _intent_doc(session.intent),
        "suggestions": _suggestions_doc(session.suggestions),
        "idea": _idea_doc(session.idea),
        "references": {
            "retrieved": list(session.references.get("retrieved", [])),
            "generated": list(session.references.get("generated", [])),
        },
        "canvas": [float(session.canvas[0]), float(session.canvas[1])],
        "board": board_doc(session.board),
        "op_log": list(session.op_log),
        "version": session.version,
    }


def session_from_doc(doc) -> Session:
    if not isinstance(doc, dict) or doc.get("schema") != SESSION_SCHEMA:
        raise CorruptSession(f"expected schema {SESSION_SCHEMA!r}")
    try:
        canvas = (float(doc["canvas"][0]), float(doc["canvas"][1]))
        session = Session(
            session_id=doc["session_id"],
            intent=_intent_from_doc(doc.get("intent")),
            suggestions=_suggestions_from_doc(doc.get("suggestions")),
            idea=_idea_from_doc(doc.get("idea")),
            references={
                "retrieved": list(doc["references"]["retrieved"]),
                "generated": list(doc["references"]["generated"]),
            },
            canvas=canvas,
            op_log=list(doc["op_log"]),
            board=board_from_doc(doc["board"]),
            version=int(doc["version"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptSession(f"bad session document: {exc}") from exc
    # the log is the source of truth; a board that disagrees is corrupt
    if not boards_equal(replay(canvas, session.op_log), session.board):
        raise CorruptSession("op log does not replay to the stored board")
    return session


def dumps_session(session: Session) -> str:
    return json.dumps(session_doc(session), sort_keys=True, indent=1) + "\n"


def save_session(session: Session, path) -> None:
    Path(path).write_text(dumps_session(session), encoding="utf-8")


def load_session(path) -> Session:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CorruptSession(f"unreadable session file: {exc}") from exc
    return session_from_doc(doc)
