"""Composition board: a scene graph of vector elements with affine
transforms, grouping, z-order, and cut-out application.

Operations are functional (board in, board out) so callers get snapshots
and replay for free. Transforms are 2x3 row-major matrices; an op is
applied by left-composition (new = op @ old), so the op acts in the
parent's coordinate frame.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    CrossParentGroup,
    DuplicateId,
    NoOverlap,
    NotACutout,
    NotAGroup,
    SchemaError,
    SingularTransform,
    UnknownId,
)
from .patterns import VectorPath

IDENTITY = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])

ELEMENT_KINDS = ("contour", "cutout")
FILLS = ("foreground", "hole")
PROVENANCE_SOURCES = ("retrieved", "generated", "extracted")

# ids must be export-safe; "canvas" is the structural group in the document
_ID_RE = re.compile(r"[A-Za-z0-9_-]+")


def _check_id(node_id):
    if not isinstance(node_id, str) or not _ID_RE.fullmatch(node_id) or node_id == "canvas":
        raise SchemaError(f"invalid node id {node_id!r}")


def to3(m: np.ndarray) -> np.ndarray:
    out = np.eye(3)
    out[:2, :] = m
    return out


def compose(a, b) -> np.ndarray:
    """a @ b on 2x3 affines (apply b first, then a)."""
    return (to3(np.asarray(a, dtype=np.float64)) @ to3(np.asarray(b, dtype=np.float64)))[:2]


def invert(m) -> np.ndarray:
    m3 = to3(np.asarray(m, dtype=np.float64))
    if abs(np.linalg.det(m3)) < 1e-12:
        raise SingularTransform("transform is not invertible")
    return np.linalg.inv(m3)[:2]


def translation(dx: float, dy: float) -> np.ndarray:
    return np.array([[1.0, 0.0, float(dx)], [0.0, 1.0, float(dy)]])


def _about(core: np.ndarray, center) -> np.ndarray:
    if not center:
        return core
    cx, cy = float(center[0]), float(center[1])
    return compose(translation(cx, cy), compose(core, translation(-cx, -cy)))


def op_matrix(op: str, params: dict) -> np.ndarray:
    """Matrix for a named transform op.

    translate: dx, dy. scale: sx, sy (default sx), center optional.
    rotate: degrees, center optional. flip_h / flip_v: center optional.
    Flips are exact involutions: entries stay in {-1, 0, 1} plus a
    translation that cancels termwise when applied twice.
    """
    params = params or {}
    center = params.get("center")
    if op == "translate":
        return translation(params.get("dx", 0.0), params.get("dy", 0.0))
    if op == "scale":
        sx = float(params.get("sx", 1.0))
        sy = float(params.get("sy", sx))
        if sx == 0.0 or sy == 0.0:
            raise SingularTransform("scale factor must be nonzero")
        return _about(np.array([[sx, 0.0, 0.0], [0.0, sy, 0.0]]), center)
    if op == "rotate":
        t = math.radians(float(params.get("degrees", 0.0)))
        c, s = math.cos(t), math.sin(t)
        return _about(np.array([[c, -s, 0.0], [s, c, 0.0]]), center)
    if op == "flip_h":
        return _about(np.array([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]), center)
    if op == "flip_v":
        return _about(np.array([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0]]), center)
    raise SchemaError(f"unknown transform op {op!r}")


@dataclass(frozen=True)
class Provenance:
    source: str
    work_id: str | None = None
    cutout_id: str | None = None

    def __post_init__(self):
        if self.source not in PROVENANCE_SOURCES:
            raise SchemaError(f"unknown provenance source {self.source!r}")


@dataclass(frozen=True, eq=False)
class Hole:
    """A consumed cut-out attached to a target element.

    ``transform`` maps the hole path into the target's local frame, so the
    hole follows the target through any later transform or regrouping.
    """

    id: str
    path: VectorPath
    transform: np.ndarray
    provenance: Provenance | None = None


@dataclass(frozen=True, eq=False)
class Element:
    id: str
    path: VectorPath
    transform: np.ndarray = field(default_factory=lambda: IDENTITY.copy())
    kind: str = "contour"
    fill: str = "foreground"
    provenance: Provenance | None = None
    holes: tuple = ()

    def __post_init__(self):
        _check_id(self.id)
        m = np.asarray(self.transform, dtype=np.float64)
        if m.shape != (2, 3):
            raise SchemaError("transform must be a 2x3 matrix")
        if abs(np.linalg.det(to3(m))) < 1e-12:
            raise SingularTransform(f"element {self.id!r} transform is singular")
        if self.kind not in ELEMENT_KINDS:
            raise SchemaError(f"unknown element kind {self.kind!r}")
        if self.fill not in FILLS:
            raise SchemaError(f"unknown fill {self.fill!r}")
        if self.kind == "cutout" and self.fill != "hole":
            raise SchemaError("cut-out elements must carry fill=hole")
        object.__setattr__(self, "transform", m)


@dataclass(frozen=True, eq=False)
class Group:
    id: str
    children: tuple = ()
    transform: np.ndarray = field(default_factory=lambda: IDENTITY.copy())

    def __post_init__(self):
        _check_id(self.id)
        m = np.asarray(self.transform, dtype=np.float64)
        if m.shape != (2, 3):
            raise SchemaError("transform must be a 2x3 matrix")
        if abs(np.linalg.det(to3(m))) < 1e-12:
            raise SingularTransform(f"group {self.id!r} transform is singular")
        object.__setattr__(self, "transform", m)
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class Board:
    """Scene graph snapshot. ``roots`` is z-order, back to front."""

    canvas: tuple[float, float] = (1024.0, 1024.0)
    nodes: dict = field(default_factory=dict)
    roots: tuple = ()
    next_id: int = 1


def new_board(canvas=(1024.0, 1024.0)) -> Board:
    return Board(canvas=(float(canvas[0]), float(canvas[1])))


def _node(board: Board, node_id: str):
    try:
        return board.nodes[node_id]
    except KeyError:
        raise UnknownId(f"no node {node_id!r} on the board") from None


def parent_map(board: Board) -> dict:
    """id -> parent group id (None for roots)."""
    parents = {r: None for r in board.roots}
    for nid, node in board.nodes.items():
        if isinstance(node, Group):
            for child in node.children:
                parents[child] = nid
    return parents


def world_transform(board: Board, node_id: str) -> np.ndarray:
    _node(board, node_id)
    parents = parent_map(board)
    chain = []
    cur = node_id
    while cur is not None:
        chain.append(board.nodes[cur].transform)
        cur = parents.get(cur)
    m = IDENTITY
    for t in chain:  # innermost first; world = outer @ ... @ own
        m = compose(t, m)
    return m


def mint_id(board: Board) -> tuple[Board, str]:
    n = board.next_id
    while f"n{n}" in board.nodes:
        n += 1
    return replace(board, next_id=n + 1), f"n{n}"


def add_element(board: Board, element: Element) -> Board:
    if element.id in board.nodes:
        raise DuplicateId(f"id {element.id!r} already on the board")
    nodes = dict(board.nodes)
    nodes[element.id] = element
    return replace(board, nodes=nodes, roots=board.roots + (element.id,))


def apply_transform(board: Board, node_id: str, op: str, params: dict | None = None) -> Board:
    node = _node(board, node_id)
    m = op_matrix(op, params or {})
    new_t = compose(m, node.transform)
    if abs(np.linalg.det(to3(new_t))) < 1e-12:
        raise SingularTransform("resulting transform is singular")
    nodes = dict(board.nodes)
    nodes[node_id] = replace(node, transform=new_t)
    return replace(board, nodes=nodes)


def _sibling_list(board: Board, parent: str | None) -> tuple:
    return board.roots if parent is None else board.nodes[parent].children


def _set_siblings(board: Board, parent: str | None, siblings: tuple) -> Board:
    if parent is None:
        return replace(board, roots=siblings)
    nodes = dict(board.nodes)
    nodes[parent] = replace(nodes[parent], children=siblings)
    return replace(board, nodes=nodes)


def group(board: Board, ids) -> tuple[Board, str]:
    """Wrap siblings in a fresh identity-transform group.

    The group lands at the z position of its frontmost member; members keep
    their relative order inside the group.
    """
    ids = list(ids)
    if len(ids) < 2:
        raise CrossParentGroup("grouping needs at least two nodes")
    if len(set(ids)) != len(ids):
        raise CrossParentGroup("grouping the same node twice")
    for nid in ids:
        _node(board, nid)
    parents = parent_map(board)
    parent_set = {parents.get(nid) for nid in ids}
    if len(parent_set) != 1:
        raise CrossParentGroup("grouped nodes must share one parent")
    parent = parent_set.pop()
    siblings = _sibling_list(board, parent)
    member = set(ids)
    ordered = tuple(s for s in siblings if s in member)
    top = max(i for i, s in enumerate(siblings) if s in member)
    insert_at = sum(1 for s in siblings[:top] if s not in member)
    remaining = [s for s in siblings if s not in member]

    board, gid = mint_id(board)
    nodes = dict(board.nodes)
    nodes[gid] = Group(id=gid, children=ordered)
    board = replace(board, nodes=nodes)
    remaining.insert(insert_at, gid)
    return _set_siblings(board, parent, tuple(remaining)), gid


def ungroup(board: Board, group_id: str) -> Board:
    node = _node(board, group_id)
    if not isinstance(node, Group):
        raise NotAGroup(f"{group_id!r} is not a group")
    parents = parent_map(board)
    parent = parents.get(group_id)
    siblings = _sibling_list(board, parent)
    at = siblings.index(group_id)

    nodes = dict(board.nodes)
    del nodes[group_id]
    # push the group transform into each child; world transforms stay put
    for child in node.children:
        nodes[child] = replace(nodes[child], transform=compose(node.transform, nodes[child].transform))
    board = replace(board, nodes=nodes)
    spliced = siblings[:at] + node.children + siblings[at + 1 :]
    return _set_siblings(board, parent, spliced)


def duplicate(board: Board, node_id: str) -> tuple[Board, str]:
    """Deep-copy a subtree; the copy lands just above the source."""
    src = _node(board, node_id)
    parents = parent_map(board)
    parent = parents.get(node_id)

    new_nodes = {}

    def copy_subtree(nid: str) -> str:
        nonlocal board
        node = board.nodes[nid]
        board, fresh = mint_id(board)
        if isinstance(node, Group):
            kids = tuple(copy_subtree(c) for c in node.children)
            new_nodes[fresh] = Group(id=fresh, children=kids, transform=node.transform.copy())
        else:
            new_nodes[fresh] = replace(node, id=fresh, transform=node.transform.copy())
        return fresh

    new_id = copy_subtree(node_id)
    nodes = dict(board.nodes)
    nodes.update(new_nodes)
    board = replace(board, nodes=nodes)
    siblings = _sibling_list(board, parent)
    at = siblings.index(node_id)
    return _set_siblings(board, parent, siblings[: at + 1] + (new_id,) + siblings[at + 1 :]), new_id


def _world_bbox(board: Board, node_id: str):
    node = board.nodes[node_id]
    if isinstance(node, Group):
        boxes = [_world_bbox(board, c) for c in node.children]
        boxes = [b for b in boxes if b is not None]
        if not boxes:
            return None
        return (
            min(b[0] for b in boxes),
            min(b[1] for b in boxes),
            max(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )
    return node.path.transformed(world_transform(board, node_id)).bounds()


def apply_cutout(board: Board, cutout_id: str, target_id: str) -> Board:
    """Consume a cut-out element as a hole of the target.

    The cut-out leaves the forest; its geometry is stored relative to the
    target's local frame and merged into the target path at export under
    the evenodd rule, so it renders as a true void.
    """
    cut = _node(board, cutout_id)
    target = _node(board, target_id)
    if not isinstance(cut, Element) or cut.kind != "cutout":
        raise NotACutout(f"{cutout_id!r} is not a cut-out element")
    if not isinstance(target, Element):
        raise NotACutout(f"target {target_id!r} must be a leaf element")
    if cutout_id == target_id:
        raise NotACutout("a cut-out cannot be applied to itself")

    ca = _world_bbox(board, cutout_id)
    ta = _world_bbox(board, target_id)
    if ca[2] < ta[0] or ta[2] < ca[0] or ca[3] < ta[1] or ta[3] < ca[1]:
        raise NoOverlap("cut-out does not overlap the target")

    rel = compose(invert(world_transform(board, target_id)), world_transform(board, cutout_id))
    hole = Hole(id=cutout_id, path=cut.path, transform=rel, provenance=cut.provenance)

    parents = parent_map(board)
    parent = parents.get(cutout_id)
    siblings = _sibling_list(board, parent)
    board = _set_siblings(board, parent, tuple(s for s in siblings if s != cutout_id))
    nodes = dict(board.nodes)
    del nodes[cutout_id]
    nodes[target_id] = replace(nodes[target_id], holes=nodes[target_id].holes + (hole,))
    return replace(board, nodes=nodes)


def export_paths(board: Board, node_id: str) -> VectorPath:
    """Element geometry as exported: own subpaths plus holes baked into the
    element's local frame, one evenodd path."""
    el = board.nodes[node_id]
    subpaths = list(el.path.subpaths)
    for hole in el.holes:
        subpaths.extend(hole.path.transformed(hole.transform).subpaths)
    return VectorPath(tuple(subpaths))


def validate_board(board: Board) -> list[str]:
    """Forest invariant check; empty list means healthy."""
    problems = []
    seen: dict[str, int] = {}

    def visit(nid, depth):
        if depth > len(board.nodes) + 1:
            problems.append("cycle detected")
            return
        seen[nid] = seen.get(nid, 0) + 1
        node = board.nodes.get(nid)
        if node is None:
            problems.append(f"dangling reference {nid!r}")
            return
        if isinstance(node, Group):
            if len(set(node.children)) != len(node.children):
                problems.append(f"group {nid!r} repeats a child")
            for c in node.children:
                visit(c, depth + 1)

    for r in board.roots:
        visit(r, 0)
    if len(set(board.roots)) != len(board.roots):
        problems.append("z-order repeats a root")
    for nid, count in seen.items():
        if count > 1:
            problems.append(f"{nid!r} referenced {count} times")
    for nid in board.nodes:
        if nid not in seen:
            problems.append(f"{nid!r} not reachable from the roots")
    for nid, node in board.nodes.items():
        if nid != node.id:
            problems.append(f"key {nid!r} does not match node id {node.id!r}")
        if abs(np.linalg.det(to3(node.transform))) < 1e-12:
            problems.append(f"{nid!r} transform is singular")
        if isinstance(node, Element) and node.kind == "cutout" and node.fill != "hole":
            problems.append(f"{nid!r} is a cut-out without hole fill")
    return problems
