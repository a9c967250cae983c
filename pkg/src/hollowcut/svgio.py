"""Canonical vector-document export and strict import.

The profile is deliberately narrow so round trips can be byte-exact:
one svg root, one structural canvas group, nested groups, closed paths
with absolute M/L/Z segments, evenodd fill, two fills (black / none),
matrix transforms. Path coordinates are written at 1e-4 precision;
matrix entries keep full precision (shortest digits that read back to
the same float) so import reproduces transforms exactly.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET

import numpy as np

from .board import Board, Element, Group, export_paths, new_board
from .errors import UnsupportedFeature
from .patterns import VectorPath

SVG_NS = "http://www.w3.org/2000/svg"

_SVG_ATTRS = {"width", "height", "viewBox"}
_G_ATTRS = {"id", "transform"}
_PATH_ATTRS = {"id", "d", "fill", "fill-rule", "transform"}


def fnum(x: float) -> str:
    """Coordinate at 1e-4 precision, trailing zeros stripped."""
    s = f"{float(x):.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def tnum(x: float) -> str:
    """Transform entry at full precision (exact float round trip)."""
    v = float(x)
    if v == 0.0:
        v = 0.0  # normalize -0.0
    return repr(v)


def _matrix_attr(m: np.ndarray) -> str:
    a, c, e = m[0]
    b, d, f = m[1]
    return "matrix(" + " ".join(tnum(v) for v in (a, b, c, d, e, f)) + ")"


def _d_attr(path: VectorPath) -> str:
    parts = []
    for sp in path.subpaths:
        pts = sp[:-1]
        seg = [f"M {fnum(pts[0, 0])} {fnum(pts[0, 1])}"]
        for x, y in pts[1:]:
            seg.append(f"L {fnum(x)} {fnum(y)}")
        seg.append("Z")
        parts.append(" ".join(seg))
    return " ".join(parts)


def export_svg(board: Board, scale: float = 1.0) -> bytes:
    """Serialize the board to the canonical document, back-to-front.

    ``scale`` sets the physical size attributes only; geometry stays in
    abstract canvas units via the viewBox.
    """
    w, h = board.canvas
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="{SVG_NS}" width="{fnum(w * scale)}" height="{fnum(h * scale)}"'
        f' viewBox="0 0 {fnum(w)} {fnum(h)}">',
        '  <g id="canvas">',
    ]

    def emit(node_id: str, depth: int):
        node = board.nodes[node_id]
        pad = "  " * depth
        if isinstance(node, Group):
            lines.append(f'{pad}<g id="{node.id}" transform="{_matrix_attr(node.transform)}">')
            for child in node.children:
                emit(child, depth + 1)
            lines.append(f"{pad}</g>")
        else:
            fill = "#000000" if node.fill == "foreground" else "none"
            lines.append(
                f'{pad}<path id="{node.id}" d="{_d_attr(export_paths(board, node_id))}"'
                f' fill="{fill}" fill-rule="evenodd" transform="{_matrix_attr(node.transform)}"/>'
            )

    for root in board.roots:
        emit(root, 2)
    lines.append("  </g>")
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


_MATRIX_RE = re.compile(r"^matrix\(\s*([^)]*?)\s*\)$")
_NUM_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def _parse_matrix(text: str) -> np.ndarray:
    m = _MATRIX_RE.match(text.strip())
    if not m:
        raise UnsupportedFeature(f"transform must be a single matrix(...), got {text!r}")
    parts = m.group(1).replace(",", " ").split()
    if len(parts) != 6 or not all(_NUM_RE.match(p) for p in parts):
        raise UnsupportedFeature(f"matrix needs six numbers, got {text!r}")
    a, b, c, d, e, f = (float(p) for p in parts)
    return np.array([[a, c, e], [b, d, f]])


def _parse_d(text: str) -> VectorPath:
    tokens = text.split()
    subpaths = []
    i = 0
    n = len(tokens)

    def take_pair(j):
        if j + 1 >= n or not _NUM_RE.match(tokens[j]) or not _NUM_RE.match(tokens[j + 1]):
            raise UnsupportedFeature(f"bad coordinate pair near token {j} in path data")
        return (float(tokens[j]), float(tokens[j + 1])), j + 2

    while i < n:
        if tokens[i] != "M":
            raise UnsupportedFeature(f"subpath must start with M, got {tokens[i]!r}")
        pt, i = take_pair(i + 1)
        pts = [pt]
        while i < n and tokens[i] == "L":
            pt, i = take_pair(i + 1)
            pts.append(pt)
        if i >= n or tokens[i] != "Z":
            raise UnsupportedFeature("subpath must close with Z")
        i += 1
        pts.append(pts[0])
        if len(pts) < 4:
            raise UnsupportedFeature("closed subpath needs at least three points")
        subpaths.append(pts)
    if not subpaths:
        raise UnsupportedFeature("path has no subpaths")
    return VectorPath(tuple(subpaths))


def _strip_ns(tag) -> str:
    if not isinstance(tag, str):
        raise UnsupportedFeature("non-element content in document")
    if tag.startswith("{"):
        ns, _, local = tag[1:].partition("}")
        if ns != SVG_NS:
            raise UnsupportedFeature(f"foreign namespace {ns!r}")
        return local
    return tag


def _check_text(el):
    if (el.text and el.text.strip()) or (el.tail and el.tail.strip()):
        raise UnsupportedFeature("text content is outside the profile")


def import_svg(data) -> Board:
    """Rebuild a board from a document in the canonical profile.

    Anything beyond the profile raises UnsupportedFeature. Holes that the
    exporter merged into a target path come back as plain extra subpaths
    of that path; provenance is not carried by the document.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise UnsupportedFeature(f"not well-formed: {exc}") from None

    if _strip_ns(root.tag) != "svg":
        raise UnsupportedFeature("root element must be svg")
    if set(root.attrib) - _SVG_ATTRS:
        raise UnsupportedFeature(f"unexpected svg attributes {sorted(set(root.attrib) - _SVG_ATTRS)}")
    vb = (root.get("viewBox") or "").split()
    if len(vb) != 4 or not all(_NUM_RE.match(p) for p in vb) or float(vb[0]) != 0 or float(vb[1]) != 0:
        raise UnsupportedFeature("viewBox must be '0 0 W H'")
    canvas = (float(vb[2]), float(vb[3]))

    kids = list(root)
    if len(kids) != 1 or _strip_ns(kids[0].tag) != "g" or kids[0].get("id") != "canvas" or set(kids[0].attrib) != {"id"}:
        raise UnsupportedFeature("svg must contain exactly one structural canvas group")
    _check_text(root)
    _check_text(kids[0])

    board = new_board(canvas)
    nodes = {}
    seen_ids = set()
    max_minted = 0

    def need_id(el) -> str:
        nid = el.get("id")
        if not nid or not re.fullmatch(r"[A-Za-z0-9_-]+", nid):
            raise UnsupportedFeature(f"missing or malformed id {nid!r}")
        if nid in seen_ids or nid == "canvas":
            raise UnsupportedFeature(f"duplicate id {nid!r}")
        seen_ids.add(nid)
        m = re.fullmatch(r"n(\d+)", nid)
        if m:
            nonlocal max_minted
            max_minted = max(max_minted, int(m.group(1)))
        return nid

    def walk(el) -> str:
        _check_text(el)
        tag = _strip_ns(el.tag)
        if tag == "g":
            if set(el.attrib) - _G_ATTRS:
                raise UnsupportedFeature(f"unexpected group attributes {sorted(set(el.attrib) - _G_ATTRS)}")
            nid = need_id(el)
            children = tuple(walk(c) for c in el)
            nodes[nid] = Group(id=nid, children=children, transform=_parse_matrix(el.get("transform", "matrix(1 0 0 1 0 0)")))
            return nid
        if tag == "path":
            if set(el.attrib) - _PATH_ATTRS:
                raise UnsupportedFeature(f"unexpected path attributes {sorted(set(el.attrib) - _PATH_ATTRS)}")
            if len(el):
                raise UnsupportedFeature("path must be a leaf")
            if el.get("fill-rule") != "evenodd":
                raise UnsupportedFeature("paths must declare fill-rule evenodd")
            fill = el.get("fill")
            if fill not in ("#000000", "none"):
                raise UnsupportedFeature(f"fill must be #000000 or none, got {fill!r}")
            nid = need_id(el)
            try:
                path = _parse_d(el.get("d", ""))
            except ValueError as exc:
                raise UnsupportedFeature(str(exc)) from None
            nodes[nid] = Element(
                id=nid,
                path=path,
                transform=_parse_matrix(el.get("transform", "matrix(1 0 0 1 0 0)")),
                kind="contour" if fill == "#000000" else "cutout",
                fill="foreground" if fill == "#000000" else "hole",
            )
            return nid
        raise UnsupportedFeature(f"element <{tag}> is outside the profile")

    roots = tuple(walk(c) for c in kids[0])
    return Board(canvas=canvas, nodes=nodes, roots=roots, next_id=max_minted + 1)
