"""Boundary tracing, polyline simplification, and bitmap vectorization.

Boundaries follow pixel cracks: a pixel (x, y) occupies the unit square
[x, x+1] x [y, y+1], and loops run along the lattice edges separating mask
from non-mask. Outer loops carry positive shoelace area in image coordinates
(y down); hole loops are negative. At corner-touching (pinch) vertices the
walk crosses over, so an 8-connected component yields a single outer loop
while 4-connected background keeps diagonal holes separate.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DisconnectedMask, EmptyMask
from .raster import as_binary, label_foreground


@dataclass(frozen=True)
class VectorPath:
    """Closed vector outline: one or more closed subpaths, evenodd fill.

    Each subpath is an (n, 2) float array of (x, y) vertices with the first
    point repeated at the end to close the loop.
    """

    subpaths: tuple = ()
    fill_rule: str = field(default="evenodd")

    def __post_init__(self):
        if not self.subpaths:
            raise EmptyMask("a VectorPath needs at least one subpath")
        cleaned = []
        for sp in self.subpaths:
            arr = np.asarray(sp, dtype=np.float64)
            if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
                raise ValueError(f"subpath must be (n>=3, 2), got {arr.shape}")
            if not np.array_equal(arr[0], arr[-1]):
                raise ValueError("subpath must be closed (first point == last)")
            cleaned.append(arr)
        object.__setattr__(self, "subpaths", tuple(cleaned))

    def vertex_counts(self) -> list[int]:
        """Distinct vertices per subpath (closure duplicate not counted)."""
        return [sp.shape[0] - 1 for sp in self.subpaths]

    def bounds(self) -> tuple[float, float, float, float]:
        """(min_x, min_y, max_x, max_y) over all subpaths."""
        pts = np.vstack(self.subpaths)
        return (
            float(pts[:, 0].min()),
            float(pts[:, 1].min()),
            float(pts[:, 0].max()),
            float(pts[:, 1].max()),
        )

    def translated(self, dx: float, dy: float) -> "VectorPath":
        return VectorPath(tuple(sp + np.array([dx, dy]) for sp in self.subpaths))

    def transformed(self, matrix) -> "VectorPath":
        """Apply a 2x3 affine matrix to every vertex."""
        m = np.asarray(matrix, dtype=np.float64)
        out = []
        for sp in self.subpaths:
            pts = sp @ m[:, :2].T + m[:, 2]
            out.append(pts)
        return VectorPath(tuple(out))

    def length(self) -> float:
        """Total boundary length, all subpaths."""
        return float(sum(subpath_length(sp) for sp in self.subpaths))


def subpath_length(sp: np.ndarray) -> float:
    return float(np.sqrt(((sp[1:] - sp[:-1]) ** 2).sum(axis=1)).sum())


def subpath_area(sp: np.ndarray) -> float:
    """Signed shoelace area in image coordinates (outer loops positive)."""
    x, y = sp[:-1, 0], sp[:-1, 1]
    xn, yn = sp[1:, 0], sp[1:, 1]
    return float(0.5 * np.sum(x * yn - xn * y))


def _boundary_edges(mask: np.ndarray) -> dict:
    """Directed crack edges keyed by start vertex; interior kept to the right."""
    h, w = mask.shape
    pad = np.zeros((h + 2, w + 2), dtype=bool)
    pad[1:-1, 1:-1] = mask
    core = pad[1:-1, 1:-1]

    edges: dict[tuple, list] = {}

    def add(run, starts_x, starts_y, dx, dy):
        for x, y in zip(starts_x[run], starts_y[run]):
            edges.setdefault((int(x), int(y)), []).append((int(x) + dx, int(y) + dy))

    ys, xs = np.nonzero(core)
    top = ~pad[0:-2, 1:-1][ys, xs]      # neighbor above absent -> (x,y)->(x+1,y)
    right = ~pad[1:-1, 2:][ys, xs]      # (x+1,y)->(x+1,y+1)
    bottom = ~pad[2:, 1:-1][ys, xs]     # (x+1,y+1)->(x,y+1)
    left = ~pad[1:-1, 0:-2][ys, xs]     # (x,y+1)->(x,y)
    add(top, xs, ys, 1, 0)
    add(right, xs + 1, ys, 0, 1)
    add(bottom, xs + 1, ys + 1, -1, 0)
    add(left, xs, ys + 1, 0, -1)
    return edges


def _walk_loops(edges: dict) -> list[np.ndarray]:
    """Stitch directed edges into closed loops.

    At 4-valent pinch vertices the outgoing edge with negative cross product
    against the incoming direction is taken, which crosses the pinch and
    keeps an 8-connected region on one loop.
    """
    remaining = {start: sorted(ends) for start, ends in edges.items()}
    starts = sorted(remaining)
    loops = []
    for start in starts:
        while remaining.get(start):
            loop = [start]
            current = start
            prev = None
            while True:
                outs = remaining.get(current)
                if not outs:
                    break
                if len(outs) == 1 or prev is None:
                    nxt = outs[0]
                else:
                    dx, dy = current[0] - prev[0], current[1] - prev[1]
                    nxt = None
                    for cand in outs:
                        ox, oy = cand[0] - current[0], cand[1] - current[1]
                        if dx * oy - dy * ox < 0:
                            nxt = cand
                            break
                    if nxt is None:
                        nxt = outs[0]
                outs.remove(nxt)
                if not outs:
                    del remaining[current]
                loop.append(nxt)
                prev, current = current, nxt
                if current == start and not remaining.get(start):
                    break
            loops.append(np.array(loop, dtype=np.float64))
    return [_canonical_rotation(lp) for lp in loops]


def _canonical_rotation(loop: np.ndarray) -> np.ndarray:
    """Rotate a closed loop to start at its smallest (y, x) vertex."""
    ring = loop[:-1]
    keys = [(p[1], p[0]) for p in ring]
    best = min(keys)
    candidates = [i for i, k in enumerate(keys) if k == best]
    if len(candidates) == 1:
        i = candidates[0]
    else:
        # pinch start: pick the rotation that is lexicographically smallest
        def rot_key(idx):
            rolled = np.roll(ring, -idx, axis=0)
            return tuple((p[1], p[0]) for p in rolled)

        i = min(candidates, key=rot_key)
    rolled = np.roll(ring, -i, axis=0)
    return np.vstack([rolled, rolled[:1]])


def boundary_loops(mask: np.ndarray) -> list[np.ndarray]:
    """All closed crack loops of a mask, ordered by (min y, min x, area desc)."""
    edges = _boundary_edges(mask)
    loops = _walk_loops(edges)
    loops.sort(key=lambda lp: (lp[0, 1], lp[0, 0], -subpath_area(lp)))
    return loops


def trace_contour(mask) -> VectorPath:
    """Closed boundary traversal of a connected mask.

    Subpath 0 is the outer boundary; any holes follow, ordered by their
    topmost-leftmost vertex.
    """
    mask = np.asarray(mask).astype(bool)
    if mask.size == 0 or not mask.any():
        raise EmptyMask("cannot trace an empty mask")
    _, count = label_foreground(mask)
    if count != 1:
        raise DisconnectedMask(f"mask has {count} components, expected 1")
    loops = boundary_loops(mask)
    outer_idx = max(range(len(loops)), key=lambda i: subpath_area(loops[i]))
    ordered = [loops[outer_idx]] + [lp for i, lp in enumerate(loops) if i != outer_idx]
    return VectorPath(tuple(ordered))


def _dp_keep(points: np.ndarray, tol: float) -> np.ndarray:
    """Douglas-Peucker retention flags for an open chain (endpoints kept)."""
    n = points.shape[0]
    keep = np.zeros(n, dtype=bool)
    keep[0] = keep[-1] = True
    stack = [(0, n - 1)]
    while stack:
        a, b = stack.pop()
        if b - a < 2:
            continue
        seg = points[b] - points[a]
        seg_len = np.hypot(seg[0], seg[1])
        rel = points[a + 1 : b] - points[a]
        if seg_len == 0.0:
            dist = np.sqrt((rel**2).sum(axis=1))
        else:
            dist = np.abs(rel[:, 0] * seg[1] - rel[:, 1] * seg[0]) / seg_len
        imax = int(np.argmax(dist))
        if dist[imax] > tol:
            split = a + 1 + imax
            keep[split] = True
            stack.append((a, split))
            stack.append((split, b))
    return keep


def simplify_closed(loop: np.ndarray, tol: float) -> np.ndarray:
    """Simplify a closed loop at perpendicular-distance tolerance ``tol``.

    The loop is split at its start vertex and the vertex farthest from it,
    each chain reduced independently, so every removed vertex lies within
    ``tol`` of the simplified outline. Falls back to the original loop when
    simplification would collapse it (fewer than 3 distinct vertices or more
    than half the enclosed area lost), which keeps thin shapes rasterizable.
    """
    ring = loop[:-1]
    n = ring.shape[0]
    if n <= 4:
        return loop
    far = int(np.argmax(((ring - ring[0]) ** 2).sum(axis=1)))
    chain1 = ring[: far + 1]
    chain2 = np.vstack([ring[far:], ring[:1]])
    k1 = _dp_keep(chain1, tol)
    k2 = _dp_keep(chain2, tol)
    merged = np.vstack([chain1[k1][:-1], chain2[k2][:-1]])
    if merged.shape[0] < 3:
        return loop
    simplified = np.vstack([merged, merged[:1]])
    orig_area = subpath_area(loop)
    if abs(subpath_area(simplified)) < 0.5 * abs(orig_area):
        return loop
    return simplified


def vectorize(mask, tolerance_px: float = 1.0) -> VectorPath:
    """Trace a mask and simplify each boundary loop.

    Works on disconnected masks too: every component contributes its loops.
    Rasterizing the result at source resolution must stay within 2% of the
    mask over its bounding box; simplification starts at ``tolerance_px`` and
    halves the tolerance until that bound holds, bottoming out at the exact
    traced polygon, so the guarantee survives any input.
    """
    mask = np.asarray(mask).astype(bool)
    if mask.size == 0 or not mask.any():
        raise EmptyMask("cannot vectorize an empty mask")
    loops = boundary_loops(mask)
    ys, xs = np.nonzero(mask)
    bbox_px = (int(ys.max()) - int(ys.min()) + 1) * (int(xs.max()) - int(xs.min()) + 1)
    budget = 0.02 * bbox_px
    tol = tolerance_px
    for _ in range(5):
        if tol <= 0:
            break
        path = VectorPath(tuple(simplify_closed(lp, tol) for lp in loops))
        bad = np.count_nonzero(rasterize_path(path, mask.shape) != mask)
        if bad <= budget:
            return path
        tol /= 2.0
    # exact crack polygon: rasterizes back to the mask bit for bit
    return VectorPath(tuple(loops))


def rasterize_path(path: VectorPath, shape: tuple[int, int]) -> np.ndarray:
    """Scanline-rasterize a path with the evenodd rule onto an (h, w) grid.

    A pixel (x, y) is filled when its center (x+0.5, y+0.5) has odd crossing
    parity. Crack-aligned paths have integer vertices, so sample rows at
    half-integer heights never pass through a vertex.
    """
    h, w = shape
    out = np.zeros((h, w), dtype=bool)
    segments = []
    for sp in path.subpaths:
        p0, p1 = sp[:-1], sp[1:]
        nonhoriz = p0[:, 1] != p1[:, 1]
        segments.append((p0[nonhoriz], p1[nonhoriz]))
    if not segments:
        return out
    a = np.vstack([s[0] for s in segments])
    b = np.vstack([s[1] for s in segments])
    if a.shape[0] == 0:
        return out
    ylo = np.minimum(a[:, 1], b[:, 1])
    yhi = np.maximum(a[:, 1], b[:, 1])
    centers = np.arange(w) + 0.5
    for y in range(h):
        yc = y + 0.5
        live = (ylo <= yc) & (yc < yhi)
        if not live.any():
            continue
        pa, pb = a[live], b[live]
        t = (yc - pa[:, 1]) / (pb[:, 1] - pa[:, 1])
        xs = np.sort(pa[:, 0] + t * (pb[:, 0] - pa[:, 0]))
        # evenodd: fill between crossing pairs
        inside = np.searchsorted(xs, centers, side="right") % 2 == 1
        out[y] = inside
    return out
