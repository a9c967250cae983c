"""Cut-out (hole) extraction from binary paper-cutting images.

A cut-out is a background region fully enclosed by foreground: a 4-connected
background component that does not touch the border-connected outside.
"""

from dataclasses import dataclass

import numpy as np

from .raster import as_binary, border_labels, label_background, label_foreground


@dataclass(frozen=True)
class BBox:
    """Inclusive pixel-aligned bounding box."""

    x: int
    y: int
    w: int
    h: int

    @classmethod
    def of_pixels(cls, xs: np.ndarray, ys: np.ndarray) -> "BBox":
        x0, y0 = int(xs.min()), int(ys.min())
        return cls(x0, y0, int(xs.max()) - x0 + 1, int(ys.max()) - y0 + 1)


@dataclass(frozen=True)
class CutoutMask:
    """An extracted hole: its pixels, bounding box, and enclosing component.

    ``pixels`` is an (N, 2) int array of (x, y) positions sorted by (y, x);
    all of them are background pixels of the source image and the set is
    4-connected. ``parent_component`` identifies the enclosing 8-connected
    foreground component.
    """

    cutout_id: int
    pixels: np.ndarray
    bbox: BBox
    parent_component: int

    @property
    def area(self) -> int:
        return int(self.pixels.shape[0])

    def to_local_mask(self) -> np.ndarray:
        """Bool array of shape (bbox.h, bbox.w) with the hole pixels set."""
        m = np.zeros((self.bbox.h, self.bbox.w), dtype=bool)
        m[self.pixels[:, 1] - self.bbox.y, self.pixels[:, 0] - self.bbox.x] = True
        return m


def extract_cutouts(img, min_area: int = 4) -> list[CutoutMask]:
    """Extract every hole of area >= min_area from a binary image.

    Holes are background components (4-connected) unreachable from the image
    border; the outside component(s) touching the border are excluded. The
    result is ordered by (bbox.y, bbox.x, discovery id) and cutout ids are
    reassigned 0..n-1 in that order, so extraction is deterministic.
    """
    img = as_binary(img)
    bg_labels, _ = label_background(img)
    outside = border_labels(bg_labels)
    fg_labels, _ = label_foreground(img)

    found = []
    for value in np.unique(bg_labels):
        v = int(value)
        if v == 0 or v in outside:
            continue
        ys, xs = np.nonzero(bg_labels == v)
        if xs.size < min_area:
            continue
        order = np.lexsort((xs, ys))
        pixels = np.column_stack([xs[order], ys[order]]).astype(np.int64)
        bbox = BBox.of_pixels(xs, ys)
        found.append((bbox, v, pixels, _enclosing_component(fg_labels, pixels)))

    found.sort(key=lambda t: (t[0].y, t[0].x, t[1]))
    return [
        CutoutMask(cutout_id=i, pixels=pixels, bbox=bbox, parent_component=parent)
        for i, (bbox, _v, pixels, parent) in enumerate(found)
    ]


def _enclosing_component(fg_labels: np.ndarray, pixels: np.ndarray) -> int:
    """Foreground component label adjacent to the hole (smallest on ties)."""
    h, w = fg_labels.shape
    neighbors = set()
    for x, y in pixels:
        for nx, ny in ((x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)):
            if 0 <= nx < w and 0 <= ny < h:
                v = int(fg_labels[ny, nx])
                if v != 0:
                    neighbors.add(v)
    return min(neighbors) if neighbors else 0
