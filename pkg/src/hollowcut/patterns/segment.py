"""Point-prompted segmentation over binary images.

Classical fallback for the provider-side segmenter: foreground clicks select
8-connected components, background clicks veto them.
"""

import numpy as np

from ..errors import ConflictingPoints, EmptyResult, PointOnOppositeClass
from .raster import as_binary, label_foreground


def segment_by_points(img, fg_points, bg_points=()) -> np.ndarray:
    """Mask = union of components under fg points minus components under bg points.

    Points are (x, y) pixel positions. Every fg point must land on a
    foreground pixel; bg points may land anywhere, and a bg point on a
    foreground pixel removes that whole component. Postconditions: every fg
    point is in the returned mask, every bg point is not.
    """
    img = as_binary(img)
    h, w = img.shape
    if not fg_points:
        raise ValueError("at least one foreground point is required")
    for x, y in list(fg_points) + list(bg_points):
        if not (0 <= x < w and 0 <= y < h):
            raise ValueError(f"point ({x}, {y}) outside image bounds {w}x{h}")

    labels, _ = label_foreground(img)
    selected = set()
    for x, y in fg_points:
        v = int(labels[y, x])
        if v == 0:
            raise PointOnOppositeClass(f"foreground point ({x}, {y}) lies on background")
        selected.add(v)

    vetoed = {int(labels[y, x]) for x, y in bg_points if labels[y, x] != 0}
    if selected & vetoed:
        raise ConflictingPoints(
            "a background point lies in a component selected by a foreground point"
        )
    keep = selected - vetoed
    if not keep:
        raise EmptyResult("no component survives the background exclusions")
    return np.isin(labels, sorted(keep))
