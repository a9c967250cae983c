"""Default unit-pattern classification: descriptor k-NN and sawtooth scoring.

This is the offline stand-in for a provider-side classifier; it works purely
on shape descriptors and needs no model weights.
"""

import numpy as np

from ..errors import EmptyMask, TooFewExemplars
from .descriptors import ShapeDescriptor
from .trace import boundary_loops, simplify_closed, subpath_area

SAWTOOTH_SIMPLIFY_PX = 2.0
SAWTOOTH_THRESHOLD = 0.6


def classify_unit_pattern(
    desc: ShapeDescriptor,
    exemplars: list[tuple[str, str, ShapeDescriptor]],
    k: int = 5,
) -> tuple[str, str, float]:
    """Majority vote over the k nearest labeled exemplars.

    Exemplars are (subcategory, pattern_name, descriptor) triples; distance is
    Euclidean in descriptor space. Vote ties break by smallest mean distance,
    then ascending (subcategory, pattern_name). Returns the winning label and
    its vote fraction.
    """
    if len(exemplars) < k:
        raise TooFewExemplars(f"need at least {k} exemplars, got {len(exemplars)}")
    if k < 1:
        raise ValueError("k must be >= 1")
    q = desc.vector()
    ranked = sorted(
        (
            (float(np.linalg.norm(ex.vector() - q)), sub, name)
            for sub, name, ex in exemplars
        ),
        key=lambda t: (t[0], t[1], t[2]),
    )[:k]

    votes: dict[tuple[str, str], list[float]] = {}
    for dist, sub, name in ranked:
        votes.setdefault((sub, name), []).append(dist)
    best = min(
        votes.items(),
        key=lambda kv: (-len(kv[1]), sum(kv[1]) / len(kv[1]), kv[0]),
    )
    (sub, name), dists = best
    return sub, name, len(dists) / k


def detect_sawtooth(mask) -> float:
    """Score in [0, 1]: fraction of consecutive turn-sign flips on the outline.

    The simplified outline's turning vertices are the samples; the score is
    how often immediately consecutive vertices turn in opposite directions.
    A tooth row flips at every vertex and scores near 1; disks, convex
    blobs, and lobed outlines (whose concavities come isolated, not in
    alternating runs) stay well under the 0.6 threshold.
    """
    mask = np.asarray(mask).astype(bool)
    if mask.size == 0 or not mask.any():
        raise EmptyMask("cannot score an empty mask")
    # plain simplification, not vectorize: its round-trip refinement would
    # keep staircase corners and score every curve as teeth. 2.0 px is wide
    # enough that staircase jitter (under ~1.2 px) collapses on small disks
    # while real teeth (>= 4 px) survive
    loops = boundary_loops(mask)
    outer = max(loops, key=subpath_area)
    ring = simplify_closed(outer, SAWTOOTH_SIMPLIFY_PX)[:-1]
    if ring.shape[0] < 3:
        return 0.0
    prev = np.roll(ring, 1, axis=0)
    nxt = np.roll(ring, -1, axis=0)
    a = ring - prev
    b = nxt - ring
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    signs = np.sign(cross)
    sl = signs[np.nonzero(signs)[0]]
    if sl.size < 2:
        return 0.0
    flips = int(np.count_nonzero(sl != np.roll(sl, -1)))
    return flips / sl.size
