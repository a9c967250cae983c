"""Binary raster operations: thresholding and connected-component labeling.

A binary image is a 2-D ``bool`` numpy array of shape ``(height, width)``
where ``True`` marks foreground (paper/ink). Foreground uses 8-connectivity,
background 4-connectivity, the standard duality that avoids topological
paradoxes between a region and its holes.
"""

import numpy as np
from scipy import ndimage

from ..errors import EmptyImage

# structuring elements for the two connectivities
_STRUCT_8 = np.ones((3, 3), dtype=bool)
_STRUCT_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


def as_binary(img) -> np.ndarray:
    """Coerce input to a 2-D bool array, rejecting empty images."""
    arr = np.asarray(img)
    if arr.ndim != 2 or arr.size == 0:
        raise EmptyImage(f"expected a non-empty 2-D image, got shape {arr.shape}")
    return arr.astype(bool)


def otsu_threshold(gray: np.ndarray) -> float:
    """Otsu's threshold over an 8-bit histogram.

    Returns t such that pixels with value <= t fall in the darker class.
    Maximizes between-class variance; on ties the lowest t wins, which keeps
    the result deterministic across platforms.
    """
    gray = np.asarray(gray)
    if gray.size == 0:
        raise EmptyImage("cannot threshold an empty image")
    hist = np.bincount(gray.astype(np.uint8).ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    omega = np.cumsum(hist) / total                    # class-0 probability
    mu = np.cumsum(hist * np.arange(256)) / total      # cumulative mean
    mu_total = mu[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma_b = (mu_total * omega - mu) ** 2 / (omega * (1.0 - omega))
    sigma_b[~np.isfinite(sigma_b)] = 0.0
    return float(np.argmax(sigma_b))


def binarize(gray, method: str = "otsu", invert: bool = False) -> np.ndarray:
    """Threshold a grayscale image into a foreground mask.

    By default the darker class becomes foreground (ink on paper);
    ``invert=True`` flips that. A uniform image maps entirely to one class:
    all-dark input is all foreground, all-light input all background.
    """
    gray = np.asarray(gray)
    if gray.ndim != 2 or gray.size == 0:
        raise EmptyImage(f"expected a non-empty 2-D grayscale image, got shape {gray.shape}")
    if method != "otsu":
        raise ValueError(f"unknown binarization method: {method!r}")
    g = gray.astype(np.uint8)
    lo, hi = int(g.min()), int(g.max())
    if lo == hi:
        # uniform image: split on mid-scale so all-black is foreground
        fg = np.full(g.shape, lo < 128, dtype=bool)
    else:
        t = otsu_threshold(g)
        fg = g <= t
    return ~fg if invert else fg


def label_foreground(img: np.ndarray):
    """8-connected foreground components. Returns (labels, count)."""
    labels, count = ndimage.label(img, structure=_STRUCT_8)
    return labels, int(count)


def label_background(img: np.ndarray):
    """4-connected background components. Returns (labels, count)."""
    labels, count = ndimage.label(~img, structure=_STRUCT_4)
    return labels, int(count)


def border_labels(labels: np.ndarray) -> set[int]:
    """Set of nonzero label values touching the image border."""
    edges = np.concatenate([labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]])
    return set(int(v) for v in np.unique(edges) if v != 0)
