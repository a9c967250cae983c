"""Shape descriptors for cut-out masks.

All quantities are computed on the mask localized to its bounding box, which
makes translation invariance exact (a translated mask produces a bit-identical
local mask). Scale and 90-degree-rotation invariance are approximate at the
level of pixel discretization; see the invariance tests for the tolerances.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyMask
from .trace import boundary_loops, subpath_area

FOURIER_COEFFS = 10
SMOOTH_HARMONICS = 16
_RESAMPLE_N = 256


@dataclass(frozen=True)
class ShapeDescriptor:
    """Translation/scale/rotation tolerant summary of a mask's shape."""

    area_norm: float
    perimeter_norm: float
    circularity: float
    moment_invariants: tuple
    boundary_fourier: tuple

    def vector(self) -> np.ndarray:
        """Flat feature vector for nearest-neighbor distances."""
        return np.array(
            [self.area_norm, self.perimeter_norm, self.circularity]
            + list(self.moment_invariants)
            + list(self.boundary_fourier),
            dtype=np.float64,
        )


def _localize(mask: np.ndarray) -> np.ndarray:
    ys, xs = np.nonzero(mask)
    return mask[ys.min() : ys.max() + 1, xs.min() : xs.max() + 1]


def _hu_invariants(mask: np.ndarray) -> tuple:
    """The seven rotation/scale invariant moment combinations."""
    ys, xs = np.nonzero(mask)
    x = xs + 0.5
    y = ys + 0.5
    n = x.size
    cx, cy = x.mean(), y.mean()
    dx, dy = x - cx, y - cy

    def mu(p, q):
        return float(np.sum(dx**p * dy**q))

    def eta(p, q):
        return mu(p, q) / n ** (1 + (p + q) / 2)

    n20, n02, n11 = eta(2, 0), eta(0, 2), eta(1, 1)
    n30, n03 = eta(3, 0), eta(0, 3)
    n21, n12 = eta(2, 1), eta(1, 2)

    h1 = n20 + n02
    h2 = (n20 - n02) ** 2 + 4 * n11**2
    h3 = (n30 - 3 * n12) ** 2 + (3 * n21 - n03) ** 2
    h4 = (n30 + n12) ** 2 + (n21 + n03) ** 2
    h5 = (n30 - 3 * n12) * (n30 + n12) * (
        (n30 + n12) ** 2 - 3 * (n21 + n03) ** 2
    ) + (3 * n21 - n03) * (n21 + n03) * (3 * (n30 + n12) ** 2 - (n21 + n03) ** 2)
    h6 = (n20 - n02) * ((n30 + n12) ** 2 - (n21 + n03) ** 2) + 4 * n11 * (
        n30 + n12
    ) * (n21 + n03)
    h7 = (3 * n21 - n03) * (n30 + n12) * (
        (n30 + n12) ** 2 - 3 * (n21 + n03) ** 2
    ) - (n30 - 3 * n12) * (n21 + n03) * (3 * (n30 + n12) ** 2 - (n21 + n03) ** 2)
    return (h1, h2, h3, h4, h5, h6, h7)


def _resample_closed(loop: np.ndarray, n: int) -> np.ndarray:
    """Sample a closed polyline at n equal arc-length positions."""
    seg = np.sqrt(((loop[1:] - loop[:-1]) ** 2).sum(axis=1))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    targets = np.arange(n) * (total / n)
    idx = np.searchsorted(cum, targets, side="right") - 1
    idx = np.clip(idx, 0, len(seg) - 1)
    local = (targets - cum[idx]) / np.where(seg[idx] == 0, 1.0, seg[idx])
    return loop[idx] + local[:, None] * (loop[idx + 1] - loop[idx])


def _boundary_spectrum(outer: np.ndarray) -> np.ndarray:
    """DFT of the outer boundary resampled at equal arc-length steps."""
    pts = _resample_closed(outer, _RESAMPLE_N)
    return np.fft.fft(pts[:, 0] + 1j * pts[:, 1])


def _fourier_magnitudes(coeffs: np.ndarray) -> tuple:
    """First FOURIER_COEFFS magnitudes, scale-normalized.

    Magnitudes are invariant to boundary start point and rotation; dividing
    by |c1| removes scale.
    """
    mags = np.abs(coeffs) / _RESAMPLE_N
    scale = mags[1] if mags[1] > 1e-12 else max(mags.max(), 1e-12)
    return tuple(float(mags[k] / scale) for k in range(1, FOURIER_COEFFS + 1))


def _smooth_perimeter(coeffs: np.ndarray, harmonics: int = SMOOTH_HARMONICS) -> float:
    """Length of the boundary rebuilt from its lowest harmonics.

    Truncation discards the pixel staircase (whose amplitude is fixed in
    pixels at any size) instead of tuning a simplification tolerance, and
    every step here is linear, so an exact 2x upscale of the mask doubles
    the result bit for bit.
    """
    keep = np.zeros_like(coeffs)
    keep[: harmonics + 1] = coeffs[: harmonics + 1]
    keep[-harmonics:] = coeffs[-harmonics:]
    pts = np.fft.ifft(keep)
    closed = np.concatenate([pts, pts[:1]])
    return float(np.abs(np.diff(closed)).sum())


def descriptors(mask) -> ShapeDescriptor:
    """Descriptor of a non-empty mask (any representation with >=1 pixel)."""
    mask = np.asarray(mask).astype(bool)
    if mask.size == 0 or not mask.any():
        raise EmptyMask("cannot describe an empty mask")
    local = _localize(mask)
    h, w = local.shape
    area = float(local.sum())

    # perimeter from the low-pass boundary reconstruction, not the raw crack
    # outline: crack length is L1 staircase length (27% high on a disk), and
    # any fixed simplification tolerance breaks scale invariance
    loops = boundary_loops(local)
    outer = max(loops, key=subpath_area)
    coeffs = _boundary_spectrum(outer)
    perimeter = _smooth_perimeter(coeffs)

    area_norm = area / (w * h)
    perimeter_norm = perimeter / (2.0 * (w + h))
    circularity = min(4.0 * math.pi * area / perimeter**2, 1.05)

    return ShapeDescriptor(
        area_norm=area_norm,
        perimeter_norm=perimeter_norm,
        circularity=circularity,
        moment_invariants=_hu_invariants(local),
        boundary_fourier=_fourier_magnitudes(coeffs),
    )
