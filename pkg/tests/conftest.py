"""Shared fixtures: synthetic shape masks and scripted provider plumbing."""

import base64
import io
from pathlib import Path

import numpy as np
import pytest
from PIL import Image


def grid(n):
    yy, xx = np.mgrid[0:n, 0:n]
    return yy, xx


def disk_mask(n=128, r=40.0, cy=None, cx=None):
    yy, xx = grid(n)
    cy = n / 2 if cy is None else cy
    cx = n / 2 if cx is None else cx
    return (xx - cx) ** 2 + (yy - cy) ** 2 <= r**2


def ellipse_mask(n=128, ry=40.0, rx=22.0):
    yy, xx = grid(n)
    c = n / 2
    return ((xx - c) / rx) ** 2 + ((yy - c) / ry) ** 2 <= 1.0


def square_mask(n=128, half=30):
    m = np.zeros((n, n), dtype=bool)
    c = n // 2
    m[c - half : c + half, c - half : c + half] = True
    return m


def diamond_mask(n=128, r=36):
    yy, xx = grid(n)
    c = n // 2
    return np.abs(xx - c) + np.abs(yy - c) <= r


def crescent_mask(n=128, r_outer=44.0, r_inner=38.0, shift=16):
    outer = disk_mask(n, r_outer)
    inner = disk_mask(n, r_inner, cy=n / 2 - shift)
    return outer & ~inner


def ring_mask(n=128, r_outer=44.0, r_inner=22.0):
    return disk_mask(n, r_outer) & ~disk_mask(n, r_inner)


def comb_mask(n=128, tooth=12):
    # solid bar with triangular teeth along the top edge
    m = np.zeros((n, n), dtype=bool)
    m[n // 2 : n // 2 + 20, 8 : n - 8] = True
    yy, xx = grid(n)
    for left in range(8, n - 8 - tooth, tooth):
        apex_x = left + tooth / 2
        in_tri = (
            (yy < n // 2)
            & (yy >= n // 2 - tooth)
            & (np.abs(xx - apex_x) <= (yy - (n // 2 - tooth)) / 2 + 0.5)
        )
        m |= in_tri
    return m


def blob_mask(n=128, seed=0, lobes=8):
    rng = np.random.default_rng(seed)
    yy, xx = grid(n)
    m = np.zeros((n, n), dtype=bool)
    for _ in range(lobes):
        cy = rng.integers(n // 4, 3 * n // 4)
        cx = rng.integers(n // 4, 3 * n // 4)
        r = rng.integers(n // 12, n // 5)
        m |= (xx - cx) ** 2 + (yy - cy) ** 2 <= r**2
    return m


def shape_suite(n=128):
    """Named masks exercising convex, concave, holed, and jagged outlines."""
    return {
        "disk": disk_mask(n),
        "ellipse": ellipse_mask(n),
        "square": square_mask(n),
        "diamond": diamond_mask(n),
        "crescent": crescent_mask(n),
        "ring": ring_mask(n),
        "comb": comb_mask(n),
        "blob": blob_mask(n, seed=3),
    }


def png_b64(mask: np.ndarray) -> str:
    buf = io.BytesIO()
    Image.fromarray(mask.astype(np.uint8) * 255, mode="L").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


@pytest.fixture()
def shapes():
    return shape_suite()


@pytest.fixture()
def cache_dir(tmp_path) -> Path:
    d = tmp_path / "cache"
    d.mkdir()
    return d
