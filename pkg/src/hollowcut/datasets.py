"""Packaged reference corpus and deterministic demo image synthesis.

The reference corpus ships with the package: the factor/pattern taxonomy plus
20 annotated demo works with prompt templates. Images are synthesized on
demand (white sheet, black silhouette, punched holes) so the corpus stays
tiny and fully reproducible: the same work id always yields the same bytes.
"""

from __future__ import annotations

import hashlib
import shutil
from importlib import resources
from pathlib import Path

import numpy as np
from PIL import Image

from .knowledge import KnowledgeBase, load_corpus

IMAGE_SIZE = 256
_MARGIN = 10


def reference_dir() -> Path:
    """Directory of the packaged taxonomy + annotations (no images)."""
    return Path(resources.files("hollowcut") / "data")


def load_reference_corpus() -> KnowledgeBase:
    return load_corpus(reference_dir())


def _seed_for(work_id: str) -> int:
    digest = hashlib.sha256(work_id.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _ellipse(canvas: np.ndarray, cy, cx, ry, rx, value: bool):
    h, w = canvas.shape
    yy, xx = np.mgrid[0:h, 0:w]
    inside = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0
    canvas[inside] = value


def _bar(canvas: np.ndarray, y0, x0, y1, x1, half_w: int, value: bool):
    h, w = canvas.shape
    yy, xx = np.mgrid[0:h, 0:w]
    dy, dx = y1 - y0, x1 - x0
    norm = max(float(np.hypot(dy, dx)), 1e-9)
    t = ((yy - y0) * dy + (xx - x0) * dx) / norm**2
    t = np.clip(t, 0.0, 1.0)
    py, px = y0 + t * dy, x0 + t * dx
    inside = np.hypot(yy - py, xx - px) <= half_w
    canvas[inside] = value


def synthesize_work_image(work_id: str, size: int = IMAGE_SIZE) -> np.ndarray:
    """Deterministic binary silhouette for a demo work (True = paper).

    The sheet holds one large pierced medallion, a small detached seal in a
    corner, and clear borders, which is enough surface for segmentation,
    cut-out extraction, and tracing demos.
    """
    rng = np.random.default_rng(_seed_for(work_id))
    fg = np.zeros((size, size), dtype=bool)
    c = size // 2

    # main silhouette: central ellipse plus attached lobes
    _ellipse(fg, c, c, rng.integers(58, 78), rng.integers(58, 78), True)
    for _ in range(int(rng.integers(2, 5))):
        ang = rng.uniform(0, 2 * np.pi)
        dist = rng.integers(40, 70)
        cy = c + int(dist * np.sin(ang))
        cx = c + int(dist * np.cos(ang))
        _ellipse(fg, cy, cx, rng.integers(18, 34), rng.integers(18, 34), True)
        _bar(fg, c, c, cy, cx, int(rng.integers(6, 12)), True)

    # punched holes: the cut-outs later stages extract
    for _ in range(int(rng.integers(6, 12))):
        ang = rng.uniform(0, 2 * np.pi)
        dist = rng.integers(0, 52)
        cy = c + int(dist * np.sin(ang))
        cx = c + int(dist * np.cos(ang))
        ry, rx = int(rng.integers(4, 12)), int(rng.integers(4, 12))
        interior = fg[max(cy - ry - 2, 0):cy + ry + 3, max(cx - rx - 2, 0):cx + rx + 3]
        if interior.size and interior.all():
            _ellipse(fg, cy, cx, ry, rx, False)

    # detached corner seal with one hole, second component for point prompts
    sy = _MARGIN + 22
    sx = size - _MARGIN - 24
    _ellipse(fg, sy, sx, 18, 18, True)
    _ellipse(fg, sy, sx, 6, 6, False)

    # keep the sheet border clear
    fg[:_MARGIN, :] = False
    fg[-_MARGIN:, :] = False
    fg[:, :_MARGIN] = False
    fg[:, -_MARGIN:] = False
    return fg


def write_work_image(work_id: str, path: Path, size: int = IMAGE_SIZE):
    fg = synthesize_work_image(work_id, size)
    # black ink on white sheet
    img = Image.fromarray(np.where(fg, 0, 255).astype(np.uint8), mode="L")
    path.parent.mkdir(parents=True, exist_ok=True)
    img.save(path, format="PNG")


def make_demo_corpus(target_dir: str | Path) -> KnowledgeBase:
    """Materialize the reference corpus with images under ``target_dir``.

    Copies the packaged data files and renders every work's image to its
    ``image_ref`` path. Idempotent: rerunning overwrites with identical bytes.
    """
    target_dir = Path(target_dir)
    target_dir.mkdir(parents=True, exist_ok=True)
    src = reference_dir()
    for name in ("taxonomy.json", "works.jsonl", "templates.jsonl"):
        shutil.copyfile(src / name, target_dir / name)
    kb = load_corpus(target_dir)
    for w in kb.works:
        write_work_image(w.work_id, target_dir / w.image_ref)
    return kb


# ------------------------------------------------ classification exemplars

def _grid(n: int):
    return np.mgrid[0:n, 0:n]


def _disk_mask(n=64, r=22, cy=None, cx=None):
    cy = n // 2 if cy is None else cy
    cx = n // 2 if cx is None else cx
    yy, xx = _grid(n)
    return (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r


def _square_mask(n=64, s=36):
    m = np.zeros((n, n), dtype=bool)
    o = (n - s) // 2
    m[o : o + s, o : o + s] = True
    return m


def _triangle_mask(n=64, s=40):
    yy, xx = _grid(n)
    o = (n - s) // 2
    return (yy >= o) & (yy < o + s) & (xx >= o) & (xx - o <= yy - o)


def _diamond_mask(n=64, r=22):
    yy, xx = _grid(n)
    return np.abs(yy - n // 2) + np.abs(xx - n // 2) <= r


def _crescent_mask(n=64):
    return _disk_mask(n, 24) & ~_disk_mask(n, 20, cy=n // 2 - 9)


def _cloud_mask(n=64):
    m = _disk_mask(n, 12, cx=n // 2 - 14) | _disk_mask(n, 14) | _disk_mask(n, 12, cx=n // 2 + 14)
    m[n // 2 + 10 :, :] = False
    return m


def _petal_mask(n=64):
    yy, xx = _grid(n)
    return ((yy - n // 2) / 26.0) ** 2 + ((xx - n // 2) / 12.0) ** 2 <= 1.0


def _droplet_mask(n=64):
    yy, xx = _grid(n)
    body = (yy - 40) ** 2 + (xx - n // 2) ** 2 <= 14 * 14
    tip = (yy >= 12) & (yy < 40) & (np.abs(xx - n // 2) <= (yy - 12) * 14 // 28)
    return body | tip


def _comb_mask(n=64, tooth=6):
    # teeth on both edges of a thin bar, as on a sawtooth border pattern
    m = np.zeros((n, n), dtype=bool)
    m[29:35, 4:60] = True
    yy, xx = _grid(n)
    phase = (xx - 4) % (2 * tooth)
    rise = np.minimum(phase, 2 * tooth - phase)
    in_cols = (xx >= 4) & (xx < 60)
    m |= in_cols & (yy < 29) & (29 - yy <= rise)
    m |= in_cols & (yy >= 35) & (yy - 34 <= rise)
    return m


def exemplar_bank() -> list:
    """Labeled (subcategory, name, descriptor) triples for nearest-neighbor
    cut-out classification. Synthetic canonical silhouettes, deterministic."""
    from .patterns import descriptors

    shapes = [
        ("Geometric Unit", "circle", _disk_mask()),
        ("Geometric Unit", "square", _square_mask()),
        ("Geometric Unit", "triangle", _triangle_mask()),
        ("Geometric Unit", "diamond", _diamond_mask()),
        ("Semantic Unit", "crescent", _crescent_mask()),
        ("Semantic Unit", "cloud", _cloud_mask()),
        ("Semantic Unit", "petal", _petal_mask()),
        ("Semantic Unit", "droplet", _droplet_mask()),
        ("Sawtooth", "coarse comb", _comb_mask(tooth=8)),
        ("Sawtooth", "fine comb", _comb_mask(tooth=4)),
    ]
    return [(sub, name, descriptors(mask)) for sub, name, mask in shapes]
