"""
Mining cut-out patterns from a work
===================================

Renders one corpus work, finds every enclosed cut-out with a flood fill
against the silhouette, traces each to a vector outline, and classifies
it against the pattern lexicon. Writes the rendering and the traced
outlines under demos/out/.
"""

from pathlib import Path

import numpy as np
from PIL import Image

from hollowcut.datasets import exemplar_bank, synthesize_work_image
from hollowcut.patterns import (
    classify_unit_pattern,
    descriptors,
    detect_sawtooth,
    extract_cutouts,
    vectorize,
)

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

# Work renderings are synthesized deterministically from the id, so this
# image is byte-identical on every machine.
work_id = "w003"
img = synthesize_work_image(work_id)
Image.fromarray(np.where(img, 0, 255).astype(np.uint8)).save(out / f"{work_id}.png")
print(f"{work_id}: {img.shape[1]}x{img.shape[0]} rendering, "
      f"{int(img.sum())} silhouette pixels")

# A cut-out is a connected region of background fully enclosed by the
# silhouette. Border-reachable background is the surrounding page, not a
# cut-out, so it never appears here.
cutouts = extract_cutouts(img, min_area=4)
print(f"{len(cutouts)} cut-outs found\n")

# Each cut-out gets shape descriptors (normalized area, circularity,
# moment invariants, boundary spectrum) and a nearest lexicon name. A
# strong sawtooth response overrides the subcategory, since jagged edge
# runs are their own family of cuts.
bank = exemplar_bank()
print(f"{'id':<10} {'bbox':<20} {'area':>5}  {'subcategory':<16} nearest")
for cut in cutouts:
    local = cut.to_local_mask()
    sub, name, confidence = classify_unit_pattern(descriptors(local), bank)
    score = detect_sawtooth(local)
    if score >= 0.6:
        sub = "Sawtooth"
    bbox = f"({cut.bbox.x},{cut.bbox.y} {cut.bbox.w}x{cut.bbox.h})"
    print(f"{cut.cutout_id:<10} {bbox:<20} {cut.area:>5}  {sub:<16} "
          f"{name} ({confidence:.2f})")

# Tracing turns the pixel mask into a closed polyline within a stated
# tolerance of the boundary. The outline lives in image coordinates once
# translated by the bbox origin.
paths = [vectorize(c.to_local_mask()).translated(c.bbox.x, c.bbox.y) for c in cutouts]
points = sum(len(sp) for p in paths for sp in p.subpaths)
print(f"\ntraced {len(paths)} outlines, {points} vertices total")

svg = ['<?xml version="1.0" encoding="UTF-8"?>',
       f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {img.shape[1]} {img.shape[0]}">']
for p in paths:
    d = " ".join(
        "M " + " L ".join(f"{x:.1f} {y:.1f}" for x, y in sp) + " Z"
        for sp in p.subpaths
    )
    svg.append(f'  <path d="{d}" fill="none" stroke="#000"/>')
svg.append("</svg>")
(out / f"{work_id}-outlines.svg").write_text("\n".join(svg) + "\n")
print(f"wrote {out / (work_id + '.png')}")
print(f"wrote {out / (work_id + '-outlines.svg')}")
