"""
Point-prompted segmentation with a guaranteed fallback
======================================================

Selects part of a work silhouette from foreground and background clicks,
first with the local connected-component fallback directly, then through
the provider gateway while the provider is failing, to show that faults
reroute instead of surfacing.
"""

from pathlib import Path

import httpx
import numpy as np
from PIL import Image

from hollowcut.datasets import synthesize_work_image
from hollowcut.errors import ConflictingPoints, PointOnOppositeClass
from hollowcut.gateway import Gateway, ProviderConfig
from hollowcut.patterns import segment_by_points

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

img = synthesize_work_image("w005")
ys, xs = np.nonzero(img)
fg = [(int(xs[0]), int(ys[0]))]
print(f"w005: {img.shape[1]}x{img.shape[0]}, clicking foreground at {fg[0]}")

# The fallback keeps exactly the silhouette components the foreground
# clicks land in. Background clicks veto: a selected component containing
# one would contradict the user, so it is an error, not a silent drop.
mask = segment_by_points(img, fg)
print(f"selected {int(mask.sum())} of {int(img.sum())} silhouette pixels")
Image.fromarray(np.where(mask, 255, 0).astype(np.uint8)).save(out / "w005-mask.png")
print(f"wrote {out / 'w005-mask.png'}")

# Contradictory clicks are rejected with a named reason.
bg_floor = np.argwhere(~img)[0]
try:
    segment_by_points(img, [(int(bg_floor[1]), int(bg_floor[0]))])
except PointOnOppositeClass as exc:
    print(f"fg click on background rejected: {exc}")
try:
    segment_by_points(img, fg, bg_points=fg)
except ConflictingPoints as exc:
    print(f"same point clicked both ways rejected: {exc}")

# Now the same selection through the gateway, against a provider whose
# connection always fails. The result must be identical to the fallback
# and the fault recorded, never raised.
def refuse(request):
    raise httpx.ConnectError("connection refused")


gw = Gateway(
    {"segment": ProviderConfig("segment", "http://seg.invalid/v1", "",
                               cache_dir=out / "cache", max_retries=1)},
    transport=httpx.MockTransport(refuse),
    sleep=lambda s: None,
)
routed, source = gw.segment(img, fg)
print(f"\ngateway route: {source}, faults logged: {len(gw.fault_log)}")
print(f"fallback equals direct call: {bool(np.array_equal(routed, mask))}")
gw.close()
