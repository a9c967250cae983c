"""
The full studio workflow over HTTP, fully offline
=================================================

Drives the service end to end with no network: intent capture, suggestion
fallback, idea composition, reference retrieval, segmentation, board
assembly with a cut-out, and export. Everything runs in-process against
the real application object.
"""

import os
import time
import warnings
from pathlib import Path

import numpy as np

warnings.filterwarnings("ignore", message="Using `httpx`")
from fastapi.testclient import TestClient

from hollowcut.config import ServiceConfig
from hollowcut.datasets import synthesize_work_image
from hollowcut.service import create_app
from hollowcut.svgio import import_svg

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)
os.environ["HC_OFFLINE"] = "1"

app = create_app(ServiceConfig(cache_dir=out / "cache", offline=True))
t0 = time.monotonic()

with TestClient(app) as api:
    print("health:", api.get("/health").json())

    sid = api.post("/session", json={}).json()["session_id"]

    # Intent: free text plus factor selections, validated against the
    # taxonomy. Offline, suggestions come from corpus mining; the reply
    # says so via source.
    r = api.post(f"/session/{sid}/intent", json={
        "intent_text": "a lively scene welcoming spring at the window",
        "selections": {"Subject Matter": "Flora and Fauna",
                       "Method of Expression": "Symbolism"},
    }).json()
    names = [n for n, _ in r["objects"][:2]]
    print(f"suggestions ({r['source']}): {names} ...")

    # Idea: accepted suggestions fold into one composed description that
    # later drives both retrieval and generation prompts.
    idea = api.post(f"/session/{sid}/idea", json={"accepted": names}).json()
    print(f"idea: {idea['text']}")

    # References: retrieval is always available offline. Generation would
    # need a provider, so only the retrieved ranking is requested here.
    refs = api.get(f"/session/{sid}/references",
                   params={"mode": "retrieved"}).json()["retrieved"]
    top = refs[0]["work_id"]
    print(f"{len(refs)} references, top: {top} (score {refs[0]['score']:.3f})")

    # Segment the top reference with one foreground click. The provider is
    # offline, so the local fallback answers, flagged in source.
    img = synthesize_work_image(top)
    ys, xs = np.nonzero(img)
    seg = api.post(f"/session/{sid}/segment", json={
        "image_ref": top, "fg_points": [[int(xs[0]), int(ys[0])]],
    }).json()
    print(f"segment via {seg['source']}: "
          f"{len(seg['path']['subpaths'])} outline subpath(s)")

    # Board: a backing sheet, the segmented outline as a cut-out, and the
    # cut applied as a hole. Every mutation carries the version token.
    ver = api.get(f"/session/{sid}").json()["version"]
    h, w = img.shape
    sheet = {"path": {"fill_rule": "evenodd",
                      "subpaths": [[[0, 0], [w, 0], [w, h], [0, h], [0, 0]]]}}
    ver = api.post(f"/session/{sid}/board/add", json={
        "version": ver, "id": "sheet", "element": sheet}).json()["version"]
    ver = api.post(f"/session/{sid}/board/add", json={
        "version": ver, "id": "cut",
        "element": {"path": seg["path"], "kind": "cutout", "fill": "hole"},
    }).json()["version"]
    ver = api.post(f"/session/{sid}/board/apply-cutout", json={
        "version": ver, "cutout_id": "cut", "target_id": "sheet"}).json()["version"]

    svg = api.get(f"/session/{sid}/export.svg").content
    (out / "workflow.svg").write_bytes(svg)
    board = import_svg(svg)
    n_sub = len(board.nodes["sheet"].path.subpaths)
    print(f"export: {len(svg)} bytes, sheet has {n_sub} subpaths "
          f"(outline + {n_sub - 1} hole subpaths)")

print(f"\nwhole workflow offline in {time.monotonic() - t0:.2f}s")
print(f"wrote {out / 'workflow.svg'}")
