"""HTTP orchestration of the full studio workflow.

One FastAPI app per corpus: intent capture, suggestion requests, idea
composition, reference retrieval/generation, point-prompted segmentation,
cut-out manifests, board mutations behind a per-session writer lock with an
optimistic version token, and canonical document export.
"""

from __future__ import annotations

import base64
import io
import re
import threading
from dataclasses import dataclass, field

import numpy as np
from fastapi import Body, FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from PIL import Image

from .board import mint_id, validate_board
from .config import ServiceConfig
from .datasets import exemplar_bank, synthesize_work_image
from .embedding import TokenHashEmbedder
from .errors import (
    ConflictingPoints,
    CorruptSession,
    CrossParentGroup,
    DuplicateId,
    EmptyIdea,
    EmptyResult,
    NoOverlap,
    NotACutout,
    NotAGroup,
    OfflineMiss,
    PointOnOppositeClass,
    ProviderError,
    SchemaError,
    SegmentationFailed,
    SingularTransform,
    Timeout,
    UnknownId,
    UnknownType,
)
from .gateway import Gateway, GenerationRequest, build_generation_prompt
from .ideation import (
    DesignIntent,
    build_ideation_prompt,
    compose_idea,
    edit_idea,
    request_suggestions,
    validate_intent,
)
from .knowledge import load_corpus
from .patterns import (
    classify_unit_pattern,
    descriptors,
    detect_sawtooth,
    extract_cutouts,
    vectorize,
)
from .retrieval import build_index, search
from .session import (
    Session,
    board_doc,
    element_doc,
    element_from_doc,
    session_doc,
)
from .svgio import export_svg

_IDENTITY_DOC = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]
_DIGEST_RE = re.compile(r"[0-9a-f]{64}")

# domain faults on a structurally valid request
_INVALID_OP = (
    UnknownId,
    DuplicateId,
    SingularTransform,
    CrossParentGroup,
    NotAGroup,
    NotACutout,
    NoOverlap,
    SchemaError,
    ValueError,
)
_POINT_FAULTS = (PointOnOppositeClass, ConflictingPoints, EmptyResult, ValueError)


class GatewayEmbedder:
    """Adapts the gateway's text embedding to the index builder protocol."""

    def __init__(self, gateway: Gateway):
        self._gateway = gateway

    def embed_text(self, text: str) -> np.ndarray:
        return self._gateway.embed(text)

    def embed_item(self, item) -> np.ndarray:
        metadata = item[2] if len(item) > 2 and isinstance(item[2], dict) else {}
        return self.embed_text(metadata.get("text", str(item[0])))


def work_text(work) -> str:
    """Retrieval text for an annotated work: title, region, factor readings,
    listed patterns."""
    parts = [work.title, work.region]
    for a in work.assignments:
        parts.append(f"{a.type_name}: {a.explanation}" if a.explanation else a.type_name)
    if work.composite_patterns:
        parts.append("patterns: " + ", ".join(work.composite_patterns))
    return ". ".join(parts)


@dataclass
class _SessionBox:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)


def _err(status: int, message: str, **extra):
    return JSONResponse({"error": message, **extra}, status_code=status)


def _b64_png(mask: np.ndarray) -> str:
    buf = io.BytesIO()
    Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), mode="L").save(buf, "PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _path_doc(path) -> dict:
    return {
        "fill_rule": path.fill_rule,
        "subpaths": [[[float(x), float(y)] for x, y in sp] for sp in path.subpaths],
    }


def create_app(config: ServiceConfig | None = None, gateway: Gateway | None = None) -> FastAPI:
    config = config or ServiceConfig.from_env()
    kb = load_corpus(config.data_dir)
    gw = gateway or Gateway(config.providers)
    embedder = GatewayEmbedder(gw)

    items = [
        (w.work_id, f"/works/{w.work_id}/image.png", {"text": work_text(w)})
        for w in kb.works
    ]
    try:
        index = build_index(items, embedder)
    except Exception as exc:  # provider down at startup: retrieval stays alive on the mock
        gw.fault_log.append(f"index build fell back to the mock embedder: {exc}")
        embedder = TokenHashEmbedder()
        index = build_index(items, embedder)
    bank = exemplar_bank()

    app = FastAPI(title="hollowcut studio", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    state_lock = threading.Lock()
    boxes: dict[str, _SessionBox] = {}
    counter = {"n": 0}
    app.state.kb = kb
    app.state.config = config
    app.state.gateway = gw
    app.state.sessions = boxes

    @app.exception_handler(RequestValidationError)
    async def _bad_body(request, exc):
        return _err(400, "malformed request body")

    def _box(session_id: str) -> _SessionBox | None:
        with state_lock:
            return boxes.get(session_id)

    def _work_image(work_id: str) -> np.ndarray:
        path = config.data_dir / "images" / f"{work_id}.png"
        if path.exists():
            with Image.open(path) as im:
                return np.asarray(im.convert("L")) < 128
        return synthesize_work_image(work_id)

    def _resolve_image(ref: str) -> np.ndarray | None:
        if any(w.work_id == ref for w in kb.works):
            return _work_image(ref)
        digest = ref[4:] if ref.startswith("gen:") else ref
        if _DIGEST_RE.fullmatch(digest):
            blob = config.cache_dir / "blobs" / f"{digest}.png"
            if blob.exists():
                with Image.open(blob) as im:
                    return np.asarray(im.convert("L")) > 127
        return None

    # ------------------------------------------------------------- health

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "offline": config.offline,
            "works": len(kb.works),
            "provider_faults": len(gw.fault_log),
        }

    # ------------------------------------------------------------ corpus

    @app.get("/works")
    def list_works():
        return {
            "works": [
                {
                    "work_id": w.work_id,
                    "title": w.title,
                    "region": w.region,
                    "url": f"/works/{w.work_id}/image.png",
                }
                for w in kb.works
            ]
        }

    @app.get("/works/{work_id}/image.png")
    def work_image(work_id: str):
        if not any(w.work_id == work_id for w in kb.works):
            return _err(404, f"unknown work {work_id!r}")
        fg = _work_image(work_id)
        buf = io.BytesIO()
        Image.fromarray(np.where(fg, 0, 255).astype(np.uint8), mode="L").save(buf, "PNG")
        return Response(content=buf.getvalue(), media_type="image/png")

    @app.get("/works/{work_id}/patterns")
    def work_patterns(work_id: str, min_area: int = 4):
        if not any(w.work_id == work_id for w in kb.works):
            return _err(404, f"unknown work {work_id!r}")
        fg = _work_image(work_id)
        entries = []
        for cut in extract_cutouts(fg, min_area=min_area):
            local = np.zeros((cut.bbox.h, cut.bbox.w), dtype=bool)
            local[cut.pixels[:, 1] - cut.bbox.y, cut.pixels[:, 0] - cut.bbox.x] = True
            desc = descriptors(local)
            sub, name, confidence = classify_unit_pattern(desc, bank)
            score = detect_sawtooth(local)
            if score >= 0.6:
                sub = "Sawtooth"
            entries.append(
                {
                    "cutout_id": cut.cutout_id,
                    "bbox": [cut.bbox.x, cut.bbox.y, cut.bbox.w, cut.bbox.h],
                    "area": int(cut.pixels.shape[0]),
                    "subcategory": sub,
                    "nearest_pattern": name,
                    "confidence": confidence,
                    "sawtooth_score": score,
                    "path": _path_doc(vectorize(local).translated(cut.bbox.x, cut.bbox.y)),
                }
            )
        return {"work_id": work_id, "cutouts": entries}

    @app.get("/blobs/{digest}.png")
    def blob(digest: str):
        if not _DIGEST_RE.fullmatch(digest):
            return _err(404, "no such blob")
        path = config.cache_dir / "blobs" / f"{digest}.png"
        if not path.exists():
            return _err(404, "no such blob")
        return Response(content=path.read_bytes(), media_type="image/png")

    # ----------------------------------------------------------- sessions

    @app.post("/session", status_code=201)
    def create_session(payload: dict | None = Body(default=None)):
        payload = payload or {}
        canvas = payload.get("canvas", [1024.0, 1024.0])
        if (
            not isinstance(canvas, (list, tuple))
            or len(canvas) != 2
            or not all(isinstance(v, (int, float)) and v > 0 for v in canvas)
        ):
            return _err(400, "canvas must be [width, height]")
        with state_lock:
            counter["n"] += 1
            sid = f"s{counter['n']:04d}"
            boxes[sid] = _SessionBox(Session(session_id=sid, canvas=(float(canvas[0]), float(canvas[1]))))
            session = boxes[sid].session
        return {"session_id": sid, "version": session.version, "board": board_doc(session.board)}

    @app.get("/session/{sid}")
    def get_session(sid: str):
        box = _box(sid)
        if box is None:
            return _err(404, f"unknown session {sid!r}")
        return session_doc(box.session)

    @app.post("/session/{sid}/intent")
    def post_intent(sid: str, payload: dict = Body(...)):
        box = _box(sid)
        if box is None:
            return _err(404, f"unknown session {sid!r}")
        text = payload.get("intent_text", "")
        selections = payload.get("selections", {})
        if not isinstance(text, str) or not isinstance(selections, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in selections.items()
        ):
            return _err(400, "intent needs intent_text: str and selections: {factor: type}")
        intent = DesignIntent(intent_text=text, selections=selections)
        try:
            validate_intent(intent, kb)
        except UnknownType as exc:
            return _err(400, "invalid factor selection", violations=[str(exc)])
        bundle = build_ideation_prompt(intent, kb)
        suggestions = request_suggestions(bundle, gw, kb)
        session = box.session
        session.intent = intent
        session.suggestions = suggestions
        return {
            "objects": [[n, m] for n, m in suggestions.objects],
            "patterns": [[n, m] for n, m in suggestions.patterns],
            "source": suggestions.source,
        }

    @app.post("/session/{sid}/idea")
    def post_idea(sid: str, payload: dict = Body(...)):
        box = _box(sid)
        if box is None:
            return _err(404, f"unknown session {sid!r}")
        session = box.session
        if session.intent is None:
            return _err(409, "no intent captured yet")
        accepted = payload.get("accepted", [])
        text = payload.get("text")
        if not isinstance(accepted, list) or not all(isinstance(a, str) for a in accepted):
            return _err(400, "accepted must be a list of suggestion names")
        if text is not None and not isinstance(text, str):
            return _err(400, "text must be a string")
        if session.suggestions is not None:
            known = {n for n, _ in session.suggestions.objects} | {
                n for n, _ in session.suggestions.patterns
            }
            unknown = [a for a in accepted if a not in known]
            if unknown:
                return _err(400, "accepted names not among the suggestions", violations=unknown)
        elif accepted:
            return _err(409, "no suggestions to accept from")
        try:
            idea = compose_idea(session.intent, accepted)
        except EmptyIdea as exc:
            return _err(400, str(exc))
        if text is not None and text.strip():
            idea = edit_idea(idea, text)
        session.idea = idea
        return {"text": idea.text, "accepted": list(idea.accepted)}

    @app.get("/session/{sid}/references")
    def references(sid: str, mode: str = "both", count: int = 4, suffix: str = ""):
        box = _box(sid)
        if box is None:
            return _err(404, f"unknown session {sid!r}")
        session = box.session
        if session.idea is None:
            return _err(409, "no idea confirmed yet")
        if mode not in ("retrieved", "generated", "both"):
            return _err(400, "mode must be retrieved, generated, or both")
        out = {}
        if mode in ("retrieved", "both"):
            try:
                qv = embedder.embed_text(session.idea.text)
                hits = search(index, qv, k=config.k_retrieve)
            except Exception as exc:
                return _err(502, f"retrieval embedding failed: {exc}")
            out["retrieved"] = [
                {
                    "work_id": r.work_id,
                    "score": r.score,
                    "rank": r.rank,
                    "image_ref": r.work_id,
                    "url": f"/works/{r.work_id}/image.png",
                }
                for r in hits
            ]
            session.references["retrieved"] = out["retrieved"]
        if mode in ("generated", "both"):
            if not isinstance(count, int) or not 1 <= count <= 8:
                return _err(400, "count must be 1..8")
            prompt = build_generation_prompt(session.idea, suffix)
            try:
                paths = gw.generate_images(GenerationRequest(prompt=prompt, count=count))
                gen = []
                for p in paths:
                    digest = p.rsplit("/", 1)[-1].removesuffix(".png")
                    gen.append({"image_ref": f"gen:{digest}", "url": f"/blobs/{digest}.png"})
                out["generated"] = gen
                session.references["generated"] = gen
            except (OfflineMiss, ProviderError, Timeout) as exc:
                if mode == "generated":
                    return _err(502, f"generation unavailable: {exc}")
                out["generated"] = []
                out["generated_error"] = str(exc)
        return out

    @app.post("/session/{sid}/segment")
    def segment(sid: str, payload: dict = Body(...)):
        box = _box(sid)
        if box is None:
            return _err(404, f"unknown session {sid!r}")
        ref = payload.get("image_ref")
        if not isinstance(ref, str) or not ref:
            return _err(400, "image_ref is required")

        def points(key):
            raw = payload.get(key, [])
            if not isinstance(raw, list) or not all(
                isinstance(p, (list, tuple))
                and len(p) == 2
                and all(isinstance(v, (int, float)) for v in p)
                for p in raw
            ):
                raise TypeError(f"{key} must be a list of [x, y] pairs")
            return [(int(p[0]), int(p[1])) for p in raw]

        try:
            fg = points("fg_points")
            bg = points("bg_points")
        except TypeError as exc:
            return _err(400, str(exc))
        if not fg:
            return _err(400, "at least one fg point is required")
        image = _resolve_image(ref)
        if image is None:
            return _err(404, f"unknown image ref {ref!r}")
        h, w = image.shape
        for x, y in fg + bg:
            if not (0 <= x < w and 0 <= y < h):
                return _err(422, f"point ({x}, {y}) is outside the {w}x{h} image")
        try:
            mask, source = gw.segment(image, fg, bg, image_ref=ref)
        except SegmentationFailed as exc:
            if isinstance(exc.cause, _POINT_FAULTS):
                return _err(422, str(exc.cause))
            return _err(502, f"segmentation failed: {exc}")
        path = vectorize(mask)
        return {
            "source": source,
            "shape": [int(h), int(w)],
            "mask_png": _b64_png(mask),
            "path": _path_doc(path),
        }

    # -------------------------------------------------------- board ops

    def _checked_version(session: Session, payload: dict):
        version = payload.get("version")
        if not isinstance(version, int):
            return _err(400, "version token is required")
        if version != session.version:
            return _err(
                409,
                f"stale version {version}, board is at {session.version}",
                version=session.version,
            )
        return None

    def _record_for(verb: str, payload: dict, session: Session):
        """(record, extra-response dict) or an error response."""
        if verb == "add":
            eid = payload.get("id")
            spec_doc = payload.get("element")
            if not isinstance(eid, str) or not isinstance(spec_doc, dict):
                return _err(400, "add needs id: str and element: object")
            if not isinstance(spec_doc.get("path"), dict):
                return _err(400, "element needs a path object")
            kind = spec_doc.get("kind", "contour")
            doc = {
                "type": "element",
                "kind": kind,
                "fill": spec_doc.get("fill", "hole" if kind == "cutout" else "foreground"),
                "transform": spec_doc.get("transform", _IDENTITY_DOC),
                "path": spec_doc["path"],
                "provenance": spec_doc.get("provenance"),
                "holes": [],
            }
            try:
                element = element_from_doc(eid, doc)
            except (CorruptSession, KeyError, TypeError) as exc:
                return _err(400, f"malformed element: {exc}")
            return {"op": "add_element", "id": eid, "element": element_doc(element)}, {"id": eid}
        if verb == "transform":
            nid, name = payload.get("id"), payload.get("name")
            params = payload.get("params", {})
            if not isinstance(nid, str) or not isinstance(name, str) or not isinstance(params, dict):
                return _err(400, "transform needs id: str, name: str, params: object")
            return {"op": "transform", "id": nid, "name": name, "params": params}, {}
        if verb == "group":
            ids = payload.get("ids")
            if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
                return _err(400, "group needs ids: [str]")
            return {"op": "group", "ids": ids}, {"group_id": mint_id(session.board)[1]}
        if verb == "ungroup":
            nid = payload.get("id")
            if not isinstance(nid, str):
                return _err(400, "ungroup needs id: str")
            return {"op": "ungroup", "id": nid}, {}
        if verb == "duplicate":
            nid = payload.get("id")
            if not isinstance(nid, str):
                return _err(400, "duplicate needs id: str")
            return {"op": "duplicate", "id": nid}, {"new_id": mint_id(session.board)[1]}
        if verb == "apply-cutout":
            cid, tid = payload.get("cutout_id"), payload.get("target_id")
            if not isinstance(cid, str) or not isinstance(tid, str):
                return _err(400, "apply-cutout needs cutout_id and target_id")
            return {"op": "apply_cutout", "cutout_id": cid, "target_id": tid}, {}
        return _err(404, f"unknown board operation {verb!r}")

    @app.post("/session/{sid}/board/{verb}")
    def board_op(sid: str, verb: str, payload: dict = Body(...)):
        box = _box(sid)
        if box is None:
            return _err(404, f"unknown session {sid!r}")
        with box.lock:
            session = box.session
            stale = _checked_version(session, payload)
            if stale is not None:
                return stale
            made = _record_for(verb, payload, session)
            if isinstance(made, JSONResponse):
                return made
            record, extra = made
            try:
                session.mutate(record)
            except _INVALID_OP as exc:
                return _err(422, str(exc))
            problems = validate_board(session.board)
            if problems:  # should be unreachable; fail loudly, not quietly
                return _err(500, f"board invariants violated: {problems[:3]}")
            return {"version": session.version, "board": board_doc(session.board), **extra}

    @app.post("/session/{sid}/undo")
    def undo(sid: str, payload: dict | None = Body(default=None)):
        box = _box(sid)
        if box is None:
            return _err(404, f"unknown session {sid!r}")
        with box.lock:
            session = box.session
            stale = _checked_version(session, payload or {})
            if stale is not None:
                return stale
            undone = session.undo()
            return {"version": session.version, "board": board_doc(session.board), "undone": undone}

    @app.get("/session/{sid}/export.svg")
    def export(sid: str, scale: float = 1.0):
        box = _box(sid)
        if box is None:
            return _err(404, f"unknown session {sid!r}")
        if not (scale > 0):
            return _err(400, "scale must be positive")
        with box.lock:
            data = export_svg(box.session.board, scale=scale)
        return Response(content=data, media_type="image/svg+xml")

    return app


def run(config: ServiceConfig | None = None):
    """Blocking server start (the CLI serve verb)."""
    import uvicorn

    config = config or ServiceConfig.from_env()
    host, port = config.listen_host_port()
    uvicorn.run(create_app(config), host=host, port=port, log_level="warning")
