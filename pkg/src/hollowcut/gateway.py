"""Uniform client for the four external providers: text suggestion,
embedding, image generation, and point-prompted segmentation.

Every call is cached under a content-addressed key, so payload-equal requests
never hit the network twice and an offline run can replay a warm cache.
Retries use jitterless exponential backoff to stay test-deterministic, and
segmentation always falls back to the classical point-prompt engine when the
provider route fails.
"""

from __future__ import annotations

import base64
import hashlib
import io
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import httpx
import numpy as np
from PIL import Image

from .embedding import TokenHashEmbedder
from .errors import (
    DimensionMismatch,
    EmptyIdea,
    OfflineMiss,
    ProviderError,
    SegmentationFailed,
    Timeout,
)
from .patterns import binarize, segment_by_points

KINDS = ("text", "embed", "generate", "segment")

STYLE_CLAUSE = "monochrome Chinese paper-cutting, white background, connected silhouette"

_ENDPOINT_VARS = {
    "text": "HC_TEXT_ENDPOINT",
    "embed": "HC_EMBED_ENDPOINT",
    "generate": "HC_GEN_ENDPOINT",
    "segment": "HC_SEG_ENDPOINT",
}
_KEY_VARS = {
    "text": "HC_API_KEY_TEXT",
    "embed": "HC_API_KEY_EMBED",
    "generate": "HC_API_KEY_GEN",
    "segment": "HC_API_KEY_SEG",
}


@dataclass(frozen=True)
class ProviderConfig:
    kind: str
    endpoint: str = ""
    credential_ref: str = ""
    timeout: float = 30.0
    max_retries: int = 2
    cache_dir: Path = field(default_factory=lambda: Path.home() / ".cache" / "hollowcut")
    offline: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")

    @classmethod
    def from_env(cls, kind: str, env=os.environ) -> "ProviderConfig":
        cache = env.get("HC_CACHE_DIR")
        return cls(
            kind=kind,
            endpoint=env.get(_ENDPOINT_VARS[kind], ""),
            credential_ref=_KEY_VARS[kind],
            offline=env.get("HC_OFFLINE", "") in ("1", "true", "yes"),
            cache_dir=Path(cache) if cache else Path.home() / ".cache" / "hollowcut",
        )


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    count: int = 4
    size: tuple[int, int] = (1024, 1024)

    def __post_init__(self):
        if not 1 <= self.count <= 8:
            raise ValueError("count must be between 1 and 8")
        if self.size[0] < 1 or self.size[1] < 1:
            raise ValueError("size must be positive")


def canonical_payload(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def cache_key(kind: str, payload) -> str:
    body = canonical_payload({"kind": kind, "payload": payload})
    return hashlib.sha256(body.encode("utf-8")).hexdigest()


def build_generation_prompt(idea, user_suffix: str = "") -> str:
    """Fixed style clause + the idea text + any user additions, verbatim."""
    text = getattr(idea, "text", idea)
    if not isinstance(text, str) or not text.strip():
        raise EmptyIdea("generation needs a non-empty idea")
    prompt = f"{STYLE_CLAUSE}. {text.strip()}"
    if user_suffix.strip():
        prompt += f", {user_suffix.strip()}"
    return prompt


def _load_binary_image(image) -> np.ndarray:
    """Accept a bool/gray array or an image path; return a foreground mask."""
    if isinstance(image, np.ndarray):
        if image.dtype == bool:
            return image
        return binarize(image)
    with Image.open(image) as im:
        gray = np.asarray(im.convert("L"))
    return binarize(gray)


class Gateway:
    """Shared handle over the configured providers.

    ``transport`` (an httpx transport) is injectable so tests can script
    provider behavior without sockets; ``sleep`` is injectable so retry
    backoff costs nothing under test.
    """

    def __init__(
        self,
        configs: dict[str, ProviderConfig] | None = None,
        embedder=None,
        transport: httpx.BaseTransport | None = None,
        sleep=time.sleep,
        backoff_base: float = 0.25,
    ):
        self.configs = dict(configs or {})
        for kind in KINDS:
            self.configs.setdefault(kind, ProviderConfig.from_env(kind))
        self.embedder = embedder if embedder is not None else TokenHashEmbedder()
        self._client = httpx.Client(transport=transport) if transport else httpx.Client()
        self._sleep = sleep
        self._backoff_base = backoff_base
        self.fault_log: list[str] = []

    def close(self):
        self._client.close()

    # ------------------------------------------------------------- cache

    def _cache_path(self, kind: str, key: str) -> Path:
        return self.configs[kind].cache_dir / kind / f"{key}.json"

    def _cache_read(self, kind: str, key: str):
        path = self._cache_path(kind, key)
        if not path.exists():
            return None
        return json.loads(path.read_text())

    def _cache_write(self, kind: str, key: str, doc):
        path = self._cache_path(kind, key)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, sort_keys=True))
        os.replace(tmp, path)

    def _blob_write(self, kind: str, raw: bytes) -> str:
        digest = hashlib.sha256(raw).hexdigest()
        blob_dir = self.configs[kind].cache_dir / "blobs"
        blob_dir.mkdir(parents=True, exist_ok=True)
        path = blob_dir / f"{digest}.png"
        if not path.exists():
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(raw)
            os.replace(tmp, path)
        return str(path)

    def _blob_path(self, kind: str, digest: str) -> str:
        return str(self.configs[kind].cache_dir / "blobs" / f"{digest}.png")

    # ----------------------------------------------------------- network

    def _post(self, cfg: ProviderConfig, payload) -> dict:
        if not cfg.endpoint:
            raise ProviderError(0, f"no endpoint configured for {cfg.kind}")
        headers = {}
        key = os.environ.get(cfg.credential_ref, "") if cfg.credential_ref else ""
        if key:
            headers["Authorization"] = f"Bearer {key}"
        last: Exception | None = None
        for attempt in range(cfg.max_retries + 1):
            if attempt:
                self._sleep(self._backoff_base * 2 ** (attempt - 1))
            try:
                resp = self._client.post(
                    cfg.endpoint, json=payload, headers=headers, timeout=cfg.timeout
                )
            except httpx.TimeoutException as exc:
                last = Timeout(f"{cfg.kind} provider timed out: {exc}")
                continue
            except httpx.HTTPError as exc:
                last = ProviderError(0, f"transport failure: {exc}")
                continue
            if resp.status_code >= 500:
                last = ProviderError(resp.status_code, resp.text[:200])
                continue
            if resp.status_code >= 400:
                raise ProviderError(resp.status_code, resp.text[:200])
            try:
                return resp.json()
            except json.JSONDecodeError as exc:
                raise ProviderError(resp.status_code, f"non-JSON reply: {exc}")
        raise last if last else ProviderError(0, "no attempts made")

    def _call(self, kind: str, payload, reshape) -> dict:
        """Cache -> (offline? miss) -> network -> validate/reshape -> cache."""
        cfg = self.configs[kind]
        key = cache_key(kind, payload)
        cached = self._cache_read(kind, key)
        if cached is not None:
            return cached
        if cfg.offline:
            raise OfflineMiss(f"offline and no cached reply for {kind} request {key[:12]}")
        doc = reshape(self._post(cfg, payload))
        self._cache_write(kind, key, doc)
        return doc

    # --------------------------------------------------------------- ops

    def suggest_text(self, bundle) -> str:
        payload = {
            "system": bundle.system_preamble,
            "exemplars": [[q, a] for q, a in bundle.exemplars],
            "user": bundle.user_block,
        }

        def reshape(reply):
            if not isinstance(reply, dict) or not isinstance(reply.get("reply"), str):
                raise ProviderError(200, "text reply missing 'reply' field")
            return {"reply": reply["reply"]}

        return self._call("text", payload, reshape)["reply"]

    def generate_images(self, req: GenerationRequest) -> list[str]:
        payload = {
            "prompt": req.prompt,
            "count": req.count,
            "size": [req.size[0], req.size[1]],
        }

        def reshape(reply):
            images = reply.get("images") if isinstance(reply, dict) else None
            if not isinstance(images, list) or not images:
                raise ProviderError(200, "generation reply missing 'images'")
            digests = []
            for b64 in images:
                raw = base64.b64decode(b64)
                ref = self._blob_write("generate", raw)
                digests.append(Path(ref).stem)
            return {"digests": digests}

        doc = self._call("generate", payload, reshape)
        return [self._blob_path("generate", d) for d in doc["digests"]]

    def embed(self, item) -> np.ndarray:
        cfg = self.configs["embed"]
        if cfg.offline or not cfg.endpoint:
            # deterministic mock keeps the offline workflow closed
            if self.embedder is None:
                raise OfflineMiss("offline embedding with no mock embedder configured")
            return np.asarray(self.embedder.embed_text(str(item)), dtype=np.float64)
        payload = {"input": str(item)}

        def reshape(reply):
            vec = reply.get("vector") if isinstance(reply, dict) else None
            if not isinstance(vec, list) or not vec:
                raise ProviderError(200, "embed reply missing 'vector'")
            return {"vector": [float(x) for x in vec]}

        doc = self._call("embed", payload, reshape)
        v = np.asarray(doc["vector"], dtype=np.float64)
        if v.ndim != 1:
            raise DimensionMismatch("provider embedding must be 1-d")
        return v

    def segment(self, image, fg_points, bg_points=(), image_ref: str = "") -> tuple[np.ndarray, str]:
        """Provider mask when possible, classical fallback otherwise.

        Returns (mask, source) with source "provider" or "fallback". The
        fg/bg point postconditions hold on either route; a provider mask that
        violates them is discarded as a fault.
        """
        fg = [(int(x), int(y)) for x, y in fg_points]
        bg = [(int(x), int(y)) for x, y in bg_points]
        payload = {"image_ref": image_ref or "<inline>", "fg_points": fg, "bg_points": bg}

        def reshape(reply):
            b64 = reply.get("mask") if isinstance(reply, dict) else None
            if not isinstance(b64, str) or not b64:
                raise ProviderError(200, "segment reply missing 'mask'")
            return {"mask": b64}

        pixels = _load_binary_image(image)
        try:
            doc = self._call("segment", payload, reshape)
            with Image.open(io.BytesIO(base64.b64decode(doc["mask"]))) as im:
                mask = np.asarray(im.convert("L")) > 127
            if mask.shape != pixels.shape:
                raise ProviderError(200, "provider mask shape mismatch")
            for x, y in fg:
                if not mask[y, x]:
                    raise ProviderError(200, "provider mask misses a foreground point")
            for x, y in bg:
                if mask[y, x]:
                    raise ProviderError(200, "provider mask covers a background point")
            return mask, "provider"
        except Exception as exc:
            self.fault_log.append(f"segment provider route failed: {exc}")
        try:
            return segment_by_points(pixels, fg, bg), "fallback"
        except Exception as exc:
            raise SegmentationFailed(cause=exc) from exc
