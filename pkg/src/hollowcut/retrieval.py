"""Exact top-k cosine retrieval and the recall evaluation harness.

The corpus is hundreds of works, so search is a full scan: no approximate
structure, and ranking equivalence against a brute-force oracle is testable
bit for bit. Ties (equal cosine) order by ascending work id.
"""

from __future__ import annotations

import base64
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateId,
    EmbedderFault,
    EmptyEvaluation,
    SchemaError,
    UnknownGroundTruth,
    ZeroVector,
)

INDEX_SCHEMA = "hollowcut/index@1"


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ZeroVector("vector has non-finite entries")
    norm = float(np.linalg.norm(v))
    if norm < 1e-12:
        raise ZeroVector("cannot normalize a zero vector")
    return v / norm


@dataclass(frozen=True)
class RankedResult:
    work_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class RecallReport:
    ks: tuple[int, ...]
    recall_at: dict[int, float]
    n_queries: int


@dataclass(frozen=True)
class RetrievalIndex:
    dim: int
    ids: tuple[str, ...]  # ascending
    vectors: np.ndarray  # (n, dim) float64, unit rows, aligned with ids
    metadata: dict[str, dict]
    build_stamp: str

    def __len__(self) -> int:
        return len(self.ids)

    def vector_of(self, work_id: str) -> np.ndarray:
        i = self.ids.index(work_id)
        return self.vectors[i]


def _content_stamp(dim: int, ids, vectors: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(str(dim).encode())
    for i in ids:
        h.update(i.encode("utf-8"))
        h.update(b"\x00")
    h.update(np.ascontiguousarray(vectors, dtype=np.float64).tobytes())
    return h.hexdigest()


def build_index(items, embedder) -> RetrievalIndex:
    """Embed and normalize every (id, image_ref, metadata) item.

    All-or-nothing: any embedder failure surfaces as EmbedderFault and no
    partial index escapes. The build stamp is a digest of the content, so
    identical inputs produce identical indexes, timestamps excluded.
    """
    rows: dict[str, tuple[np.ndarray, dict]] = {}
    dim: int | None = None
    for item in items:
        item_id = item[0]
        if item_id in rows:
            raise DuplicateId(f"item id {item_id!r} appears twice")
        try:
            raw = np.asarray(embedder.embed_item(item), dtype=np.float64)
        except Exception as exc:
            raise EmbedderFault(item_id, exc) from exc
        if raw.ndim != 1:
            raise DimensionMismatch(f"item {item_id!r}: embedding must be 1-d")
        if dim is None:
            dim = int(raw.shape[0])
        elif raw.shape[0] != dim:
            raise DimensionMismatch(
                f"item {item_id!r}: dimension {raw.shape[0]} != {dim}"
            )
        metadata = item[2] if len(item) > 2 and isinstance(item[2], dict) else {}
        rows[item_id] = (normalize(raw), metadata)

    ids = tuple(sorted(rows))
    if dim is None:
        dim = 0
    vectors = (
        np.vstack([rows[i][0] for i in ids])
        if ids
        else np.zeros((0, dim), dtype=np.float64)
    )
    return RetrievalIndex(
        dim=dim,
        ids=ids,
        vectors=vectors,
        metadata={i: rows[i][1] for i in ids},
        build_stamp=_content_stamp(dim, ids, vectors),
    )


def search(index: RetrievalIndex, query_vec, k: int = 20) -> list[RankedResult]:
    """Exact top-k by cosine; ties by ascending id; ranks from 1."""
    if len(index) == 0:
        return []
    q = normalize(query_vec)
    if q.shape[0] != index.dim:
        raise DimensionMismatch(
            f"query dimension {q.shape[0]} != index dimension {index.dim}"
        )
    # one dot per row keeps scores bit-identical to a plain per-row oracle
    scores = [float(np.dot(index.vectors[i], q)) for i in range(len(index))]
    order = sorted(range(len(index)), key=lambda i: (-scores[i], index.ids[i]))
    top = order[: min(k, len(order))]
    return [
        RankedResult(work_id=index.ids[i], score=scores[i], rank=r)
        for r, i in enumerate(top, start=1)
    ]


def evaluate_recall(
    index: RetrievalIndex,
    pairs,
    embedder,
    ks=(1, 5, 10),
) -> RecallReport:
    """Fraction of (query_text, gt_id) pairs whose gt lands in the top k."""
    pairs = list(pairs)
    if not pairs:
        raise EmptyEvaluation("no evaluation pairs")
    ks = tuple(int(k) for k in ks)
    for _q, gt in pairs:
        if gt not in index.metadata:
            raise UnknownGroundTruth(f"ground truth {gt!r} is not indexed")
    kmax = max(ks)
    hits = {k: 0 for k in ks}
    for query_text, gt in pairs:
        results = search(index, embedder.embed_text(query_text), k=kmax)
        rank = next((r.rank for r in results if r.work_id == gt), None)
        if rank is not None:
            for k in ks:
                if rank <= k:
                    hits[k] += 1
    return RecallReport(
        ks=ks,
        recall_at={k: hits[k] / len(pairs) for k in ks},
        n_queries=len(pairs),
    )


def save_index(index: RetrievalIndex, path: str | Path):
    """Versioned text sidecar: ids in order, vectors as base64 float64."""
    doc = {
        "schema": INDEX_SCHEMA,
        "dim": index.dim,
        "build_stamp": index.build_stamp,
        "entries": [
            {
                "id": i,
                "vector": base64.b64encode(
                    np.ascontiguousarray(index.vectors[j], dtype=np.float64).tobytes()
                ).decode("ascii"),
                "metadata": index.metadata[i],
            }
            for j, i in enumerate(index.ids)
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def load_index(path: str | Path) -> RetrievalIndex:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read index file: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema") != INDEX_SCHEMA:
        raise SchemaError(f"index schema must be {INDEX_SCHEMA!r}")
    try:
        dim = int(doc["dim"])
        ids = []
        vecs = []
        meta = {}
        for e in doc["entries"]:
            ids.append(e["id"])
            buf = base64.b64decode(e["vector"])
            v = np.frombuffer(buf, dtype=np.float64)
            if v.shape[0] != dim:
                raise SchemaError(
                    f"entry {e['id']!r}: vector length {v.shape[0]} != dim {dim}"
                )
            vecs.append(v)
            meta[e["id"]] = e.get("metadata", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed index file: {exc!r}") from exc
    if list(ids) != sorted(ids):
        raise SchemaError("index entries must be ordered by ascending id")
    if len(set(ids)) != len(ids):
        raise DuplicateId("index contains a repeated id")
    vectors = (
        np.vstack(vecs) if ids else np.zeros((0, dim), dtype=np.float64)
    )
    stamp = _content_stamp(dim, tuple(ids), vectors)
    if stamp != doc.get("build_stamp"):
        raise SchemaError("index content does not match its build stamp")
    return RetrievalIndex(
        dim=dim,
        ids=tuple(ids),
        vectors=vectors,
        metadata=meta,
        build_stamp=stamp,
    )
