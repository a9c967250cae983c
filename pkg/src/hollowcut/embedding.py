"""Deterministic embedders used offline and under test.

A provider-backed embedder plugs in through the same two-method protocol:
``embed_text(text)`` and ``embed_item((id, image_ref, metadata))``, both
returning a fixed-dimension float vector. Everything here is seeded hashing,
no model weights, so results are identical across runs and platforms.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .knowledge import tokenize

DEFAULT_DIM = 64


def _seeded_vector(token: str, dim: int) -> np.ndarray:
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    seed = int.from_bytes(digest[:8], "big")
    rng = np.random.default_rng(seed)
    return rng.standard_normal(dim)


class TokenHashEmbedder:
    """Sums a seeded pseudo-random vector per distinct lowercased token.

    Shared tokens pull texts together, so nearest-neighbor behavior is
    sensible enough for demos while staying fully deterministic.
    """

    def __init__(self, dim: int = DEFAULT_DIM):
        self.dim = dim

    def _embed(self, text: str) -> np.ndarray:
        tokens = sorted(tokenize(text))
        if not tokens:
            tokens = ["<empty>"]
        acc = np.zeros(self.dim, dtype=np.float64)
        for t in tokens:
            acc += _seeded_vector(t, self.dim)
        norm = float(np.linalg.norm(acc))
        if norm < 1e-12:
            # vanishing sums cannot occur with one token; guard the pathologic mix
            acc = _seeded_vector("<degenerate>", self.dim)
            norm = float(np.linalg.norm(acc))
        return acc / norm

    def embed_text(self, text: str) -> np.ndarray:
        return self._embed(text)

    def embed_item(self, item) -> np.ndarray:
        item_id, _image_ref, metadata = item
        text = metadata.get("text") if isinstance(metadata, dict) else None
        return self._embed(text if text else str(item_id))


class IdentityPairEmbedder:
    """Maps a query to the exact vector of the item whose id equals the query.

    With evaluation pairs of the form (gt_id, gt_id) every query scores 1.0
    against its ground truth, which pins recall at 1.0 for all k.
    """

    def __init__(self, dim: int = DEFAULT_DIM):
        self._inner = TokenHashEmbedder(dim)
        self.dim = dim

    def embed_text(self, text: str) -> np.ndarray:
        return self._inner._embed(str(text))

    def embed_item(self, item) -> np.ndarray:
        item_id, _image_ref, _metadata = item
        return self._inner._embed(str(item_id))


class AdversarialEmbedder:
    """Worst-case mock: every query collapses to one fixed direction.

    Items get distinct basis vectors (by ascending id), queries all map to
    the uniform diagonal, so every stored item ties on cosine and ranking
    falls entirely to the tie rule. With n distinct ground truths exactly one
    query can hit at rank 1.
    """

    def __init__(self, ids):
        self._order = {item_id: i for i, item_id in enumerate(sorted(ids))}
        self.dim = len(self._order)

    def embed_item(self, item) -> np.ndarray:
        item_id, _image_ref, _metadata = item
        v = np.zeros(self.dim, dtype=np.float64)
        v[self._order[item_id]] = 1.0
        return v

    def embed_text(self, text: str) -> np.ndarray:
        return np.full(self.dim, 1.0 / np.sqrt(self.dim), dtype=np.float64)
