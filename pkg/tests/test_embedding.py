"""Mock embedders: determinism, normalization, and designed-in behaviors."""

import numpy as np
from hypothesis import given, strategies as st

from hollowcut.embedding import (
    DEFAULT_DIM,
    AdversarialEmbedder,
    IdentityPairEmbedder,
    TokenHashEmbedder,
)


def test_token_hash_unit_norm_and_determinism():
    e = TokenHashEmbedder()
    v1 = e.embed_text("magpie on a plum branch")
    v2 = TokenHashEmbedder().embed_text("magpie on a plum branch")
    assert v1.shape == (DEFAULT_DIM,)
    assert np.array_equal(v1, v2)
    assert abs(np.linalg.norm(v1) - 1.0) < 1e-12


def test_token_hash_order_and_multiplicity_blind():
    e = TokenHashEmbedder()
    a = e.embed_text("plum magpie")
    b = e.embed_text("magpie plum magpie MAGPIE")
    assert np.array_equal(a, b)


def test_token_hash_distinguishes_token_sets():
    e = TokenHashEmbedder()
    a = e.embed_text("magpie plum")
    b = e.embed_text("magpie peony")
    assert not np.array_equal(a, b)


def test_token_hash_total_on_tokenless_text():
    # punctuation-only input folds to a sentinel token, keeping the mock total
    e = TokenHashEmbedder()
    a = e.embed_text("...!!!")
    b = e.embed_text("")
    assert np.array_equal(a, b)
    assert abs(np.linalg.norm(a) - 1.0) < 1e-12


@given(st.text(alphabet=st.characters(whitelist_categories=("Ll", "Lu", "Nd", "Zs")), min_size=0, max_size=40))
def test_token_hash_total_over_arbitrary_text(text):
    v = TokenHashEmbedder().embed_text(text)
    assert np.isfinite(v).all()
    assert abs(np.linalg.norm(v) - 1.0) < 1e-9


def test_embed_item_prefers_metadata_text():
    e = TokenHashEmbedder()
    via_item = e.embed_item(("w1", "ref", {"text": "magpie plum"}))
    assert np.array_equal(via_item, e.embed_text("magpie plum"))
    fallback = e.embed_item(("w1", "ref", {}))
    assert np.array_equal(fallback, e.embed_text("w1"))


def test_identity_embedder_maps_query_to_item_vector():
    e = IdentityPairEmbedder()
    assert np.array_equal(e.embed_text("w007"), e.embed_item(("w007", "", {})))


def test_adversarial_embedder_geometry():
    ids = [f"w{i}" for i in range(10)]
    e = AdversarialEmbedder(ids)
    assert e.dim == 10
    # items are orthonormal basis vectors, queries the uniform diagonal
    vecs = [e.embed_item((i, "", {})) for i in sorted(ids)]
    for i, v in enumerate(vecs):
        assert v[i] == 1.0 and np.count_nonzero(v) == 1
    q = e.embed_text("anything")
    scores = {np.dot(q, v) for v in vecs}
    assert len(scores) == 1
