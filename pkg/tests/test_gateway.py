"""Provider gateway: caching, retry policy, and the segmentation fallback."""

import base64
import hashlib
import json
from types import SimpleNamespace

import httpx
import numpy as np
import pytest

from hollowcut.embedding import TokenHashEmbedder
from hollowcut.errors import (
    EmptyIdea,
    OfflineMiss,
    PointOnOppositeClass,
    ProviderError,
    SegmentationFailed,
    Timeout,
)
from hollowcut.gateway import (
    STYLE_CLAUSE,
    Gateway,
    GenerationRequest,
    ProviderConfig,
    build_generation_prompt,
    cache_key,
    canonical_payload,
)
from hollowcut.patterns import segment_by_points

from conftest import png_b64


def bundle(user="draw a fish"):
    return SimpleNamespace(
        system_preamble="sys", exemplars=[("q1", "a1"), ("q2", "a2")], user_block=user
    )


def text_gateway(tmp_path, handler, **cfg_kw):
    cfg = ProviderConfig(
        kind="text", endpoint="https://text.test/v1", cache_dir=tmp_path, **cfg_kw
    )
    sleeps = []
    gw = Gateway(
        {"text": cfg},
        transport=httpx.MockTransport(handler),
        sleep=sleeps.append,
    )
    return gw, sleeps


def test_config_validation():
    with pytest.raises(ValueError):
        ProviderConfig(kind="video")
    with pytest.raises(ValueError):
        ProviderConfig(kind="text", timeout=0)
    with pytest.raises(ValueError):
        ProviderConfig(kind="text", max_retries=-1)


def test_config_from_env_mapping(tmp_path):
    env = {
        "HC_TEXT_ENDPOINT": "https://example.test/t",
        "HC_OFFLINE": "1",
        "HC_CACHE_DIR": str(tmp_path),
    }
    cfg = ProviderConfig.from_env("text", env=env)
    assert cfg.endpoint == "https://example.test/t"
    assert cfg.offline is True
    assert cfg.cache_dir == tmp_path
    assert ProviderConfig.from_env("embed", env={}).offline is False


def test_cache_key_is_order_insensitive():
    a = cache_key("text", {"b": 1, "a": [2, 3]})
    b = cache_key("text", {"a": [2, 3], "b": 1})
    assert a == b
    assert len(a) == 64 and set(a) <= set("0123456789abcdef")
    assert cache_key("embed", {"b": 1, "a": [2, 3]}) != a
    assert cache_key("text", {"b": 1, "a": [2, 4]}) != a
    assert canonical_payload({"b": 1, "a": 2}) == '{"a":2,"b":1}'


def test_generation_prompt_shape():
    p = build_generation_prompt(SimpleNamespace(text=" a crane over waves "))
    assert p == f"{STYLE_CLAUSE}. a crane over waves"
    with_suffix = build_generation_prompt("a crane", user_suffix=" red accents ")
    assert with_suffix == f"{STYLE_CLAUSE}. a crane, red accents"
    with pytest.raises(EmptyIdea):
        build_generation_prompt("   ")
    with pytest.raises(EmptyIdea):
        build_generation_prompt(SimpleNamespace(text=""))


def test_generation_request_bounds():
    assert GenerationRequest("p").count == 4
    with pytest.raises(ValueError):
        GenerationRequest("p", count=0)
    with pytest.raises(ValueError):
        GenerationRequest("p", count=9)
    with pytest.raises(ValueError):
        GenerationRequest("p", size=(0, 64))


def test_retry_backoff_schedule(tmp_path):
    calls = []

    def handler(request):
        calls.append(1)
        if len(calls) < 3:
            return httpx.Response(500, text="busy")
        return httpx.Response(200, json={"reply": "ok"})

    gw, sleeps = text_gateway(tmp_path, handler)
    assert gw.suggest_text(bundle()) == "ok"
    assert len(calls) == 3
    # jitterless exponential: base, then doubled
    assert sleeps == [0.25, 0.5]
    gw.close()


def test_server_errors_exhaust_retries(tmp_path):
    calls = []

    def handler(request):
        calls.append(1)
        return httpx.Response(503, text="down")

    gw, sleeps = text_gateway(tmp_path, handler, max_retries=1)
    with pytest.raises(ProviderError) as exc:
        gw.suggest_text(bundle())
    assert exc.value.status == 503
    assert len(calls) == 2
    assert sleeps == [0.25]
    gw.close()


def test_client_error_not_retried(tmp_path):
    calls = []

    def handler(request):
        calls.append(1)
        return httpx.Response(404, text="no such route")

    gw, sleeps = text_gateway(tmp_path, handler)
    with pytest.raises(ProviderError) as exc:
        gw.suggest_text(bundle())
    assert exc.value.status == 404
    assert len(calls) == 1 and sleeps == []
    gw.close()


def test_timeouts_retry_then_surface(tmp_path):
    calls = []

    def handler(request):
        calls.append(1)
        raise httpx.ReadTimeout("slow provider")

    gw, _ = text_gateway(tmp_path, handler, max_retries=1)
    with pytest.raises(Timeout):
        gw.suggest_text(bundle())
    assert len(calls) == 2
    gw.close()


def test_malformed_replies_rejected(tmp_path):
    gw, _ = text_gateway(tmp_path, lambda r: httpx.Response(200, text="not json"))
    with pytest.raises(ProviderError):
        gw.suggest_text(bundle())
    gw.close()

    gw2, _ = text_gateway(tmp_path, lambda r: httpx.Response(200, json={"nope": 1}))
    with pytest.raises(ProviderError):
        gw2.suggest_text(bundle())
    gw2.close()


def test_cache_replays_without_network(tmp_path):
    calls = []

    def handler(request):
        calls.append(1)
        return httpx.Response(200, json={"reply": f"r{len(calls)}"})

    gw, _ = text_gateway(tmp_path, handler)
    assert gw.suggest_text(bundle()) == "r1"
    assert gw.suggest_text(bundle()) == "r1"
    assert len(calls) == 1
    gw.close()

    # a second gateway over the same cache dir replays offline
    off = Gateway(
        {"text": ProviderConfig(kind="text", offline=True, cache_dir=tmp_path)},
        sleep=lambda s: None,
    )
    assert off.suggest_text(bundle()) == "r1"
    with pytest.raises(OfflineMiss):
        off.suggest_text(bundle(user="something never asked"))
    off.close()


def test_credential_header(tmp_path, monkeypatch):
    seen = {}

    def handler(request):
        seen["auth"] = request.headers.get("Authorization")
        return httpx.Response(200, json={"reply": "ok"})

    monkeypatch.setenv("HC_TEST_KEY", "sekrit")
    gw, _ = text_gateway(tmp_path, handler, credential_ref="HC_TEST_KEY")
    gw.suggest_text(bundle())
    assert seen["auth"] == "Bearer sekrit"
    gw.close()

    monkeypatch.delenv("HC_TEST_KEY")
    gw2, _ = text_gateway(tmp_path, handler, credential_ref="HC_TEST_KEY")
    gw2.suggest_text(bundle(user="again"))
    assert seen["auth"] is None
    gw2.close()


def test_generated_blobs_content_addressed(tmp_path):
    mask = np.zeros((16, 16), dtype=bool)
    mask[4:12, 4:12] = True
    b64 = png_b64(mask)
    raw = base64.b64decode(b64)
    calls = []

    def handler(request):
        calls.append(1)
        return httpx.Response(200, json={"images": [b64, b64]})

    cfg = ProviderConfig(kind="generate", endpoint="https://gen.test/v1", cache_dir=tmp_path)
    gw = Gateway({"generate": cfg}, transport=httpx.MockTransport(handler), sleep=lambda s: None)
    paths = gw.generate_images(GenerationRequest("a square", count=2, size=(16, 16)))
    assert len(paths) == 2
    digest = hashlib.sha256(raw).hexdigest()
    for p in paths:
        assert p.endswith(f"{digest}.png")
        with open(p, "rb") as fh:
            assert fh.read() == raw
    again = gw.generate_images(GenerationRequest("a square", count=2, size=(16, 16)))
    assert again == paths
    assert len(calls) == 1
    gw.close()


def test_embed_routes(tmp_path):
    off = Gateway(
        {"embed": ProviderConfig(kind="embed", offline=True, cache_dir=tmp_path)},
        sleep=lambda s: None,
    )
    vec = off.embed("crane")
    assert np.array_equal(vec, np.asarray(TokenHashEmbedder().embed_text("crane")))
    off.close()

    def handler(request):
        assert json.loads(request.content)["input"] == "crane"
        return httpx.Response(200, json={"vector": [0.5, 1.5, -2.0]})

    cfg = ProviderConfig(kind="embed", endpoint="https://emb.test/v1", cache_dir=tmp_path)
    gw = Gateway({"embed": cfg}, transport=httpx.MockTransport(handler), sleep=lambda s: None)
    assert np.array_equal(gw.embed("crane"), np.array([0.5, 1.5, -2.0]))
    gw.close()

    bad = Gateway(
        {"embed": ProviderConfig(kind="embed", endpoint="https://emb.test/v1", cache_dir=tmp_path / "b")},
        transport=httpx.MockTransport(lambda r: httpx.Response(200, json={"rows": []})),
        sleep=lambda s: None,
    )
    with pytest.raises(ProviderError):
        bad.embed("other")
    bad.close()


def seg_image():
    img = np.zeros((40, 60), dtype=bool)
    img[5:20, 5:25] = True
    img[22:36, 30:55] = True
    return img


def seg_gateway(tmp_path, handler, **cfg_kw):
    cfg = ProviderConfig(
        kind="segment", endpoint="https://seg.test/v1", cache_dir=tmp_path, **cfg_kw
    )
    transport = httpx.MockTransport(handler) if handler else None
    return Gateway({"segment": cfg}, transport=transport, sleep=lambda s: None)


def test_segment_provider_route(tmp_path):
    img = seg_image()
    provider_mask = img & (np.arange(60)[None, :] < 30)

    def handler(request):
        return httpx.Response(200, json={"mask": png_b64(provider_mask)})

    gw = seg_gateway(tmp_path, handler)
    mask, source = gw.segment(img, [(10, 10)], [(40, 30)])
    assert source == "provider"
    assert np.array_equal(mask, provider_mask)
    assert gw.fault_log == []
    gw.close()


def test_provider_mask_violating_points_discarded(tmp_path):
    img = seg_image()
    bogus = np.zeros_like(img)  # misses every fg point

    def handler(request):
        return httpx.Response(200, json={"mask": png_b64(bogus)})

    gw = seg_gateway(tmp_path, handler)
    mask, source = gw.segment(img, [(10, 10)])
    assert source == "fallback"
    assert np.array_equal(mask, segment_by_points(img, [(10, 10)]))
    assert len(gw.fault_log) == 1
    gw.close()


def test_provider_mask_shape_mismatch_discarded(tmp_path):
    img = seg_image()
    wrong = np.ones((8, 8), dtype=bool)

    gw = seg_gateway(tmp_path, lambda r: httpx.Response(200, json={"mask": png_b64(wrong)}))
    mask, source = gw.segment(img, [(10, 10)])
    assert source == "fallback"
    assert np.array_equal(mask, segment_by_points(img, [(10, 10)]))
    gw.close()


def test_provider_faults_never_surface(tmp_path):
    img = seg_image()
    rng = np.random.default_rng(7)
    fg_pool = np.argwhere(img)

    def handler(request):
        raise httpx.ConnectError("refused")

    gw = seg_gateway(tmp_path, handler, max_retries=0)
    for _ in range(25):
        y, x = fg_pool[rng.integers(len(fg_pool))]
        mask, source = gw.segment(img, [(int(x), int(y))])
        assert source == "fallback"
        assert mask[y, x]
    assert len(gw.fault_log) == 25
    gw.close()


def test_segment_offline_uses_fallback(tmp_path):
    img = seg_image()
    gw = Gateway(
        {"segment": ProviderConfig(kind="segment", offline=True, cache_dir=tmp_path)},
        sleep=lambda s: None,
    )
    mask, source = gw.segment(img, [(10, 10)])
    assert source == "fallback"
    assert np.array_equal(mask, segment_by_points(img, [(10, 10)]))
    assert any("OfflineMiss" in line or "offline" in line for line in gw.fault_log)
    gw.close()


def test_segment_both_routes_failing_raises(tmp_path):
    img = seg_image()
    gw = seg_gateway(tmp_path, lambda r: httpx.Response(500, text="down"), max_retries=0)
    with pytest.raises(SegmentationFailed) as exc:
        gw.segment(img, [(0, 0)])  # background point, fallback rejects too
    assert isinstance(exc.value.cause, PointOnOppositeClass)
    gw.close()
