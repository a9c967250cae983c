"""Intent validation, few-shot prompt assembly, suggestion parsing, and
idea composition."""

import dataclasses
from types import SimpleNamespace

import pytest

from hollowcut.datasets import reference_dir
from hollowcut.errors import EmptyIdea, EmptyTemplateCorpus, UnknownType
from hollowcut.ideation import (
    SYSTEM_PREAMBLE,
    DesignIntent,
    IdeaDescription,
    build_ideation_prompt,
    compose_idea,
    edit_idea,
    parse_suggestions,
    request_suggestions,
    validate_intent,
)
from hollowcut.knowledge import load_corpus, tokenize


@pytest.fixture(scope="module")
def kb():
    return load_corpus(reference_dir())


FESTIVE = {
    "Function": "Festive Atmosphere Evoking",
    "Subject Matter": "Flora and Fauna",
    "Style": "Abstract",
    "Method of Expression": "Symbolism",
}


def test_intent_validation(kb):
    validate_intent(DesignIntent("x", FESTIVE), kb)
    with pytest.raises(UnknownType):
        validate_intent(DesignIntent("x", {"Era": "Modern"}), kb)
    with pytest.raises(UnknownType):
        validate_intent(DesignIntent("x", {"Style": "Cubist"}), kb)


def test_prompt_bundle_layout(kb):
    intent = DesignIntent("a bird for the window", dict(FESTIVE))
    bundle = build_ideation_prompt(intent, kb, exemplar_count=3)
    assert bundle.system_preamble == SYSTEM_PREAMBLE
    assert len(bundle.exemplars) == 3
    lines = bundle.user_block.splitlines()
    assert lines[0] == "Intent: a bird for the window"
    # one line per selected factor, factor-name sorted
    assert lines[1:] == [f"{f}: {FESTIVE[f]}" for f in sorted(FESTIVE)]
    assert bundle.provider_hints["keywords"] == sorted(tokenize("a bird for the window"))
    assert bundle.provider_hints["selections"] == FESTIVE


def test_exemplar_ranking_matches_oracle(kb):
    intent = DesignIntent("spring", dict(FESTIVE))

    def overlap(t):
        amap = kb.work(t.work_id).assignment_map()
        return sum(
            1
            for factor, type_name in intent.selections.items()
            if factor in amap and amap[factor].type_name == type_name
        )

    oracle = sorted(kb.templates, key=lambda t: (-overlap(t), t.work_id, t.question))
    bundle = build_ideation_prompt(intent, kb, exemplar_count=5)
    assert bundle.exemplars == tuple((t.question, t.answer) for t in oracle[:5])
    # w001 shares all four selected types, so its template must lead
    assert oracle[0].work_id == "w001"


def test_exemplar_count_edges(kb):
    intent = DesignIntent("x", {})
    everything = build_ideation_prompt(intent, kb, exemplar_count=999)
    assert len(everything.exemplars) == len(kb.templates)
    none = build_ideation_prompt(intent, kb, exemplar_count=0)
    assert none.exemplars == ()


def test_empty_template_corpus_raises(kb):
    bare = dataclasses.replace(kb, templates=())
    with pytest.raises(EmptyTemplateCorpus):
        build_ideation_prompt(DesignIntent("x", {}), bare, exemplar_count=2)
    # zero exemplars requested: the gap is irrelevant
    assert build_ideation_prompt(DesignIntent("x", {}), bare, exemplar_count=0).exemplars == ()


def test_parse_canonical_blocks():
    reply = (
        "OBJECTS:\n"
        "magpie - herald of joy\n"
        "plum blossom - spring endurance\n"
        "PATTERNS:\n"
        "crescent - feather and brow lines\n"
    )
    objects, patterns = parse_suggestions(reply)
    assert objects == [("magpie", "herald of joy"), ("plum blossom", "spring endurance")]
    assert patterns == [("crescent", "feather and brow lines")]


def test_parse_tolerates_list_markup():
    reply = (
        "Here are some ideas.\n"
        "objects\n"
        "- magpie — herald of joy\n"
        "2) carp : abundance\n"
        "* lotus  –  purity\n"
        "\n"
        "Patterns:\n"
        "1. sawtooth - fur texture\n"
        "not an item line\n"
    )
    objects, patterns = parse_suggestions(reply)
    assert objects == [("magpie", "herald of joy"), ("carp", "abundance"), ("lotus", "purity")]
    assert patterns == [("sawtooth", "fur texture")]


def test_parse_rejects_unusable_replies():
    assert parse_suggestions("no structure at all") is None
    assert parse_suggestions("") is None
    # headers with nothing parseable under them
    assert parse_suggestions("OBJECTS:\n\nPATTERNS:\n") is None


def test_hyphenated_names_survive():
    objects, patterns = parse_suggestions("OBJECTS:\nred-crowned crane - longevity\n")
    assert objects == [("red-crowned crane", "longevity")]
    assert patterns == []


def fake_gateway(reply=None, exc=None):
    def suggest_text(bundle):
        if exc is not None:
            raise exc
        return reply

    return SimpleNamespace(suggest_text=suggest_text, fault_log=[])


def test_provider_suggestions_pass_through(kb):
    bundle = build_ideation_prompt(DesignIntent("bird", dict(FESTIVE)), kb)
    gw = fake_gateway(reply="OBJECTS:\nmagpie - joy\nPATTERNS:\ncrescent - feathers\n")
    got = request_suggestions(bundle, gw, kb)
    assert got.source == "provider"
    assert got.objects == (("magpie", "joy"),)
    assert got.patterns == (("crescent", "feathers"),)
    assert gw.fault_log == []


def test_provider_failure_falls_back_to_corpus(kb):
    intent = DesignIntent("magpie and plum for a festive window", dict(FESTIVE))
    bundle = build_ideation_prompt(intent, kb)
    gw = fake_gateway(exc=RuntimeError("socket down"))
    got = request_suggestions(bundle, gw, kb)
    assert got.source == "fallback"
    assert len(gw.fault_log) == 1

    ranked = kb.suggest(bundle.provider_hints["keywords"], bundle.provider_hints["selections"])
    assert got.objects == tuple(
        (s.name, s.interpretation.meaning) for s in ranked if s.kind == "object"
    )
    assert got.patterns == tuple(
        (s.name, s.interpretation.meaning) for s in ranked if s.kind == "pattern"
    )
    assert got.objects and got.patterns


def test_unparseable_reply_falls_back(kb):
    bundle = build_ideation_prompt(DesignIntent("bird", dict(FESTIVE)), kb)
    gw = fake_gateway(reply="I would simply suggest nice things.")
    got = request_suggestions(bundle, gw, kb)
    assert got.source == "fallback"
    assert any("OBJECTS" in line for line in gw.fault_log)


def test_compose_idea_full_slots():
    intent = DesignIntent("festive window", dict(FESTIVE))
    idea = compose_idea(intent, ["magpie", "plum blossom"])
    assert idea.text == (
        "Abstract paper-cutting image, magpie and plum blossom, "
        "expressing Flora and Fauna and Symbolism, "
        "for Festive Atmosphere Evoking"
    )
    assert idea.accepted == ("magpie", "plum blossom")
    assert idea.intent == intent


def test_compose_idea_partial_slots():
    idea = compose_idea(DesignIntent("", {"Function": "Daily Decoration"}), ["carp"])
    assert idea.text == "paper-cutting image, carp, for Daily Decoration"
    sparse = compose_idea(DesignIntent("just a note", {}), [])
    assert sparse.text == "paper-cutting image"


def test_compose_idea_requires_content():
    with pytest.raises(EmptyIdea):
        compose_idea(DesignIntent("   ", {}), [])


def test_edit_idea_keeps_provenance():
    intent = DesignIntent("x", {"Style": "Realistic"})
    idea = compose_idea(intent, ["crane"])
    edited = edit_idea(idea, "a crane wading at dawn")
    assert edited == IdeaDescription(
        text="a crane wading at dawn", accepted=("crane",), intent=intent
    )
