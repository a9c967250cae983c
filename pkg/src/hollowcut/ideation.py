"""Intent capture, few-shot prompt assembly, suggestion parsing, and the
editable idea description that seeds composition."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from .errors import EmptyIdea, EmptyTemplateCorpus, UnknownType
from .knowledge import KnowledgeBase, Suggestion, tokenize

DEFAULT_EXEMPLARS = 4

SYSTEM_PREAMBLE = (
    "You help plan monochrome Chinese paper-cutting designs. Given a design "
    "intent and factor choices, reply with two labeled blocks, OBJECTS: and "
    "PATTERNS:, one 'name - meaning' entry per line, drawing on the provided "
    "examples."
)


@dataclass(frozen=True)
class DesignIntent:
    intent_text: str = ""
    selections: dict[str, str] | None = None

    def __post_init__(self):
        object.__setattr__(self, "selections", dict(self.selections or {}))


def validate_intent(intent: DesignIntent, kb: KnowledgeBase):
    for factor, type_name in intent.selections.items():
        if not any(f.name == factor for f in kb.factor_taxonomy.factors):
            raise UnknownType(f"unknown factor {factor!r}")
        if not kb.factor_taxonomy.has_type(factor, type_name):
            raise UnknownType(f"factor {factor!r} has no type {type_name!r}")


@dataclass(frozen=True)
class PromptBundle:
    system_preamble: str
    exemplars: tuple[tuple[str, str], ...]
    user_block: str
    provider_hints: dict


@dataclass(frozen=True)
class SuggestionSet:
    objects: tuple[tuple[str, str], ...]
    patterns: tuple[tuple[str, str], ...]
    source: str  # "provider" or "fallback"


@dataclass(frozen=True)
class IdeaDescription:
    text: str
    accepted: tuple[str, ...]
    intent: DesignIntent


def build_ideation_prompt(
    intent: DesignIntent, kb: KnowledgeBase, exemplar_count: int = DEFAULT_EXEMPLARS
) -> PromptBundle:
    """Assemble the few-shot bundle for the text provider.

    Exemplars are the templates whose source works share the most selected
    factor types with the intent; ties go to the lower work id. The result
    depends only on the selections, the corpus, and the count.
    """
    validate_intent(intent, kb)
    if exemplar_count > 0 and not kb.templates:
        raise EmptyTemplateCorpus("no prompt templates in the corpus")

    def shared(work_id: str) -> int:
        try:
            amap = kb.work(work_id).assignment_map()
        except KeyError:
            return 0
        return sum(
            1
            for factor, type_name in intent.selections.items()
            if factor in amap and amap[factor].type_name == type_name
        )

    ranked = sorted(
        kb.templates, key=lambda t: (-shared(t.work_id), t.work_id, t.question)
    )
    exemplars = tuple((t.question, t.answer) for t in ranked[:exemplar_count])

    lines = [f"Intent: {intent.intent_text}"]
    for factor in sorted(intent.selections):
        lines.append(f"{factor}: {intent.selections[factor]}")
    return PromptBundle(
        system_preamble=SYSTEM_PREAMBLE,
        exemplars=exemplars,
        user_block="\n".join(lines),
        provider_hints={
            "keywords": sorted(tokenize(intent.intent_text)),
            "selections": dict(intent.selections),
        },
    )


_ITEM_RE = re.compile(r"^\s*(?:[-*•]|\d+[.)])?\s*(.+?)\s+[-–—:]\s+(.+?)\s*$")
_HEADER_RE = re.compile(r"^\s*(OBJECTS|PATTERNS)\s*:?\s*$", re.IGNORECASE)


def parse_suggestions(reply: str) -> tuple[list, list] | None:
    """Parse OBJECTS:/PATTERNS: blocks of 'name - meaning' lines.

    Returns (objects, patterns) or None when the reply carries no usable
    block structure at all.
    """
    objects: list[tuple[str, str]] = []
    patterns: list[tuple[str, str]] = []
    bucket = None
    saw_header = False
    for line in reply.splitlines():
        header = _HEADER_RE.match(line)
        if header:
            saw_header = True
            bucket = objects if header.group(1).upper() == "OBJECTS" else patterns
            continue
        if bucket is None or not line.strip():
            continue
        m = _ITEM_RE.match(line)
        if m:
            bucket.append((m.group(1), m.group(2)))
    if not saw_header or (not objects and not patterns):
        return None
    return objects, patterns


def _fallback_set(bundle: PromptBundle, kb: KnowledgeBase) -> SuggestionSet:
    hints = bundle.provider_hints
    ranked: list[Suggestion] = kb.suggest(
        hints.get("keywords", []), hints.get("selections", {})
    )
    objects = tuple((s.name, s.interpretation.meaning) for s in ranked if s.kind == "object")
    patterns = tuple((s.name, s.interpretation.meaning) for s in ranked if s.kind == "pattern")
    return SuggestionSet(objects=objects, patterns=patterns, source="fallback")


def request_suggestions(bundle: PromptBundle, gateway, kb: KnowledgeBase) -> SuggestionSet:
    """Provider suggestions when reachable and parseable, corpus fallback
    otherwise. Never raises for provider trouble; faults end up in the
    gateway's log."""
    try:
        reply = gateway.suggest_text(bundle)
    except Exception as exc:
        gateway.fault_log.append(f"text provider failed: {exc}")
        return _fallback_set(bundle, kb)
    parsed = parse_suggestions(reply)
    if parsed is None:
        gateway.fault_log.append("text reply had no OBJECTS/PATTERNS blocks")
        return _fallback_set(bundle, kb)
    objects, patterns = parsed
    return SuggestionSet(objects=tuple(objects), patterns=tuple(patterns), source="provider")


def compose_idea(intent: DesignIntent, accepted) -> IdeaDescription:
    """Deterministic sentence template over the selections and accepted names.

    Slots missing from the intent are dropped rather than filled with
    placeholders; every accepted name appears exactly once.
    """
    accepted = tuple(accepted)
    if not accepted and not intent.intent_text.strip():
        raise EmptyIdea("nothing accepted and no intent text")
    sel = intent.selections
    parts = []
    style = sel.get("Style")
    parts.append(f"{style} paper-cutting image" if style else "paper-cutting image")
    if accepted:
        parts.append(" and ".join(accepted))
    expressing = [sel[f] for f in ("Subject Matter", "Method of Expression") if f in sel]
    if expressing:
        parts.append("expressing " + " and ".join(expressing))
    if "Function" in sel:
        parts.append(f"for {sel['Function']}")
    return IdeaDescription(text=", ".join(parts), accepted=accepted, intent=intent)


def edit_idea(idea: IdeaDescription, new_text: str) -> IdeaDescription:
    """Replace the text; acceptance and intent provenance stay put."""
    return replace(idea, text=new_text)
