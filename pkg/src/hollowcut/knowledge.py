"""Corpus loading and the deterministic suggestion engine.

The knowledge base is immutable after load. Reloading builds a fresh
instance; callers swap the reference atomically.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    DuplicateId,
    EmptyCorpus,
    SchemaError,
    UnknownPattern,
    UnknownType,
)
from .taxonomy import (
    FACTOR_NAMES,
    FactorAssignment,
    FactorTaxonomy,
    FactorType,
    IdeationFactor,
    LexiconEntry,
    PatternInterpretation,
    PatternTaxonomy,
    WorkAnnotation,
    validate_annotation,
)

TAXONOMY_SCHEMA = "hollowcut/taxonomy@1"
WORKS_SCHEMA = "hollowcut/works@1"
TEMPLATES_SCHEMA = "hollowcut/templates@1"

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> set[str]:
    """Lowercased alphanumeric tokens; punctuation discarded, no stemming."""
    return set(_TOKEN_RE.findall(text.lower()))


@dataclass(frozen=True)
class PromptTemplate:
    work_id: str
    question: str
    answer: str


@dataclass(frozen=True)
class Suggestion:
    kind: str  # "object" or "pattern"
    name: str
    interpretation: PatternInterpretation
    score: int


@dataclass(frozen=True)
class KnowledgeBase:
    factor_taxonomy: FactorTaxonomy
    pattern_taxonomy: PatternTaxonomy
    regions: tuple[str, ...]
    interpretations: dict[str, PatternInterpretation]
    works: tuple[WorkAnnotation, ...]
    templates: tuple[PromptTemplate, ...]

    def work(self, work_id: str) -> WorkAnnotation:
        for w in self.works:
            if w.work_id == work_id:
                return w
        raise KeyError(work_id)

    def interpretation_of(self, pattern_name: str) -> PatternInterpretation:
        try:
            return self.interpretations[pattern_name]
        except KeyError:
            raise UnknownPattern(f"no lexicon pattern named {pattern_name!r}") from None

    def region_distribution(self) -> dict[str, int]:
        out = {r: 0 for r in self.regions}
        for w in self.works:
            out[w.region] += 1
        return out

    def suggest(
        self,
        intent_keywords: list[str] | tuple[str, ...] = (),
        selections: dict[str, str] | None = None,
    ) -> list[Suggestion]:
        """Rank every lexicon pattern for the given intent.

        A work scores (number of its factor assignments matching the
        selections) + (number of distinct keywords found in its explanation
        text). Each lexicon entry takes the best score among works that list
        it; entries no work lists score 0. Descending score, ties by name.
        """
        selections = selections or {}
        for factor, type_name in selections.items():
            if factor not in FACTOR_NAMES:
                raise UnknownType(f"unknown factor {factor!r}")
            if not self.factor_taxonomy.has_type(factor, type_name):
                raise UnknownType(f"factor {factor!r} has no type {type_name!r}")
        if not self.works:
            raise EmptyCorpus("suggestion needs at least one annotated work")

        keywords = set()
        for kw in intent_keywords:
            keywords |= tokenize(kw)

        work_scores: dict[str, int] = {}
        for w in self.works:
            amap = w.assignment_map()
            matched = sum(
                1
                for factor, type_name in selections.items()
                if factor in amap and amap[factor].type_name == type_name
            )
            text_tokens = set()
            for a in w.assignments:
                text_tokens |= tokenize(a.explanation)
            work_scores[w.work_id] = matched + len(keywords & text_tokens)

        best: dict[str, int] = {}
        for w in self.works:
            s = work_scores[w.work_id]
            for name in w.composite_patterns:
                if s > best.get(name, -1):
                    best[name] = s

        out = []
        for entry in self.pattern_taxonomy.entries:
            score = best.get(entry.name, 0)
            kind = "object" if entry.subcategory == "Primary Composite" else "pattern"
            out.append(
                Suggestion(kind, entry.name, self.interpretations[entry.name], score)
            )
        out.sort(key=lambda s: (-s.score, s.name))
        return out


def _require(cond: bool, msg: str):
    if not cond:
        raise SchemaError(msg)


def _no_dup_pairs(pairs):
    d = {}
    for k, v in pairs:
        if k in d:
            raise SchemaError(f"duplicate key {k!r} in record")
        d[k] = v
    return d


def _parse_taxonomy(path: Path) -> tuple[FactorTaxonomy, PatternTaxonomy, tuple, dict]:
    try:
        raw = json.loads(path.read_text(), object_pairs_hook=_no_dup_pairs)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read taxonomy file: {exc}") from exc
    _require(isinstance(raw, dict), "taxonomy root must be an object")
    _require(raw.get("schema") == TAXONOMY_SCHEMA,
             f"taxonomy schema must be {TAXONOMY_SCHEMA!r}")
    try:
        factors = tuple(
            IdeationFactor(
                name=f["name"],
                subcategories=tuple(f["subcategories"]),
                types=tuple(
                    FactorType(
                        name=t["name"],
                        subcategory=t["subcategory"],
                        definition=t["definition"],
                        example_work_id=t.get("example_work_id"),
                    )
                    for t in f["types"]
                ),
            )
            for f in raw["factors"]
        )
        ft = FactorTaxonomy(factors)
        regions = tuple(raw["regions"])
        lex = raw["pattern_lexicon"]
        entries = tuple(
            LexiconEntry(
                name=e["name"],
                subcategory=e["subcategory"],
                interpretation_id=e["interpretation_id"],
                source=e.get("source", "supplied"),
            )
            for e in lex["entries"]
        )
        pt = PatternTaxonomy(tuple(lex["categories"]), entries)
        interps = {}
        for name, rec in raw["interpretations"].items():
            interps[name] = PatternInterpretation(
                pattern_name=name,
                meaning=rec["meaning"],
                structure_notes=rec["structure_notes"],
                common_combinations=tuple(rec.get("common_combinations", ())),
            )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed taxonomy record: {exc!r}") from exc

    lexicon_names = set(pt.names())
    for e in pt.entries:
        _require(e.interpretation_id in interps,
                 f"lexicon entry {e.name!r}: missing interpretation {e.interpretation_id!r}")
    for name, rec in interps.items():
        for c in rec.common_combinations:
            _require(c in lexicon_names,
                     f"interpretation {name!r}: combination {c!r} is not a lexicon name")
    return ft, pt, regions, interps


def _read_jsonl(path: Path, schema: str):
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise SchemaError(f"cannot read {path.name}: {exc}") from exc
    _require(len(lines) >= 1, f"{path.name}: missing schema header line")
    try:
        header = json.loads(lines[0], object_pairs_hook=_no_dup_pairs)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path.name}: bad header: {exc}") from exc
    _require(isinstance(header, dict) and header.get("schema") == schema,
             f"{path.name}: first line must declare schema {schema!r}")
    out = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            out.append(json.loads(line, object_pairs_hook=_no_dup_pairs))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path.name}:{i}: bad record: {exc}") from exc
    return out


def _parse_work(rec: dict) -> WorkAnnotation:
    try:
        assignments = tuple(
            FactorAssignment(
                factor=a["factor"],
                type_name=a["type"],
                explanation=a.get("explanation", ""),
            )
            for a in rec["assignments"]
        )
        return WorkAnnotation(
            work_id=rec["work_id"],
            title=rec["title"],
            region=rec["region"],
            image_ref=rec["image_ref"],
            assignments=assignments,
            composite_patterns=tuple(rec.get("composite_patterns", ())),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed work record: {exc!r}") from exc


def load_corpus(data_dir: str | Path) -> KnowledgeBase:
    """Load and fully validate a corpus directory.

    Expects ``taxonomy.json`` and ``works.jsonl`` (header line + one record
    per line); ``templates.jsonl`` is optional. Every cross-reference is
    checked here so downstream code never revalidates.
    """
    data_dir = Path(data_dir)
    ft, pt, regions, interps = _parse_taxonomy(data_dir / "taxonomy.json")

    lexicon_names = set(pt.names())
    works: list[WorkAnnotation] = []
    seen_ids: set[str] = set()
    for rec in _read_jsonl(data_dir / "works.jsonl", WORKS_SCHEMA):
        w = _parse_work(rec)
        if w.work_id in seen_ids:
            raise DuplicateId(f"work id {w.work_id!r} appears twice")
        seen_ids.add(w.work_id)
        for v in validate_annotation(w, ft):
            if v.kind == "UnknownType":
                raise UnknownType(
                    f"work {w.work_id!r}: factor {v.factor!r} has no type {v.detail!r}"
                )
            raise SchemaError(f"work {w.work_id!r}: {v.kind} {v.factor or v.detail}")
        for p in w.composite_patterns:
            if p not in lexicon_names:
                raise UnknownPattern(f"work {w.work_id!r}: unknown pattern {p!r}")
        works.append(w)

    templates: list[PromptTemplate] = []
    tpath = data_dir / "templates.jsonl"
    if tpath.exists():
        for rec in _read_jsonl(tpath, TEMPLATES_SCHEMA):
            try:
                t = PromptTemplate(rec["work_id"], rec["question"], rec["answer"])
            except (KeyError, TypeError) as exc:
                raise SchemaError(f"malformed template record: {exc!r}") from exc
            if t.work_id not in seen_ids:
                raise SchemaError(f"template references unknown work {t.work_id!r}")
            templates.append(t)

    return KnowledgeBase(
        factor_taxonomy=ft,
        pattern_taxonomy=pt,
        regions=regions,
        interpretations=interps,
        works=tuple(works),
        templates=tuple(templates),
    )
