"""Design-space taxonomies: ideation factors, the pattern lexicon, and the
annotation record types those taxonomies validate."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SchemaError

FACTOR_NAMES = ("Function", "Subject Matter", "Style", "Method of Expression")

REGIONS = (
    "Central China",
    "East China",
    "North China",
    "Northeast",
    "Northwest",
    "South China",
    "Southwest",
)

PATTERN_CATEGORIES = ("Unit Pattern", "Composite Pattern")

# subcategory -> (category, required lexicon count)
PATTERN_SUBCATEGORIES = {
    "Geometric Unit": ("Unit Pattern", 8),
    "Semantic Unit": ("Unit Pattern", 12),
    "Sawtooth": ("Unit Pattern", 5),
    "Primary Composite": ("Composite Pattern", 34),
    "Decorative Composite": ("Composite Pattern", 8),
}

TOTAL_TYPES = 18
UNIT_PATTERN_COUNT = 25
COMPOSITE_PATTERN_COUNT = 42


@dataclass(frozen=True)
class FactorType:
    """One selectable type under an ideation factor."""

    name: str
    subcategory: str
    definition: str
    example_work_id: str | None = None


@dataclass(frozen=True)
class IdeationFactor:
    name: str
    subcategories: tuple[str, ...]
    types: tuple[FactorType, ...]

    def __post_init__(self):
        seen = set()
        for t in self.types:
            if t.subcategory not in self.subcategories:
                raise SchemaError(
                    f"factor {self.name!r}: type {t.name!r} has subcategory "
                    f"{t.subcategory!r} outside {self.subcategories}"
                )
            if t.name in seen:
                raise SchemaError(f"factor {self.name!r}: duplicate type {t.name!r}")
            seen.add(t.name)

    def type_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.types)


@dataclass(frozen=True)
class FactorTaxonomy:
    factors: tuple[IdeationFactor, ...]

    def __post_init__(self):
        names = tuple(f.name for f in self.factors)
        if names != FACTOR_NAMES:
            raise SchemaError(f"factor names must be {FACTOR_NAMES}, got {names}")
        total = sum(len(f.types) for f in self.factors)
        if total != TOTAL_TYPES:
            raise SchemaError(f"expected {TOTAL_TYPES} types across factors, got {total}")

    def factor(self, name: str) -> IdeationFactor:
        for f in self.factors:
            if f.name == name:
                return f
        raise KeyError(name)

    def has_type(self, factor_name: str, type_name: str) -> bool:
        for f in self.factors:
            if f.name == factor_name:
                return type_name in f.type_names()
        return False


@dataclass(frozen=True)
class LexiconEntry:
    """One named pattern in the lexicon.

    ``source`` is "core" for names fixed by the documented design space and
    "supplied" for project-authored names filling out the documented counts.
    """

    name: str
    subcategory: str
    interpretation_id: str
    source: str = "supplied"


@dataclass(frozen=True)
class PatternInterpretation:
    pattern_name: str
    meaning: str
    structure_notes: str
    common_combinations: tuple[str, ...] = ()


@dataclass(frozen=True)
class PatternTaxonomy:
    categories: tuple[str, ...]
    entries: tuple[LexiconEntry, ...]

    def __post_init__(self):
        if tuple(self.categories) != PATTERN_CATEGORIES:
            raise SchemaError(
                f"pattern categories must be {PATTERN_CATEGORIES}, got {self.categories}"
            )
        counts: dict[str, int] = {}
        seen = set()
        for e in self.entries:
            if e.subcategory not in PATTERN_SUBCATEGORIES:
                raise SchemaError(f"unknown pattern subcategory {e.subcategory!r}")
            if e.name in seen:
                raise SchemaError(f"duplicate lexicon name {e.name!r}")
            seen.add(e.name)
            counts[e.subcategory] = counts.get(e.subcategory, 0) + 1
        for sub, (_cat, want) in PATTERN_SUBCATEGORIES.items():
            got = counts.get(sub, 0)
            if got != want:
                raise SchemaError(f"subcategory {sub!r}: expected {want} names, got {got}")

    def names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.entries)

    def entry(self, name: str) -> LexiconEntry | None:
        for e in self.entries:
            if e.name == name:
                return e
        return None

    def category_of(self, subcategory: str) -> str:
        return PATTERN_SUBCATEGORIES[subcategory][0]


@dataclass(frozen=True)
class FactorAssignment:
    factor: str
    type_name: str
    explanation: str = ""


@dataclass(frozen=True)
class WorkAnnotation:
    """One annotated work: factor assignments, region, patterns, image ref.

    Assignments are kept as a sequence of records, not a map, so that
    duplicate factor rows in source data stay representable and reportable.
    """

    work_id: str
    title: str
    region: str
    image_ref: str
    assignments: tuple[FactorAssignment, ...]
    composite_patterns: tuple[str, ...] = ()

    def assignment_map(self) -> dict[str, FactorAssignment]:
        out: dict[str, FactorAssignment] = {}
        for a in self.assignments:
            out.setdefault(a.factor, a)
        return out


@dataclass(frozen=True)
class PatternAnnotation:
    cutout_id: str
    work_id: str
    subcategory: str
    pattern_name: str
    geometry_ref: str


# validation violations are data, not exceptions


@dataclass(frozen=True)
class Violation:
    kind: str
    factor: str | None = None
    detail: str = ""


def missing_factor(factor: str) -> Violation:
    return Violation("MissingFactor", factor=factor)


def duplicate_factor(factor: str) -> Violation:
    return Violation("DuplicateFactor", factor=factor)


def unknown_type(factor: str, type_name: str) -> Violation:
    return Violation("UnknownType", factor=factor, detail=type_name)


def unknown_region(region: str) -> Violation:
    return Violation("UnknownRegion", detail=region)


def validate_annotation(a: WorkAnnotation, taxonomy: FactorTaxonomy) -> list[Violation]:
    """Check one annotation against the factor taxonomy.

    Returns an empty list iff the annotation is well formed: exactly one
    assignment per factor, every type under its own factor, a known region.
    """
    out: list[Violation] = []
    by_factor: dict[str, int] = {}
    for asg in a.assignments:
        by_factor[asg.factor] = by_factor.get(asg.factor, 0) + 1
    for name in FACTOR_NAMES:
        n = by_factor.get(name, 0)
        if n == 0:
            out.append(missing_factor(name))
        elif n > 1:
            out.append(duplicate_factor(name))
    for asg in a.assignments:
        if asg.factor not in FACTOR_NAMES:
            out.append(unknown_type(asg.factor, asg.type_name))
        elif not taxonomy.has_type(asg.factor, asg.type_name):
            out.append(unknown_type(asg.factor, asg.type_name))
    if a.region not in REGIONS:
        out.append(unknown_region(a.region))
    return out
