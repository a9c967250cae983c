"""
A tour of the paper-cutting knowledge base
==========================================

Loads the packaged reference corpus and walks its three layers: the
ideation factor taxonomy, the pattern lexicon with its interpretations,
and the annotated works that tie both together.
"""

from hollowcut.datasets import reference_dir
from hollowcut.knowledge import load_corpus

kb = load_corpus(reference_dir())

# The four ideation factors structure a design intent. Each factor owns a
# fixed set of selectable types, grouped into subcategories.
print("Ideation factors")
for factor in kb.factor_taxonomy.factors:
    print(f"  {factor.name} ({', '.join(factor.subcategories)})")
    for t in factor.types:
        print(f"    - {t.name} [{t.subcategory}]")

total = sum(len(f.types) for f in kb.factor_taxonomy.factors)
print(f"\n{len(kb.factor_taxonomy.factors)} factors, {total} types in all")

# The pattern lexicon names every motif the studio can talk about. Unit
# patterns are single cuts; composite patterns are recognizable motifs
# built from them.
lex = kb.pattern_taxonomy
print(f"\nPattern lexicon: {len(lex.entries)} names "
      f"under {len(lex.categories)} categories")
for sub in sorted({e.subcategory for e in lex.entries}):
    names = [e.name for e in lex.entries if e.subcategory == sub]
    print(f"  {sub}: {len(names)} names, e.g. {', '.join(names[:4])}")

# Every lexicon entry points at an interpretation: what the motif means
# and how it is usually cut.
entry = next(e for e in lex.entries if e.name == "circle")
meaning = kb.interpretations[entry.interpretation_id]
print(f"\n'{entry.name}' means: {meaning.meaning}")
print(f"structure: {meaning.structure_notes}")

# Works are annotated with exactly one type per factor plus the composite
# patterns visible in them. The corpus spans seven regions.
print(f"\n{len(kb.works)} annotated works")
for region, count in sorted(kb.region_distribution().items()):
    print(f"  {region}: {count}")

w = kb.works[0]
print(f"\nExample: {w.work_id} '{w.title}' ({w.region})")
for a in w.assignments:
    print(f"  {a.factor}: {a.type_name}")
print(f"  patterns: {', '.join(w.composite_patterns)}")
