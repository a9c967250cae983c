"""Paper-cutting design studio: a factor-tagged knowledge base for ideation,
reference retrieval, cut-out pattern analysis, and a vector mood board that
exports cut-ready SVG."""

__version__ = "0.1.0"

from . import (
    board,
    config,
    datasets,
    embedding,
    errors,
    gateway,
    ideation,
    knowledge,
    patterns,
    retrieval,
    session,
    svgio,
    taxonomy,
)

__all__ = [
    "board",
    "config",
    "datasets",
    "embedding",
    "errors",
    "gateway",
    "ideation",
    "knowledge",
    "patterns",
    "retrieval",
    "session",
    "svgio",
    "taxonomy",
    "__version__",
]
