"""Command-line verbs wrapping the library operations.

Every verb exits 0 on success and nonzero with a one-line JSON error on
stderr, so scripts can consume failures without scraping prose.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from .config import ServiceConfig
from .datasets import exemplar_bank, make_demo_corpus, synthesize_work_image
from .embedding import IdentityPairEmbedder, TokenHashEmbedder
from .errors import HollowcutError
from .gateway import Gateway
from .knowledge import load_corpus
from .patterns import (
    classify_unit_pattern,
    descriptors,
    detect_sawtooth,
    extract_cutouts,
    vectorize,
)
from .retrieval import build_index, evaluate_recall, load_index, save_index
from .retrieval import search as index_search
from .service import GatewayEmbedder, work_text
from .session import load_session
from .svgio import export_svg


def _fail(exc: Exception) -> "NoReturn":
    click.echo(json.dumps({"error": type(exc).__name__, "detail": str(exc)}), err=True)
    sys.exit(1)


def wrap_errors(fn):
    @functools.wraps(fn)
    def inner(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except HollowcutError as exc:
            _fail(exc)
        except OSError as exc:
            _fail(exc)

    return inner


def _emit(doc):
    click.echo(json.dumps(doc, sort_keys=True))


@click.group()
def main():
    """Paper-cutting design studio tools."""


@main.command()
@click.argument("target_dir", type=click.Path(file_okay=False))
@wrap_errors
def ingest(target_dir):
    """Materialize the reference corpus (data + rendered images) into a directory."""
    kb = make_demo_corpus(target_dir)
    _emit(
        {
            "target_dir": str(Path(target_dir)),
            "works": len(kb.works),
            "templates": len(kb.templates),
            "patterns": len(kb.interpretations),
        }
    )


@main.command("extract-patterns")
@click.argument("work_id")
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--min-area", type=int, default=4, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@wrap_errors
def extract_patterns(work_id, data_dir, min_area, out_path):
    """Cut-out manifest for one work: bbox, area, classification, outline."""
    config = ServiceConfig.from_env(**({"data_dir": data_dir} if data_dir else {}))
    kb = load_corpus(config.data_dir)
    if not any(w.work_id == work_id for w in kb.works):
        _fail(HollowcutError(f"unknown work {work_id!r}"))
    from PIL import Image

    image_path = config.data_dir / "images" / f"{work_id}.png"
    if image_path.exists():
        with Image.open(image_path) as im:
            fg = np.asarray(im.convert("L")) < 128
    else:
        fg = synthesize_work_image(work_id)
    bank = exemplar_bank()
    entries = []
    for cut in extract_cutouts(fg, min_area=min_area):
        local = np.zeros((cut.bbox.h, cut.bbox.w), dtype=bool)
        local[cut.pixels[:, 1] - cut.bbox.y, cut.pixels[:, 0] - cut.bbox.x] = True
        sub, name, confidence = classify_unit_pattern(descriptors(local), bank)
        score = detect_sawtooth(local)
        if score >= 0.6:
            sub = "Sawtooth"
        path = vectorize(local).translated(cut.bbox.x, cut.bbox.y)
        entries.append(
            {
                "cutout_id": cut.cutout_id,
                "bbox": [cut.bbox.x, cut.bbox.y, cut.bbox.w, cut.bbox.h],
                "area": int(cut.pixels.shape[0]),
                "subcategory": sub,
                "nearest_pattern": name,
                "confidence": confidence,
                "sawtooth_score": score,
                "subpath_vertices": [int(n) for n in path.vertex_counts()],
            }
        )
    doc = {"work_id": work_id, "cutouts": entries}
    if out_path:
        Path(out_path).write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
        _emit({"work_id": work_id, "cutouts": len(entries), "out": out_path})
    else:
        _emit(doc)


@main.group()
def index():
    """Build and query the retrieval index."""


@index.command("build")
@click.argument("out_path", type=click.Path(dir_okay=False))
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False), default=None)
@wrap_errors
def index_build(out_path, data_dir):
    """Embed every corpus work and write the index file."""
    config = ServiceConfig.from_env(**({"data_dir": data_dir} if data_dir else {}))
    kb = load_corpus(config.data_dir)
    gw = Gateway(config.providers)
    items = [
        (w.work_id, f"/works/{w.work_id}/image.png", {"text": work_text(w)})
        for w in kb.works
    ]
    idx = build_index(items, GatewayEmbedder(gw))
    save_index(idx, out_path)
    _emit({"out": out_path, "entries": len(idx), "dim": idx.dim, "stamp": idx.build_stamp})


@main.command()
@click.argument("index_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("query")
@click.option("-k", type=int, default=20, show_default=True)
@wrap_errors
def search(index_path, query, k):
    """Rank indexed works against a text query."""
    idx = load_index(index_path)
    gw = Gateway(ServiceConfig.from_env().providers)
    results = index_search(idx, GatewayEmbedder(gw).embed_text(query), k=k)
    _emit(
        {
            "query": query,
            "results": [
                {"rank": r.rank, "work_id": r.work_id, "score": r.score} for r in results
            ],
        }
    )


@main.command("eval-recall")
@click.argument("index_path", type=click.Path(exists=True, dir_okay=False), required=False)
@click.option("--embedder", "embedder_name", type=click.Choice(["identity", "token-hash"]), default="identity", show_default=True)
@click.option("--pairs", "pairs_path", type=click.Path(exists=True, dir_okay=False), default=None, help="JSONL of {query, gt} records; defaults to id self-pairs")
@click.option("--ks", default="1,5,10", show_default=True)
@wrap_errors
def eval_recall(index_path, embedder_name, pairs_path, ks):
    """Recall@k over query/ground-truth pairs.

    Without an index file, evaluates the reference corpus with the chosen
    mock embedder; the identity mock matches each id to itself.
    """
    embedder = IdentityPairEmbedder() if embedder_name == "identity" else TokenHashEmbedder()
    if index_path:
        idx = load_index(index_path)
    else:
        kb = load_corpus(ServiceConfig.from_env().data_dir)
        idx = build_index([(w.work_id, w.image_ref, {}) for w in kb.works], embedder)
    if pairs_path:
        pairs = []
        for line in Path(pairs_path).read_text().splitlines():
            if line.strip():
                rec = json.loads(line)
                pairs.append((rec["query"], rec["gt"]))
    else:
        pairs = [(i, i) for i in idx.ids]
    report = evaluate_recall(idx, pairs, embedder, ks=tuple(int(v) for v in ks.split(",")))
    _emit(
        {
            "n_queries": report.n_queries,
            "recall_at": {str(k): v for k, v in report.recall_at.items()},
        }
    )


@main.command()
@click.option("--listen", default=None, help="host:port (default from HC_LISTEN)")
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--k-retrieve", type=int, default=None)
@wrap_errors
def serve(listen, data_dir, k_retrieve):
    """Run the studio HTTP service."""
    from .service import run

    overrides = {}
    if listen:
        overrides["listen"] = listen
    if data_dir:
        overrides["data_dir"] = data_dir
    if k_retrieve is not None:
        overrides["k_retrieve"] = k_retrieve
    run(ServiceConfig.from_env(**overrides))


@main.command()
@click.argument("session_json", type=click.Path(exists=True, dir_okay=False))
@click.argument("out_svg", type=click.Path(dir_okay=False))
@click.option("--scale", type=float, default=1.0, show_default=True)
@wrap_errors
def export(session_json, out_svg, scale):
    """Render a saved session's board to the cut-ready vector document."""
    session = load_session(session_json)
    data = export_svg(session.board, scale=scale)
    Path(out_svg).write_bytes(data)
    _emit({"out": out_svg, "bytes": len(data), "ops": len(session.op_log)})


if __name__ == "__main__":
    main()
