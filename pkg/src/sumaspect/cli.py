"""Command-line pipeline: encode, extract, oracle, evaluate, ensemble, report.

Every subcommand validates its inputs fully before writing any output.
Exit codes: 0 success, 1 validation error, 2 I/O or format error. All
randomness flows from --seed; per-document work can fan out over --jobs
worker processes without changing any output byte.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import analysis, ensemble, metrics, registry
from .corpus import Corpus, load_corpus
from .embedding import DEFAULT_DIM, EmbeddingStore, encode_fallback, read_embeddings, write_embeddings
from .errors import SumAspectError, ValidationError
from .aspects import Selection, read_selections, write_selections
from .oracle import greedy_oracle

_PROGRESS_EVERY = 100


def _progress(done: int, total: int) -> None:
    if done % _PROGRESS_EVERY == 0 or done == total:
        print(f"\r{done}/{total}", end="" if done < total else "\n", file=sys.stderr)


def _parse_k_mode(text: str) -> int | None:
    """None means match-target; an int is a fixed budget."""
    if text == "match-target":
        return None
    if text.startswith("fixed:"):
        try:
            fixed = int(text.split(":", 1)[1])
        except ValueError:
            raise ValidationError(f"bad --k-mode value {text!r}") from None
        if fixed < 1:
            raise ValidationError("--k-mode fixed:<n> needs n >= 1")
        return fixed
    raise ValidationError(f"bad --k-mode value {text!r}; use match-target or fixed:<n>")


def _doc_k(doc, fixed_k: int | None) -> int:
    return fixed_k if fixed_k is not None else doc.k_ref


def _pmap(fn, items, jobs: int):
    """Order-preserving map, optionally across worker processes."""
    total = len(items)
    results = []
    if jobs <= 1 or total <= 1:
        for i, item in enumerate(items, start=1):
            results.append(fn(item))
            _progress(i, total)
        return results
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        chunk = max(1, total // (jobs * 4))
        for i, res in enumerate(pool.map(fn, items, chunksize=chunk), start=1):
            results.append(res)
            _progress(i, total)
    return results


def _encode_worker(args):
    doc, dim = args
    return encode_fallback(doc, dim)


def cmd_encode(ns) -> int:
    corpus = load_corpus(ns.corpus, max_source_sentences=ns.max_source_sentences)
    mats = _pmap(_encode_worker, [(doc, ns.dim) for doc in corpus], ns.jobs)
    store = EmbeddingStore(ns.dim, {m.doc_id: m for m in mats})
    write_embeddings(store, ns.out)
    print(f"encoded {len(store)} documents at dim {ns.dim} -> {ns.out}", file=sys.stderr)
    return 0


def _extract_worker(args):
    doc, emb, algorithm, k, params = args
    return registry.run_selector(algorithm, doc, emb, k, params)


def _load_store_if(path: str | None, corpus: Corpus, algorithm: str | None = None) -> EmbeddingStore | None:
    if path is None:
        if algorithm is not None and registry.needs_embeddings(algorithm):
            raise ValidationError(f"algorithm {algorithm!r} needs --embeddings")
        return None
    return read_embeddings(path, corpus)


def cmd_extract(ns) -> int:
    if ns.algorithm not in registry.ALGORITHMS:
        raise ValidationError(
            f"unknown algorithm {ns.algorithm!r}; available: {', '.join(registry.ALGORITHMS)}"
        )
    if ns.hull_space != "pca2":
        raise ValidationError("--hull-space full is unsupported; only pca2 is implemented")
    corpus = load_corpus(ns.corpus, max_source_sentences=ns.max_source_sentences)
    store = _load_store_if(ns.embeddings, corpus, ns.algorithm)
    fixed_k = _parse_k_mode(ns.k_mode)
    params = registry.SelectorParams(
        seed=ns.seed,
        knn_k=ns.knn_k,
        mmr_lambda=ns.mmr_lambda,
        lexrank_threshold=ns.lexrank_threshold,
        rouge_beta=ns.rouge_beta,
    )
    tasks = [
        (doc, store.get(doc.id) if store is not None else None, ns.algorithm, _doc_k(doc, fixed_k), params)
        for doc in corpus
    ]
    selections = _pmap(_extract_worker, tasks, ns.jobs)
    write_selections(selections, ns.out)
    return 0


def _oracle_worker(args):
    doc, k, beta = args
    return greedy_oracle(doc, k, beta)


def cmd_oracle(ns) -> int:
    corpus = load_corpus(ns.corpus, max_source_sentences=ns.max_source_sentences)
    fixed_k = _parse_k_mode(ns.k_mode)
    tasks = [(doc, _doc_k(doc, fixed_k), ns.rouge_beta) for doc in corpus]
    selections = _pmap(_oracle_worker, tasks, ns.jobs)
    write_selections(selections, ns.out)
    return 0


def _evaluate_worker(args):
    doc, emb, sel, oracle_sel, beta = args
    return metrics.evaluate_selection(doc, emb, sel, oracle_sel, beta)


def cmd_evaluate(ns) -> int:
    corpus = load_corpus(ns.corpus, max_source_sentences=ns.max_source_sentences)
    store = read_embeddings(ns.embeddings, corpus)
    selections: list[Selection] = []
    for path in ns.selections:
        selections.extend(read_selections(path))
    oracles = {s.doc_id: s for s in read_selections(ns.oracle)}
    docs = {doc.id: doc for doc in corpus}
    tasks = []
    for sel in selections:
        if sel.doc_id not in docs:
            raise ValidationError(f"selection references unknown document {sel.doc_id!r}")
        if sel.doc_id not in oracles:
            raise ValidationError(f"no oracle selection for document {sel.doc_id!r}")
        tasks.append((docs[sel.doc_id], store.get(sel.doc_id), sel, oracles[sel.doc_id], ns.rouge_beta))
    records = _pmap(_evaluate_worker, tasks, ns.jobs)
    metrics.write_metrics(records, ns.out)
    return 0


def cmd_ensemble(ns) -> int:
    if len(ns.selections) < 2:
        raise ValidationError("ensemble needs at least two --selections files")
    inputs = [read_selections(path) for path in ns.selections]
    by_doc: dict[str, list[Selection]] = {}
    order: list[str] = []
    for sels in inputs:
        for sel in sels:
            if sel.doc_id not in by_doc:
                by_doc[sel.doc_id] = []
                order.append(sel.doc_id)
            by_doc[sel.doc_id].append(sel)
    fixed_k = _parse_k_mode(ns.k_mode) if ns.k_mode else None
    target_k: dict[str, int] = {}
    if ns.corpus:
        corpus = load_corpus(ns.corpus)
        target_k = {doc.id: doc.k_ref for doc in corpus}
    combined = []
    for doc_id in order:
        group = by_doc[doc_id]
        if len(group) < 2:
            raise ValidationError(f"document {doc_id!r} appears in fewer than two inputs")
        if fixed_k is not None:
            k = fixed_k
        elif doc_id in target_k:
            k = target_k[doc_id]
        else:
            k = max(len(s.indices) for s in group)
        combined.append(ensemble.combine(group, k, ns.mode, ns.seed, ns.label))
    write_selections(combined, ns.out)
    return 0


def cmd_report(ns) -> int:
    records = []
    for path in ns.metrics:
        records.extend(metrics.read_metrics(path))
    corpus = load_corpus(ns.corpus, max_source_sentences=ns.max_source_sentences) if ns.corpus else None
    store = None
    if ns.embeddings:
        if corpus is None:
            raise ValidationError("--embeddings needs --corpus")
        store = read_embeddings(ns.embeddings, corpus)
    selections: list[Selection] = []
    for path in ns.selections or []:
        selections.extend(read_selections(path))
    oracles = read_selections(ns.oracle) if ns.oracle else None
    expected = [a for a in (ns.expect or "").split(",") if a] or None
    name = ns.name or (corpus.name if corpus is not None else "corpus")
    report = analysis.build_report(
        records,
        corpus_name=name,
        corpus=corpus,
        store=store,
        selections=selections,
        oracle_selections=oracles,
        expected_algorithms=expected,
    )
    analysis.write_report(analysis.render_report(report), ns.outdir)
    return 0


def _add_common(parser, corpus_required=True):
    parser.add_argument("--corpus", required=corpus_required, help="corpus JSONL file")
    parser.add_argument(
        "--max-source-sentences",
        type=int,
        default=None,
        help="truncate each document's source to its first M sentences",
    )
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sumaspect",
        description="Sub-aspect bias analysis for extractive summarization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="embed a corpus with the hashing fallback encoder")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--dim", type=int, default=DEFAULT_DIM)
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("extract", help="run one selection algorithm over a corpus")
    _add_common(p)
    p.add_argument("--embeddings", default=None, help="SAEM file (needed by embedding-based algorithms)")
    p.add_argument("--algorithm", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k-mode", default="match-target", help="match-target or fixed:<n>")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--knn-k", type=int, default=5)
    p.add_argument("--mmr-lambda", type=float, default=0.5)
    p.add_argument("--lexrank-threshold", type=float, default=0.1)
    p.add_argument("--rouge-beta", type=float, default=1.0)
    p.add_argument(
        "--hull-space",
        choices=["pca2", "full"],
        default="pca2",
        help="space for hull-based selection; full is reserved and unsupported",
    )
    p.set_defaults(fn=cmd_extract)

    p = sub.add_parser("oracle", help="greedy oracle selections for a corpus")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--k-mode", default="match-target")
    p.add_argument("--rouge-beta", type=float, default=1.0)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("evaluate", help="score selections against oracle and reference")
    _add_common(p)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--selections", required=True, nargs="+")
    p.add_argument("--oracle", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rouge-beta", type=float, default=1.0)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("ensemble", help="combine selection files")
    p.add_argument("--selections", required=True, nargs="+")
    p.add_argument("--mode", required=True, choices=list(ensemble.ENSEMBLE_MODES))
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.add_argument("--corpus", default=None, help="optional corpus for match-target budgets")
    p.add_argument("--k-mode", default=None, help="fixed:<n> to pin the budget")
    p.add_argument("--label", default=None, help="algorithm label for the output")
    p.set_defaults(fn=cmd_ensemble)

    p = sub.add_parser("report", help="render the bias report from metric files")
    p.add_argument("--metrics", required=True, nargs="+")
    p.add_argument("--outdir", required=True)
    p.add_argument("--corpus", default=None)
    p.add_argument("--max-source-sentences", type=int, default=None)
    p.add_argument("--embeddings", default=None)
    p.add_argument("--selections", nargs="*", default=None)
    p.add_argument("--oracle", default=None)
    p.add_argument("--name", default=None)
    p.add_argument("--expect", default=None, help="comma-separated algorithms that must be present")
    p.set_defaults(fn=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.fn(ns)
    except SumAspectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
