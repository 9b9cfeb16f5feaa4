"""Per-document evaluation: ROUGE, volume overlap, sentence overlap, novelty.

Volume overlap works in the document's own 2D PCA space, fitted on the
source rows only so the reference never leaks into the basis. It is
undefined (None) when the reference hull is degenerate, e.g. single
sentence summaries. Corpus-level numbers are arithmetic means over
documents; documents with undefined VO are excluded from the VO mean.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .corpus import Corpus, Document, tokenize
from .embedding import EmbeddingMatrix, EmbeddingStore
from .errors import FormatError, ValidationError
from .aspects import Selection
from .geometry import pca2d, polygon_area, polygon_intersection_area, quickhull
from .rouge import RougeScore, rouge_all

REF_AREA_EPS = 1e-12


@dataclass(frozen=True)
class MetricRecord:
    doc_id: str
    algorithm: str
    rouge: RougeScore
    vo: float | None
    so: float


def volume_overlap(sel: Selection, emb: EmbeddingMatrix) -> float | None:
    """Intersection area of the selection and reference hulls over the reference area."""
    if any(i >= emb.n_source for i in sel.indices):
        raise ValidationError(
            f"selection for {sel.doc_id!r} indexes past the document's sentences"
        )
    basis = pca2d(emb.source64())
    model_pts = basis.projected[list(sel.indices)]
    ref_pts = basis.transform(emb.target64())
    ref_hull = quickhull(ref_pts)
    ref_area = polygon_area(ref_hull)
    if ref_area < REF_AREA_EPS:
        return None
    inter = polygon_intersection_area(quickhull(model_pts), ref_hull)
    return min(1.0, max(0.0, inter / ref_area))


def sentence_overlap(sel: Selection, oracle: Selection) -> float:
    """Fraction of oracle sentences recovered by the selection."""
    if sel.doc_id != oracle.doc_id:
        raise ValidationError("sentence_overlap needs selections of the same document")
    return len(sel.as_set() & oracle.as_set()) / len(oracle.indices)


def oracle_recall(p: Selection, d: Selection, i: Selection, oracle: Selection) -> float:
    """Fraction of oracle sentences missed by the union of the three aspects."""
    ids = {p.doc_id, d.doc_id, i.doc_id, oracle.doc_id}
    if len(ids) != 1:
        raise ValidationError("oracle_recall needs selections of the same document")
    union = p.as_set() | d.as_set() | i.as_set()
    missed = oracle.as_set() - union
    return len(missed) / len(oracle.indices)


def _ngram_set(sentences, n: int) -> set[tuple[str, ...]]:
    grams: set[tuple[str, ...]] = set()
    for sent in sentences:
        toks = tokenize(sent)
        for j in range(len(toks) - n + 1):
            grams.add(tuple(toks[j : j + n]))
    return grams


def ngram_novelty(doc: Document, oracle: Selection, n: int) -> tuple[float, float]:
    """(oracle-target overlap, target-minus-source novelty) over n-gram sets."""
    target = _ngram_set(doc.target, n)
    if not target:
        return 0.0, 0.0
    source = _ngram_set(doc.source, n)
    oracle_grams = _ngram_set([doc.source[i] for i in oracle.indices], n)
    overlap_ot = len(oracle_grams & target) / len(target)
    novel_ts = len(target - source) / len(target)
    return overlap_ot, novel_ts


def evaluate_selection(
    doc: Document,
    emb: EmbeddingMatrix,
    sel: Selection,
    oracle_sel: Selection,
    beta: float = 1.0,
) -> MetricRecord:
    if max(sel.indices) >= doc.n_source:
        raise ValidationError(
            f"selection for {sel.doc_id!r} indexes past the document's sentences"
        )
    candidate = [tokenize(doc.source[i]) for i in sel.indices]
    reference = [tokenize(s) for s in doc.target]
    return MetricRecord(
        doc_id=doc.id,
        algorithm=sel.algorithm,
        rouge=rouge_all(candidate, reference, beta),
        vo=volume_overlap(sel, emb),
        so=sentence_overlap(sel, oracle_sel),
    )


def evaluate_selections(
    corpus: Corpus,
    store: EmbeddingStore,
    selections: list[Selection],
    oracles: list[Selection],
    beta: float = 1.0,
) -> list[MetricRecord]:
    """Evaluate every selection; input order is preserved in the output."""
    docs = {doc.id: doc for doc in corpus}
    oracle_by_doc: dict[str, Selection] = {}
    for o in oracles:
        oracle_by_doc[o.doc_id] = o
    records = []
    for sel in selections:
        doc = docs.get(sel.doc_id)
        if doc is None:
            raise ValidationError(f"selection references unknown document {sel.doc_id!r}")
        if sel.doc_id not in oracle_by_doc:
            raise ValidationError(f"no oracle selection for document {sel.doc_id!r}")
        records.append(
            evaluate_selection(doc, store.get(sel.doc_id), sel, oracle_by_doc[sel.doc_id], beta)
        )
    return records


def write_metrics(records: list[MetricRecord], path: str | Path) -> None:
    lines = []
    for rec in records:
        lines.append(
            json.dumps(
                {
                    "doc_id": rec.doc_id,
                    "algorithm": rec.algorithm,
                    "r1": rec.rouge.r1,
                    "r2": rec.rouge.r2,
                    "rl": rec.rouge.rl,
                    "r": rec.rouge.mean,
                    "vo": rec.vo,
                    "so": rec.so,
                }
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_metrics(path: str | Path) -> list[MetricRecord]:
    path = Path(path)
    if not path.is_file():
        raise FormatError(f"metrics file not found: {path}")
    out: list[MetricRecord] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from exc
            try:
                rouge = RougeScore(obj["r1"], obj["r2"], obj["rl"], obj["r"])
                out.append(
                    MetricRecord(obj["doc_id"], obj["algorithm"], rouge, obj["vo"], obj["so"])
                )
            except KeyError as exc:
                raise ValidationError(f"{path}:{lineno}: missing key {exc}") from exc
    return out
