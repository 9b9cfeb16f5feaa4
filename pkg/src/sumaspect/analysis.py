"""Corpus-level aggregation: bias tables, aspect triangles, Venn regions,
position histograms, n-gram novelty, and deterministic report rendering.

Internally every score is a fraction in [0, 1]; multiplication by 100 and
half-up rounding happen only in the rendered CSV layer. Rendering is a
pure function of the report object, so re-running a report produces
byte-identical files.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Corpus, Document
from .embedding import EmbeddingMatrix, EmbeddingStore
from .errors import ValidationError
from .aspects import (
    Selection,
    convexfall_removal_order,
    n_nearest_scores,
)
from .metrics import MetricRecord, ngram_novelty, oracle_recall
from .seeding import rng_for

HIST_BINS = 20  # normalized-rank bins of width 0.05

# Canonical row order for the bias table; anything unknown goes after, sorted.
REPORT_ORDER = (
    "random",
    "oracle",
    "first",
    "last",
    "middle",
    "convexfall",
    "heuristic_volume",
    "n_nearest",
    "k_nearest",
    "kmeans",
    "mmr",
    "textrank",
    "lexrank",
)

# The strongest algorithm per sub-aspect, used for triangles, Venn regions
# and the ensemble "asp" pool.
ASPECT_ALGOS = {"position": "first", "diversity": "convexfall", "importance": "n_nearest"}


def select_random(doc: Document, k: int, seed: int) -> Selection:
    """Uniform sample of min(k, N) sentences, keyed on (seed, doc id)."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    n = doc.n_source
    take = min(k, n)
    rng = rng_for(seed, "random", doc.id)
    picked = rng.choice(n, size=take, replace=False).tolist()
    return Selection(doc.id, "random", tuple(sorted(int(i) for i in picked)))


@dataclass(frozen=True)
class TriangleCoords:
    position: float
    diversity: float
    importance: float
    degenerate: bool = False


def triangle_coords(r_p: float, r_d: float, r_i: float) -> TriangleCoords:
    """Normalize three mean ROUGE scores onto the aspect simplex."""
    if min(r_p, r_d, r_i) < 0:
        raise ValidationError("triangle inputs must be non-negative")
    total = r_p + r_d + r_i
    if total == 0.0:
        return TriangleCoords(1 / 3, 1 / 3, 1 / 3, degenerate=True)
    return TriangleCoords(r_p / total, r_d / total, r_i / total)


VENN_REGIONS = ("p_only", "d_only", "i_only", "pd", "pi", "di", "pdi")


@dataclass(frozen=True)
class VennSummary:
    fractions: dict[str, float]
    mean_counts: dict[str, float]
    oracle_recall: float | None
    n_documents: int


def _venn_doc(p: frozenset[int], d: frozenset[int], i: frozenset[int]) -> dict[str, int]:
    return {
        "p_only": len(p - d - i),
        "d_only": len(d - p - i),
        "i_only": len(i - p - d),
        "pd": len((p & d) - i),
        "pi": len((p & i) - d),
        "di": len((d & i) - p),
        "pdi": len(p & d & i),
    }


def venn_regions(
    p_sels: Sequence[Selection],
    d_sels: Sequence[Selection],
    i_sels: Sequence[Selection],
    oracles: Sequence[Selection] | None = None,
) -> VennSummary:
    """Average the 7 overlap regions of the three aspect selections.

    Region sizes are normalized per document by the union size, so the
    seven fractions sum to 1 for every document.
    """
    by_doc = lambda sels: {s.doc_id: s for s in sels}
    p_map, d_map, i_map = by_doc(p_sels), by_doc(d_sels), by_doc(i_sels)
    doc_ids = [doc_id for doc_id in p_map if doc_id in d_map and doc_id in i_map]
    if not doc_ids:
        raise ValidationError("venn_regions found no documents shared by all aspects")
    oracle_map = by_doc(oracles) if oracles else {}

    frac_acc = dict.fromkeys(VENN_REGIONS, 0.0)
    count_acc = dict.fromkeys(VENN_REGIONS, 0.0)
    recalls = []
    for doc_id in doc_ids:
        p, d, i = p_map[doc_id].as_set(), d_map[doc_id].as_set(), i_map[doc_id].as_set()
        counts = _venn_doc(p, d, i)
        union = len(p | d | i)
        for region, c in counts.items():
            frac_acc[region] += c / union
            count_acc[region] += c
        if doc_id in oracle_map:
            recalls.append(
                oracle_recall(p_map[doc_id], d_map[doc_id], i_map[doc_id], oracle_map[doc_id])
            )
    n = len(doc_ids)
    return VennSummary(
        fractions={r: frac_acc[r] / n for r in VENN_REGIONS},
        mean_counts={r: count_acc[r] / n for r in VENN_REGIONS},
        oracle_recall=(sum(recalls) / len(recalls)) if recalls else None,
        n_documents=n,
    )


def position_ranking(doc: Document) -> list[int]:
    return list(range(doc.n_source))


def diversity_ranking(emb: EmbeddingMatrix) -> list[int]:
    """Most to least diverse: survivors of hull pruning rank first."""
    remaining, removed = convexfall_removal_order(emb, stop_len=1)
    return remaining + removed[::-1]


def importance_ranking(emb: EmbeddingMatrix) -> list[int]:
    scores = n_nearest_scores(emb)
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))


def position_histogram(
    rankings: dict[str, list[int]],
    oracles: Sequence[Selection],
    bins: int = HIST_BINS,
) -> np.ndarray:
    """Histogram of normalized oracle-sentence ranks under an aspect ranking.

    ``rankings`` maps doc id to a permutation of [0, N) where position r
    holds the sentence ranked r (rank 0 is strongest for the aspect).
    """
    counts = np.zeros(bins, dtype=np.int64)
    for sel in oracles:
        ranking = rankings.get(sel.doc_id)
        if ranking is None:
            raise ValidationError(f"no ranking for document {sel.doc_id!r}")
        n = len(ranking)
        if sorted(ranking) != list(range(n)):
            raise ValidationError(f"ranking for {sel.doc_id!r} is not a permutation")
        rank_of = {idx: rank for rank, idx in enumerate(ranking)}
        for idx in sel.indices:
            normalized = rank_of[idx] / n
            counts[min(int(normalized * bins), bins - 1)] += 1
    return counts


@dataclass(frozen=True)
class AlgorithmRow:
    algorithm: str
    r1: float
    r2: float
    rl: float
    r: float
    vo: float | None
    vo_defined: int
    so: float
    n_documents: int


@dataclass(frozen=True)
class NoveltySummary:
    r_oracle_target: float | None
    ot_unigram: float
    ot_bigram: float
    ts_unigram: float
    ts_bigram: float
    n_documents: int


@dataclass
class BiasReport:
    corpus: str
    rows: list[AlgorithmRow]
    triangle: TriangleCoords | None = None
    venn: VennSummary | None = None
    histograms: dict[str, list[int]] | None = None
    novelty: NoveltySummary | None = None
    coords: list[tuple[str, int, str, float, float]] = field(default_factory=list)


def _row_order_key(algorithm: str) -> tuple[int, str]:
    try:
        return (REPORT_ORDER.index(algorithm), algorithm)
    except ValueError:
        return (len(REPORT_ORDER), algorithm)


def aggregate_metrics(records: Sequence[MetricRecord]) -> list[AlgorithmRow]:
    grouped: dict[str, list[MetricRecord]] = defaultdict(list)
    for rec in records:
        grouped[rec.algorithm].append(rec)
    rows = []
    for algorithm in sorted(grouped, key=_row_order_key):
        recs = grouped[algorithm]
        vo_values = [r.vo for r in recs if r.vo is not None]
        rows.append(
            AlgorithmRow(
                algorithm=algorithm,
                r1=float(np.mean([r.rouge.r1 for r in recs])),
                r2=float(np.mean([r.rouge.r2 for r in recs])),
                rl=float(np.mean([r.rouge.rl for r in recs])),
                r=float(np.mean([r.rouge.mean for r in recs])),
                vo=float(np.mean(vo_values)) if vo_values else None,
                vo_defined=len(vo_values),
                so=float(np.mean([r.so for r in recs])),
                n_documents=len(recs),
            )
        )
    return rows


def build_report(
    metrics: Sequence[MetricRecord],
    corpus_name: str = "corpus",
    corpus: Corpus | None = None,
    store: EmbeddingStore | None = None,
    selections: Sequence[Selection] | None = None,
    oracle_selections: Sequence[Selection] | None = None,
    expected_algorithms: Sequence[str] | None = None,
) -> BiasReport:
    """Assemble every report artifact computable from the supplied inputs.

    The bias table and (when the three aspect algorithms were evaluated)
    the triangle need only metric records. Venn regions additionally need
    the aspect selections; histograms, novelty and the coordinate dump
    need the corpus, embeddings and oracle selections.
    """
    if not metrics:
        raise ValidationError("no metric records to report on")
    rows = aggregate_metrics(metrics)
    present = {row.algorithm for row in rows}
    if expected_algorithms:
        gaps = sorted(set(expected_algorithms) - present)
        if gaps:
            raise ValidationError(f"missing algorithm outputs: {', '.join(gaps)}")
    report = BiasReport(corpus=corpus_name, rows=rows)

    by_algo = {row.algorithm: row for row in rows}
    aspect_rows = [by_algo.get(ASPECT_ALGOS[a]) for a in ("position", "diversity", "importance")]
    if all(r is not None for r in aspect_rows):
        report.triangle = triangle_coords(*(r.r for r in aspect_rows))

    sel_by_algo: dict[str, list[Selection]] = defaultdict(list)
    for sel in selections or []:
        sel_by_algo[sel.algorithm].append(sel)
    p_sels = sel_by_algo.get(ASPECT_ALGOS["position"])
    d_sels = sel_by_algo.get(ASPECT_ALGOS["diversity"])
    i_sels = sel_by_algo.get(ASPECT_ALGOS["importance"])
    if p_sels and d_sels and i_sels:
        report.venn = venn_regions(p_sels, d_sels, i_sels, oracle_selections)

    if corpus is not None and oracle_selections:
        oracle_by_doc = {s.doc_id: s for s in oracle_selections}
        docs = [doc for doc in corpus if doc.id in oracle_by_doc]
        if docs:
            ot1 = ot2 = ts1 = ts2 = 0.0
            for doc in docs:
                o1, t1 = ngram_novelty(doc, oracle_by_doc[doc.id], 1)
                o2, t2 = ngram_novelty(doc, oracle_by_doc[doc.id], 2)
                ot1 += o1
                ts1 += t1
                ot2 += o2
                ts2 += t2
            n = len(docs)
            oracle_row = by_algo.get("oracle")
            report.novelty = NoveltySummary(
                r_oracle_target=oracle_row.r if oracle_row else None,
                ot_unigram=ot1 / n,
                ot_bigram=ot2 / n,
                ts_unigram=ts1 / n,
                ts_bigram=ts2 / n,
                n_documents=n,
            )

        if store is not None:
            oracles = [oracle_by_doc[doc.id] for doc in docs]
            pos = {doc.id: position_ranking(doc) for doc in docs}
            div = {doc.id: diversity_ranking(store.get(doc.id)) for doc in docs}
            imp = {doc.id: importance_ranking(store.get(doc.id)) for doc in docs}
            report.histograms = {
                "position": position_histogram(pos, oracles).tolist(),
                "diversity": position_histogram(div, oracles).tolist(),
                "importance": position_histogram(imp, oracles).tolist(),
            }

    if corpus is not None and store is not None:
        from .geometry import pca2d  # local import keeps module load light

        for doc in corpus:
            emb = store.get(doc.id)
            basis = pca2d(emb.source64())
            for i, (x, y) in enumerate(basis.projected):
                report.coords.append((doc.id, i, "source", float(x), float(y)))
            for i, (x, y) in enumerate(basis.transform(emb.target64())):
                report.coords.append((doc.id, i, "target", float(x), float(y)))
    return report


def _pct(value: float | None) -> str:
    """Fraction to percentage with half-up rounding to one decimal."""
    if value is None:
        return "-"
    return str(Decimal(repr(value * 100.0)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def _svg_bar_chart(title: str, labels: list[str], values: list[float], unit: str = "%") -> str:
    width, height, margin = 640, 360, 60
    n = max(len(values), 1)
    vmax = max(max(values, default=0.0), 1e-9)
    bar_w = (width - 2 * margin) / n
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{width / 2:.2f}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
    ]
    for i, (label, value) in enumerate(zip(labels, values)):
        h = (height - 2 * margin) * value / vmax
        x = margin + i * bar_w
        y = height - margin - h
        parts.append(
            f'<rect x="{x + 2:.2f}" y="{y:.2f}" width="{bar_w - 4:.2f}" height="{h:.2f}" fill="#4878a8"/>'
        )
        parts.append(
            f'<text x="{x + bar_w / 2:.2f}" y="{y - 4:.2f}" text-anchor="middle" font-size="10">{value:.1f}{unit}</text>'
        )
        parts.append(
            f'<text x="{x + bar_w / 2:.2f}" y="{height - margin + 14:.2f}" text-anchor="middle" '
            f'font-size="9" transform="rotate(30 {x + bar_w / 2:.2f} {height - margin + 14:.2f})">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _svg_triangle(tri: TriangleCoords, corpus: str) -> str:
    width, height = 480, 440
    ax, ay = width / 2, 40.0  # position apex
    bx, by = 60.0, height - 60.0  # diversity apex
    cx, cy = width - 60.0, height - 60.0  # importance apex
    px = tri.position * ax + tri.diversity * bx + tri.importance * cx
    py = tri.position * ay + tri.diversity * by + tri.importance * cy
    return "\n".join(
        [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
            f'<text x="{width / 2:.2f}" y="20" text-anchor="middle" font-size="14">aspect mixture: {corpus}</text>',
            f'<polygon points="{ax:.2f},{ay:.2f} {bx:.2f},{by:.2f} {cx:.2f},{cy:.2f}" fill="none" stroke="black"/>',
            f'<text x="{ax:.2f}" y="{ay - 8:.2f}" text-anchor="middle" font-size="12">position {tri.position:.3f}</text>',
            f'<text x="{bx:.2f}" y="{by + 16:.2f}" text-anchor="middle" font-size="12">diversity {tri.diversity:.3f}</text>',
            f'<text x="{cx:.2f}" y="{cy + 16:.2f}" text-anchor="middle" font-size="12">importance {tri.importance:.3f}</text>',
            f'<circle cx="{px:.2f}" cy="{py:.2f}" r="6" fill="#c44e52"/>',
            "</svg>",
        ]
    ) + "\n"


def render_report(report: BiasReport) -> dict[str, str]:
    """Render every artifact to text, keyed by relative output path."""
    files: dict[str, str] = {}

    table = ["algorithm,R1,R2,RL,R,VO,SO"]
    for row in report.rows:
        table.append(
            ",".join(
                [
                    row.algorithm,
                    _pct(row.r1),
                    _pct(row.r2),
                    _pct(row.rl),
                    _pct(row.r),
                    _pct(row.vo),
                    _pct(row.so),
                ]
            )
        )
    files["report.csv"] = "\n".join(table) + "\n"

    meta = {
        "corpus": report.corpus,
        "algorithms": {
            row.algorithm: {"documents": row.n_documents, "vo_defined": row.vo_defined}
            for row in report.rows
        },
    }
    files["report_meta.json"] = json.dumps(meta, indent=2, sort_keys=True) + "\n"

    files["charts/rouge_bar.svg"] = _svg_bar_chart(
        f"mean ROUGE (R) by algorithm: {report.corpus}",
        [row.algorithm for row in report.rows],
        [row.r * 100.0 for row in report.rows],
    )

    if report.triangle is not None:
        tri = report.triangle
        files["triangle.json"] = (
            json.dumps(
                {
                    "position": tri.position,
                    "diversity": tri.diversity,
                    "importance": tri.importance,
                    "degenerate": tri.degenerate,
                    "algorithms": ASPECT_ALGOS,
                },
                indent=2,
                sort_keys=True,
            )
            + "\n"
        )
        files["charts/triangle.svg"] = _svg_triangle(tri, report.corpus)

    if report.venn is not None:
        files["venn.json"] = (
            json.dumps(
                {
                    "fractions": report.venn.fractions,
                    "mean_counts": report.venn.mean_counts,
                    "oracle_recall": report.venn.oracle_recall,
                    "documents": report.venn.n_documents,
                },
                indent=2,
                sort_keys=True,
            )
            + "\n"
        )

    if report.histograms is not None:
        for aspect, counts in report.histograms.items():
            lines = ["bin_lo,bin_hi,count"]
            for b, count in enumerate(counts):
                lines.append(f"{b * 0.05:.2f},{(b + 1) * 0.05:.2f},{count}")
            files[f"hist_{aspect}.csv"] = "\n".join(lines) + "\n"
            files[f"charts/hist_{aspect}.svg"] = _svg_bar_chart(
                f"oracle rank distribution ({aspect}): {report.corpus}",
                [f"{b * 0.05:.2f}" for b in range(len(counts))],
                [float(c) for c in counts],
                unit="",
            )

    if report.novelty is not None:
        nov = report.novelty
        files["novelty.csv"] = (
            "corpus,r_oracle_target,ot_unigram,ot_bigram,ts_unigram,ts_bigram\n"
            + ",".join(
                [
                    report.corpus,
                    _pct(nov.r_oracle_target),
                    _pct(nov.ot_unigram),
                    _pct(nov.ot_bigram),
                    _pct(nov.ts_unigram),
                    _pct(nov.ts_bigram),
                ]
            )
            + "\n"
        )

    if report.coords:
        lines = ["doc_id,sentence,kind,x,y"]
        for doc_id, idx, kind, x, y in report.coords:
            lines.append(f"{doc_id},{idx},{kind},{x!r},{y!r}")
        files["coords.csv"] = "\n".join(lines) + "\n"
    return files


def write_report(files: dict[str, str], outdir: str | Path) -> None:
    outdir = Path(outdir)
    for rel, content in files.items():
        path = outdir / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")
