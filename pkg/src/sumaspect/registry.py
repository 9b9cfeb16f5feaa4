"""Name registry dispatching to every extractive selector in the toolkit."""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Document
from .embedding import EmbeddingMatrix
from .errors import ValidationError
from .aspects import (
    Selection,
    select_convexfall,
    select_heuristic_volume,
    select_k_nearest,
    select_n_nearest,
    select_position,
)
from .analysis import select_random
from .baselines import (
    LEXRANK_THRESHOLD,
    MMR_LAMBDA,
    PAGERANK_DAMPING,
    select_kmeans,
    select_lexrank,
    select_mmr,
    select_textrank,
)
from .oracle import greedy_oracle

ALGORITHMS = (
    "first",
    "last",
    "middle",
    "heuristic_volume",
    "convexfall",
    "n_nearest",
    "k_nearest",
    "kmeans",
    "mmr",
    "textrank",
    "lexrank",
    "random",
    "oracle",
)

EMBEDDING_ALGORITHMS = frozenset(
    {"heuristic_volume", "convexfall", "n_nearest", "k_nearest", "kmeans", "mmr", "lexrank"}
)


@dataclass(frozen=True)
class SelectorParams:
    seed: int = 42
    knn_k: int = 5
    mmr_lambda: float = MMR_LAMBDA
    lexrank_threshold: float = LEXRANK_THRESHOLD
    damping: float = PAGERANK_DAMPING
    rouge_beta: float = 1.0


def needs_embeddings(algorithm: str) -> bool:
    return algorithm in EMBEDDING_ALGORITHMS


def run_selector(
    algorithm: str,
    doc: Document,
    emb: EmbeddingMatrix | None,
    k: int,
    params: SelectorParams = SelectorParams(),
) -> Selection:
    if algorithm not in ALGORITHMS:
        raise ValidationError(
            f"unknown algorithm {algorithm!r}; available: {', '.join(ALGORITHMS)}"
        )
    if needs_embeddings(algorithm) and emb is None:
        raise ValidationError(f"algorithm {algorithm!r} needs an embedding file")
    if algorithm in ("first", "last", "middle"):
        return select_position(doc, k, algorithm)
    if algorithm == "heuristic_volume":
        return select_heuristic_volume(emb, k)
    if algorithm == "convexfall":
        return select_convexfall(emb, k)
    if algorithm == "n_nearest":
        return select_n_nearest(emb, k)
    if algorithm == "k_nearest":
        return select_k_nearest(emb, k, params.knn_k)
    if algorithm == "kmeans":
        return select_kmeans(emb, k, params.seed)
    if algorithm == "mmr":
        return select_mmr(emb, k, params.mmr_lambda)
    if algorithm == "textrank":
        return select_textrank(doc, k, params.damping)
    if algorithm == "lexrank":
        return select_lexrank(emb, k, params.lexrank_threshold, params.damping)
    if algorithm == "random":
        return select_random(doc, k, params.seed)
    return greedy_oracle(doc, k, params.rouge_beta)
