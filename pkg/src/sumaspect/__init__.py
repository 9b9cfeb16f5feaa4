"""Corpus and system bias analysis toolkit for extractive summarization.

Three families of selectors (position, diversity, importance) plus classic
baselines and a greedy oracle, evaluated with ROUGE, convex-hull volume
overlap and oracle sentence overlap, aggregated into per-corpus bias
reports.
"""

from .corpus import Corpus, Document, load_corpus, split_sentences, tokenize
from .embedding import (
    EmbeddingMatrix,
    EmbeddingStore,
    encode_corpus,
    encode_fallback,
    read_embeddings,
    write_embeddings,
)
from .aspects import (
    Selection,
    select_convexfall,
    select_heuristic_volume,
    select_k_nearest,
    select_n_nearest,
    select_position,
)
from .baselines import select_kmeans, select_lexrank, select_mmr, select_textrank
from .oracle import greedy_oracle
from .rouge import RougeScore, rouge_all, rouge_l, rouge_n
from .metrics import (
    MetricRecord,
    evaluate_selections,
    ngram_novelty,
    oracle_recall,
    sentence_overlap,
    volume_overlap,
)
from .ensemble import combine
from .analysis import (
    BiasReport,
    build_report,
    position_histogram,
    render_report,
    select_random,
    triangle_coords,
    venn_regions,
    write_report,
)
from .registry import ALGORITHMS, SelectorParams, run_selector

__version__ = "0.1.0"
