"""Sub-aspect selectors: position, diversity (hull volume), importance.

Each selector returns a Selection holding min(k, N) distinct source
indices in ascending order. All tie-breaks go to the lowest index, which
makes every selector deterministic and invariant under uniform scaling of
the embeddings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Document
from .embedding import EmbeddingMatrix
from .errors import FormatError, ValidationError
from .geometry import pca2d, pearson_matrix, polygon_area, quickhull

POSITION_MODES = ("first", "last", "middle")
_AREA_EPS = 1e-12


@dataclass(frozen=True)
class Selection:
    """Chosen source-sentence indices for one document, with provenance."""

    doc_id: str
    algorithm: str
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if not idx:
            raise ValidationError(f"selection for {self.doc_id!r} is empty")
        if any(i < 0 for i in idx):
            raise ValidationError(f"selection for {self.doc_id!r} has negative indices")
        if len(set(idx)) != len(idx):
            raise ValidationError(f"selection for {self.doc_id!r} has duplicate indices")
        if list(idx) != sorted(idx):
            raise ValidationError(f"selection for {self.doc_id!r} is not sorted")
        object.__setattr__(self, "indices", idx)

    def as_set(self) -> frozenset[int]:
        return frozenset(self.indices)


def _finish(doc_id: str, algorithm: str, picked: list[int]) -> Selection:
    return Selection(doc_id, algorithm, tuple(sorted(picked)))


def select_position(doc: Document, k: int, mode: str) -> Selection:
    """First, last, or centered contiguous block of min(k, N) sentences."""
    if mode not in POSITION_MODES:
        raise ValidationError(f"unknown position mode {mode!r}")
    if k < 1:
        raise ValidationError("k must be >= 1")
    n = doc.n_source
    take = min(k, n)
    if mode == "first":
        picked = list(range(take))
    elif mode == "last":
        picked = list(range(n - take, n))
    else:
        start = max(0, (n - k) // 2) if k < n else 0
        picked = list(range(start, start + take))
    return _finish(doc.id, mode, picked)


def select_heuristic_volume(emb: EmbeddingMatrix, k: int) -> Selection:
    """Greedy volume heuristic in the raw embedding space.

    Seed with the sentence farthest from the centroid of all sentences,
    then repeatedly add the sentence farthest from the centroid of the
    chosen ones.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    rows = emb.source64()
    n = rows.shape[0]
    take = min(k, n)
    dist = np.linalg.norm(rows - rows.mean(axis=0), axis=1)
    picked = [int(np.argmax(dist))]
    chosen_mask = np.zeros(n, dtype=bool)
    chosen_mask[picked[0]] = True
    while len(picked) < take:
        centroid = rows[chosen_mask].mean(axis=0)
        dist = np.linalg.norm(rows - centroid, axis=1)
        dist[chosen_mask] = -np.inf
        nxt = int(np.argmax(dist))
        picked.append(nxt)
        chosen_mask[nxt] = True
    return _finish(emb.doc_id, "heuristic_volume", picked)


def _prune_step(projected: np.ndarray, working: list[int]) -> int:
    """Index (into the document) removed by one lowest-volume-reduction turn."""
    hull = quickhull(projected[working])
    candidates = [working[j] for j in hull.indices] if hull.indices else list(working)
    current = polygon_area(hull)
    if current <= _AREA_EPS:
        return min(candidates)
    best_idx = None
    best_ratio = None
    for cand in sorted(candidates):
        rest = [i for i in working if i != cand]
        remaining_area = polygon_area(quickhull(projected[rest]))
        ratio = (current - remaining_area) / current
        # ratios are scale-free; treat sub-1e-12 differences as ties so the
        # lowest index wins on symmetric configurations
        if best_ratio is None or ratio < best_ratio - 1e-12:
            best_ratio, best_idx = ratio, cand
    return int(best_idx)


def convexfall_removal_order(emb: EmbeddingMatrix, stop_len: int = 1) -> tuple[list[int], list[int]]:
    """Prune sentences by lowest hull-area reduction until ``stop_len`` remain.

    Returns (remaining, removed-in-order). Starting from all sentences and
    running to a single survivor yields the diversity ranking.
    """
    rows = emb.source64()
    projected = pca2d(rows).projected
    working = list(range(rows.shape[0]))
    removed: list[int] = []
    while len(working) > stop_len:
        gone = _prune_step(projected, working)
        working.remove(gone)
        removed.append(gone)
    return working, removed


def select_convexfall(emb: EmbeddingMatrix, k: int) -> Selection:
    """Hull pruning in 2D PCA space.

    Take the hull vertices; if more than k, prune the vertex whose removal
    costs the least relative area until k remain; if fewer, pad with the
    interior sentences closest to the projected centroid.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    rows = emb.source64()
    n = rows.shape[0]
    take = min(k, n)
    projected = pca2d(rows).projected
    hull = quickhull(projected)
    members = sorted(hull.indices)
    if len(members) > take:
        working = list(members)
        while len(working) > take:
            working.remove(_prune_step(projected, working))
        picked = working
    else:
        picked = list(members)
        if len(picked) < take:
            centroid = projected.mean(axis=0)
            dist = np.linalg.norm(projected - centroid, axis=1)
            pool = [i for i in range(n) if i not in hull.indices]
            pool.sort(key=lambda i: (dist[i], i))
            picked.extend(pool[: take - len(picked)])
    return _finish(emb.doc_id, "convexfall", picked)


def n_nearest_scores(emb: EmbeddingMatrix) -> np.ndarray:
    """Mean Pearson correlation of each sentence against all others."""
    rows = emb.source64()
    n = rows.shape[0]
    if n == 1:
        return np.zeros(1)
    corr = pearson_matrix(rows)
    np.fill_diagonal(corr, 0.0)
    return corr.sum(axis=1) / (n - 1)


def select_n_nearest(emb: EmbeddingMatrix, k: int) -> Selection:
    """Top-k sentences by mean correlation with the rest of the document."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    n = emb.n_source
    take = min(k, n)
    scores = n_nearest_scores(emb)
    order = sorted(range(n), key=lambda i: (-scores[i], i))
    return _finish(emb.doc_id, "n_nearest", order[:take])


def select_k_nearest(emb: EmbeddingMatrix, k: int, nearest: int = 5) -> Selection:
    """Repeatedly pick the sentence whose ``nearest`` pool-mates are closest.

    Distance is 1 - Pearson; each round the winner leaves the pool.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    if nearest < 1:
        raise ValidationError("K for k_nearest must be >= 1")
    rows = emb.source64()
    n = rows.shape[0]
    take = min(k, n)
    if n == 1:
        return _finish(emb.doc_id, "k_nearest", [0])
    dist = 1.0 - pearson_matrix(rows)
    pool = list(range(n))
    picked: list[int] = []
    for _ in range(take):
        best = None
        best_avg = None
        for cand in pool:
            mates = sorted((i for i in pool if i != cand), key=lambda i: (dist[cand][i], i))
            mates = mates[: min(nearest, len(pool) - 1)]
            avg = float(np.mean([dist[cand][i] for i in mates])) if mates else 0.0
            if best_avg is None or avg < best_avg - 1e-15 or (abs(avg - best_avg) <= 1e-15 and cand < best):
                best_avg, best = avg, cand
        picked.append(best)
        pool.remove(best)
    return _finish(emb.doc_id, "k_nearest", picked)


def write_selections(selections: list[Selection], path: str | Path) -> None:
    lines = [
        json.dumps(
            {"doc_id": s.doc_id, "algorithm": s.algorithm, "indices": list(s.indices)}
        )
        for s in selections
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_selections(path: str | Path) -> list[Selection]:
    path = Path(path)
    if not path.is_file():
        raise FormatError(f"selections file not found: {path}")
    out: list[Selection] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from exc
            try:
                out.append(
                    Selection(obj["doc_id"], obj["algorithm"], tuple(obj["indices"]))
                )
            except KeyError as exc:
                raise ValidationError(f"{path}:{lineno}: missing key {exc}") from exc
    return out
