"""Classic non-neural extractive baselines: KMeans, MMR, LexRank, TextRank.

All four share the embedding substrate (cosine on embedding rows) except
TextRank, which works on token overlap. Randomness exists only in KMeans
and is keyed on (seed, doc id).
"""

from __future__ import annotations

import math

import numpy as np

from .corpus import Document, tokenize
from .embedding import EmbeddingMatrix
from .errors import ValidationError
from .aspects import Selection, _finish
from .seeding import rng_for

PAGERANK_DAMPING = 0.85
PAGERANK_TOL = 1e-10
PAGERANK_MAX_ITER = 1000
LEXRANK_THRESHOLD = 0.1
MMR_LAMBDA = 0.5
KMEANS_MAX_ITER = 100
KMEANS_SHIFT_TOL = 1e-8


def _cosine_matrix(rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1)
    safe = np.where(norms == 0.0, 1.0, norms)
    sims = (rows @ rows.T) / np.outer(safe, safe)
    sims[norms == 0.0, :] = 0.0
    sims[:, norms == 0.0] = 0.0
    return np.clip(sims, -1.0, 1.0)


def _cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def pagerank(transition: np.ndarray, damping: float = PAGERANK_DAMPING) -> np.ndarray:
    """Stationary scores of a row-stochastic transition matrix."""
    n = transition.shape[0]
    p = np.full(n, 1.0 / n)
    teleport = (1.0 - damping) / n
    for _ in range(PAGERANK_MAX_ITER):
        nxt = teleport + damping * (p @ transition)
        if np.abs(nxt - p).sum() < PAGERANK_TOL:
            return nxt
        p = nxt
    return p


def _top_k(doc_id: str, algorithm: str, scores: np.ndarray, k: int) -> Selection:
    # quantize so mathematically tied scores compare equal despite last-bit
    # float noise, keeping the lowest-index tie-break meaningful
    scores = np.round(scores, 12)
    n = len(scores)
    order = sorted(range(n), key=lambda i: (-scores[i], i))
    return _finish(doc_id, algorithm, order[: min(k, n)])


def _row_stochastic(weights: np.ndarray) -> np.ndarray:
    """Normalize rows to sum 1; rows with no mass become uniform."""
    n = weights.shape[0]
    sums = weights.sum(axis=1)
    out = np.empty_like(weights)
    for i in range(n):
        out[i] = weights[i] / sums[i] if sums[i] > 0.0 else np.full(n, 1.0 / n)
    return out


def select_lexrank(
    emb: EmbeddingMatrix,
    k: int,
    threshold: float = LEXRANK_THRESHOLD,
    damping: float = PAGERANK_DAMPING,
) -> Selection:
    """Degree-centrality ranking over the thresholded cosine similarity graph."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    rows = emb.source64()
    n = rows.shape[0]
    # hashed embeddings produce rational cosines that can land exactly on the
    # threshold; quantizing keeps the edge set stable under uniform scaling
    sims = np.round(_cosine_matrix(rows), 12)
    adjacency = (sims >= threshold).astype(np.float64)
    np.fill_diagonal(adjacency, 0.0)
    scores = pagerank(_row_stochastic(adjacency), damping)
    return _top_k(emb.doc_id, "lexrank", scores, k)


def select_textrank(doc: Document, k: int, damping: float = PAGERANK_DAMPING) -> Selection:
    """Token-overlap PageRank; no embeddings involved."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    token_lists = [tokenize(s) for s in doc.source]
    token_sets = [set(ts) for ts in token_lists]
    n = len(token_lists)
    weights = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            if not token_lists[i] or not token_lists[j]:
                continue
            shared = len(token_sets[i] & token_sets[j])
            if shared:
                denom = math.log(1 + len(token_lists[i])) + math.log(1 + len(token_lists[j]))
                weights[i, j] = weights[j, i] = shared / denom
    scores = pagerank(_row_stochastic(weights), damping)
    return _top_k(doc.id, "textrank", scores, k)


def select_mmr(emb: EmbeddingMatrix, k: int, lam: float = MMR_LAMBDA) -> Selection:
    """Maximal marginal relevance against the document centroid."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    if not 0.0 <= lam <= 1.0:
        raise ValidationError("mmr lambda must be in [0, 1]")
    rows = emb.source64()
    n = rows.shape[0]
    take = min(k, n)
    centroid = rows.mean(axis=0)
    relevance = np.array([_cosine(rows[i], centroid) for i in range(n)])
    sims = _cosine_matrix(rows)
    picked: list[int] = []
    remaining = set(range(n))
    while len(picked) < take:
        best, best_score = None, None
        for cand in sorted(remaining):
            if not picked:
                score = relevance[cand]  # first pick is pure relevance
            else:
                redundancy = max(sims[cand][j] for j in picked)
                score = lam * relevance[cand] - (1.0 - lam) * redundancy
            if best_score is None or score > best_score + 1e-15:
                best, best_score = cand, score
        picked.append(best)
        remaining.discard(best)
    return _finish(emb.doc_id, "mmr", picked)


def _kmeans_pp_centers(rows: np.ndarray, n_clusters: int, rng: np.random.Generator) -> np.ndarray:
    n = rows.shape[0]
    centers = [int(rng.integers(n))]
    d2 = np.sum((rows - rows[centers[0]]) ** 2, axis=1)
    while len(centers) < n_clusters:
        total = float(d2.sum())
        if total == 0.0:
            for i in range(n):
                if i not in centers:
                    centers.append(i)
                    break
        else:
            r = rng.random() * total
            cum = np.cumsum(d2)
            centers.append(int(np.searchsorted(cum, r, side="right")))
        d2 = np.minimum(d2, np.sum((rows - rows[centers[-1]]) ** 2, axis=1))
    return rows[centers].copy()


def select_kmeans(emb: EmbeddingMatrix, k: int, seed: int) -> Selection:
    """Lloyd's algorithm with k-means++ seeding.

    Clusters are ranked by size (ties by their smallest member); each
    contributes its member nearest the centroid, cycling to next-nearest
    members if some clusters came up empty.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    rows = emb.source64()
    n = rows.shape[0]
    take = min(k, n)
    if take == n:
        return _finish(emb.doc_id, "kmeans", list(range(n)))

    rng = rng_for(seed, "kmeans", emb.doc_id)
    centers = _kmeans_pp_centers(rows, take, rng)
    assign = np.full(n, -1, dtype=int)
    for _ in range(KMEANS_MAX_ITER):
        d2 = ((rows[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_assign = np.argmin(d2, axis=1)
        shift = 0.0
        new_centers = centers.copy()
        for c in range(take):
            members = np.nonzero(new_assign == c)[0]
            if len(members):
                new_centers[c] = rows[members].mean(axis=0)
                shift = max(shift, float(np.linalg.norm(new_centers[c] - centers[c])))
        stable = bool(np.array_equal(new_assign, assign))
        assign, centers = new_assign, new_centers
        if stable or shift < KMEANS_SHIFT_TOL:
            break

    clusters = []
    for c in range(take):
        members = sorted(np.nonzero(assign == c)[0].tolist())
        if members:
            dist = {i: float(np.linalg.norm(rows[i] - centers[c])) for i in members}
            # two-member clusters put both members at the exact same distance;
            # quantize relative distances so the index tie-break is stable
            scale = max(dist.values()) or 1.0
            ranked = sorted(members, key=lambda i: (round(dist[i] / scale, 9), i))
            clusters.append((len(members), members[0], ranked))
    clusters.sort(key=lambda t: (-t[0], t[1]))

    picked: list[int] = []
    depth = 0
    while len(picked) < take:
        advanced = False
        for _, _, ranked in clusters:
            if depth < len(ranked):
                advanced = True
                if ranked[depth] not in picked:
                    picked.append(ranked[depth])
                    if len(picked) == take:
                        break
        if not advanced:
            break
        depth += 1
    return _finish(emb.doc_id, "kmeans", picked)
