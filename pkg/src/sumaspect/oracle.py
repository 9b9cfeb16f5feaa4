"""Greedy oracle: the extractive upper-bound proxy.

Forward selection of source sentences maximizing the summary-level LCS
F-measure against the reference, stopping early when no addition strictly
improves the score. The oracle always contains at least one sentence so
sentence-overlap ratios stay well-defined.
"""

from __future__ import annotations

from .corpus import Document, tokenize
from .aspects import Selection
from .errors import ValidationError
from .rouge import rouge_l


def greedy_oracle(doc: Document, k: int, beta: float = 1.0) -> Selection:
    if k < 1:
        raise ValidationError("k must be >= 1")
    source_tokens = [tokenize(s) for s in doc.source]
    target_tokens = [tokenize(s) for s in doc.target]
    n = doc.n_source
    chosen: list[int] = []
    score = 0.0
    for _ in range(min(k, n)):
        best, best_score = None, score
        for cand in range(n):
            if cand in chosen:
                continue
            trial = sorted(chosen + [cand])  # document order keeps LCS canonical
            trial_score = rouge_l([source_tokens[i] for i in trial], target_tokens, beta)
            if trial_score > best_score:
                best, best_score = cand, trial_score
        if best is None:
            break
        chosen.append(best)
        score = best_score
    if not chosen:
        chosen = [0]
    return Selection(doc.id, "oracle", tuple(sorted(chosen)))
