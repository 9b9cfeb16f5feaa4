"""ROUGE-1, ROUGE-2 and summary-level ROUGE-L F-measures.

N-grams are formed within sentences only, with multiset counts clipped
against the reference. ROUGE-L treats the candidate as one token sequence
and matches each reference sentence against it by LCS, summing the match
sizes. No stemming, no stopword removal; F-measure uses beta=1 by default
so the three scores average on equal footing.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

TokenSentences = Sequence[Sequence[str]]


@dataclass(frozen=True)
class RougeScore:
    r1: float
    r2: float
    rl: float
    mean: float


def _ngram_counts(sents: TokenSentences, n: int) -> Counter:
    counts: Counter = Counter()
    for sent in sents:
        for i in range(len(sent) - n + 1):
            counts[tuple(sent[i : i + n])] += 1
    return counts


def _fbeta(precision: float, recall: float, beta: float) -> float:
    denom = recall + beta * beta * precision
    if denom == 0.0:
        return 0.0
    return (1.0 + beta * beta) * precision * recall / denom


def _rouge_n_stats(candidate: TokenSentences, reference: TokenSentences, n: int) -> tuple[int, int, int]:
    cand = _ngram_counts(candidate, n)
    ref = _ngram_counts(reference, n)
    matched = sum(min(count, ref[gram]) for gram, count in cand.items())
    return matched, sum(cand.values()), sum(ref.values())


def rouge_n(candidate: TokenSentences, reference: TokenSentences, n: int, beta: float = 1.0) -> float:
    """Clipped n-gram overlap F-measure for n in {1, 2}."""
    if n not in (1, 2):
        raise ValueError("rouge_n supports n in {1, 2}")
    matched, n_cand, n_ref = _rouge_n_stats(candidate, reference, n)
    if n_cand == 0 or n_ref == 0:
        return 0.0
    return _fbeta(matched / n_cand, matched / n_ref, beta)


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Longest common subsequence length, two-row dynamic program."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            if x == y:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def rouge_l(candidate: TokenSentences, reference: TokenSentences, beta: float = 1.0) -> float:
    """Summary-level LCS F-measure.

    Each reference sentence is matched by LCS against the candidate's full
    token sequence; the match total is clipped at the candidate length so
    duplicated reference content cannot push the F-measure past 1.
    """
    cand_tokens = [tok for sent in candidate for tok in sent]
    n_cand = len(cand_tokens)
    n_ref = sum(len(sent) for sent in reference)
    if n_cand == 0 or n_ref == 0:
        return 0.0
    matched = sum(lcs_length(sent, cand_tokens) for sent in reference)
    matched = min(matched, n_cand)
    return _fbeta(matched / n_cand, matched / n_ref, beta)


def rouge_all(candidate: TokenSentences, reference: TokenSentences, beta: float = 1.0) -> RougeScore:
    r1 = rouge_n(candidate, reference, 1, beta)
    r2 = rouge_n(candidate, reference, 2, beta)
    rl = rouge_l(candidate, reference, beta)
    return RougeScore(r1=r1, r2=r2, rl=rl, mean=(r1 + r2 + rl) / 3.0)
