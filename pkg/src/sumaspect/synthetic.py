"""Synthetic corpus generators for tests, demos and acceptance runs.

All generators are pure functions of their seed. Tokens are plain
alphanumeric words so the tokenizer passes them through unchanged.
"""

from __future__ import annotations

import json
from pathlib import Path

from .corpus import Corpus, Document
from .seeding import rng_for


def _sentence(prefix: str, rng, vocab: list[str], n_tokens: int, unique_frac: float) -> str:
    words = []
    for t in range(n_tokens):
        if rng.random() < unique_frac:
            words.append(f"{prefix}w{t}")
        else:
            words.append(vocab[int(rng.integers(len(vocab)))])
    return " ".join(words) + "."


def make_perfect_copy_corpus(n_docs: int = 100, seed: int = 7) -> Corpus:
    """Targets are verbatim copies of k randomly chosen source sentences.

    Sentences use disjoint vocabularies so the greedy oracle recovers the
    copied set exactly.
    """
    rng = rng_for(seed, "perfect-copy")
    docs = []
    for d in range(n_docs):
        n = int(rng.integers(5, 13))
        k = int(rng.integers(1, min(4, n) + 1))
        source = [
            " ".join(f"d{d}s{s}t{t}" for t in range(int(rng.integers(4, 9)))) + "."
            for s in range(n)
        ]
        copied = sorted(rng.choice(n, size=k, replace=False).tolist())
        docs.append(Document(f"doc{d:04d}", tuple(source), tuple(source[i] for i in copied)))
    return Corpus("perfect-copy", tuple(docs))


def make_positional_corpus(
    n_docs: int = 500,
    seed: int = 11,
    tail: bool = False,
    dropout: float = 0.25,
) -> Corpus:
    """Targets paraphrase the first (or last) k sentences by token dropout."""
    rng = rng_for(seed, "positional", "tail" if tail else "lead")
    shared = [f"v{j}" for j in range(40)]
    docs = []
    for d in range(n_docs):
        n = int(rng.integers(8, 15))
        k = int(rng.integers(1, 4))
        source = [
            _sentence(f"d{d}s{s}", rng, shared, int(rng.integers(6, 13)), unique_frac=0.7)
            for s in range(n)
        ]
        picked = list(range(n - k, n)) if tail else list(range(k))
        target = []
        for i in picked:
            tokens = source[i].rstrip(".").split()
            kept = [t for t in tokens if rng.random() >= dropout]
            if not kept:
                kept = [tokens[0]]
            target.append(" ".join(kept) + ".")
        docs.append(Document(f"doc{d:04d}", tuple(source), tuple(target)))
    return Corpus("tail-biased" if tail else "lead-biased", tuple(docs))


def make_mixed_corpus(n_docs: int = 200, seed: int = 3) -> Corpus:
    """General-purpose corpus: shared vocabulary, varied lengths, noisy targets."""
    rng = rng_for(seed, "mixed")
    shared = [f"m{j}" for j in range(60)]
    docs = []
    for d in range(n_docs):
        n = int(rng.integers(5, 18))
        k = int(rng.integers(1, 5))
        source = [
            _sentence(f"d{d}s{s}", rng, shared, int(rng.integers(5, 12)), unique_frac=0.35)
            for s in range(n)
        ]
        target = []
        for i in sorted(rng.choice(n, size=min(k, n), replace=False).tolist()):
            tokens = source[i].rstrip(".").split()
            kept = [t for t in tokens if rng.random() >= 0.3]
            kept += [shared[int(rng.integers(len(shared)))] for _ in range(int(rng.integers(0, 3)))]
            if not kept:
                kept = tokens[:1]
            target.append(" ".join(kept) + ".")
        docs.append(Document(f"doc{d:04d}", tuple(source), tuple(target)))
    return Corpus("mixed", tuple(docs))


def write_corpus_jsonl(corpus: Corpus, path: str | Path) -> None:
    lines = [
        json.dumps({"id": doc.id, "source": list(doc.source), "target": list(doc.target)})
        for doc in corpus
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
