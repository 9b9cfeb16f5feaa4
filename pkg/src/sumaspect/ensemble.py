"""Combine several systems' selections for one document.

``topk`` keeps the indices picked by the most systems, ``rand`` samples
uniformly from the union; both stay inside the union and emit
min(k, |union|) indices. The random stream is keyed on (seed, doc id) so
corpus-level parallelism cannot change results.
"""

from __future__ import annotations

from collections import Counter

from .aspects import Selection
from .errors import ValidationError
from .seeding import rng_for

ENSEMBLE_MODES = ("rand", "topk")
# Conventional pools: "asp" combines the best algorithm of each sub-aspect,
# "ext" combines every extractive system registered in a run.
ASP_POOL = ("first", "convexfall", "n_nearest")


def combine(
    selections: list[Selection],
    k: int,
    mode: str,
    seed: int = 42,
    label: str | None = None,
) -> Selection:
    if not selections:
        raise ValidationError("cannot combine an empty selection list")
    if len(selections) < 2:
        raise ValidationError("ensemble needs at least two input selections")
    if mode not in ENSEMBLE_MODES:
        raise ValidationError(f"unknown ensemble mode {mode!r}")
    if k < 1:
        raise ValidationError("k must be >= 1")
    doc_id = selections[0].doc_id
    if any(s.doc_id != doc_id for s in selections):
        raise ValidationError("ensemble inputs must share one document")

    union = sorted(set().union(*(s.as_set() for s in selections)))
    take = min(k, len(union))
    if mode == "topk":
        counts = Counter()
        for s in selections:
            counts.update(s.indices)
        ranked = sorted(union, key=lambda i: (-counts[i], i))
        picked = ranked[:take]
    else:
        rng = rng_for(seed, "ensemble", doc_id)
        picked = [union[j] for j in rng.choice(len(union), size=take, replace=False)]
    return Selection(doc_id, label or f"ensemble_{mode}", tuple(sorted(picked)))
