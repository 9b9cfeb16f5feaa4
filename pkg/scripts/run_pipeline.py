#!/usr/bin/env python3
"""End-to-end bias analysis on one corpus.

Encodes with the fallback encoder (or uses a supplied SAEM file), extracts
every registered algorithm plus the two aspect ensembles, evaluates, and
renders the report directory.

Example:
    python3 scripts/make_corpus.py --kind mixed --docs 200 --out /tmp/corpus.jsonl
    python3 scripts/run_pipeline.py --corpus /tmp/corpus.jsonl --outdir /tmp/run
"""

import argparse
import sys
from pathlib import Path

from sumaspect.cli import main as cli
from sumaspect.ensemble import ASP_POOL
from sumaspect.registry import ALGORITHMS


def run(argv):
    code = cli([str(a) for a in argv])
    if code != 0:
        sys.exit(code)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", required=True)
    parser.add_argument("--outdir", required=True)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--dim", type=int, default=64)
    parser.add_argument("--embeddings", default=None, help="existing SAEM file; skips encoding")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    emb = Path(args.embeddings) if args.embeddings else outdir / "corpus.saem"
    if not args.embeddings:
        run(["encode", "--corpus", args.corpus, "--out", emb, "--dim", args.dim,
             "--jobs", args.jobs])

    oracle = outdir / "sel_oracle.jsonl"
    run(["oracle", "--corpus", args.corpus, "--out", oracle, "--jobs", args.jobs])

    sel_files = {"oracle": oracle}
    for algo in ALGORITHMS:
        if algo == "oracle":
            continue
        out = outdir / f"sel_{algo}.jsonl"
        run(["extract", "--corpus", args.corpus, "--algorithm", algo,
             "--embeddings", emb, "--out", out, "--seed", args.seed,
             "--jobs", args.jobs])
        sel_files[algo] = out

    extractive = [a for a in ALGORITHMS if a not in ("random", "oracle")]
    for mode in ("rand", "topk"):
        asp_out = outdir / f"sel_ensemble_asp_{mode}.jsonl"
        run(["ensemble", "--selections", *[sel_files[a] for a in ASP_POOL],
             "--mode", mode, "--seed", args.seed, "--corpus", args.corpus,
             "--label", f"asp_{mode}", "--out", asp_out])
        sel_files[f"asp_{mode}"] = asp_out
        ext_out = outdir / f"sel_ensemble_ext_{mode}.jsonl"
        run(["ensemble", "--selections", *[sel_files[a] for a in extractive],
             "--mode", mode, "--seed", args.seed, "--corpus", args.corpus,
             "--label", f"ext_{mode}", "--out", ext_out])
        sel_files[f"ext_{mode}"] = ext_out

    metrics = outdir / "metrics.jsonl"
    run(["evaluate", "--corpus", args.corpus, "--embeddings", emb,
         "--selections", *sel_files.values(), "--oracle", oracle,
         "--out", metrics, "--jobs", args.jobs])

    run(["report", "--metrics", metrics, "--outdir", outdir / "report",
         "--corpus", args.corpus, "--embeddings", emb,
         "--selections", *sel_files.values(), "--oracle", oracle])
    print(f"report written to {outdir / 'report'}")
    print((outdir / "report" / "report.csv").read_text())


if __name__ == "__main__":
    main()
