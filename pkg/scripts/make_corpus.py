#!/usr/bin/env python3
"""Write one of the bundled synthetic corpora to a JSONL file.

Example:
    python3 scripts/make_corpus.py --kind mixed --docs 200 --seed 3 --out corpus.jsonl
"""

import argparse

from sumaspect.synthetic import (
    make_mixed_corpus,
    make_perfect_copy_corpus,
    make_positional_corpus,
    write_corpus_jsonl,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kind", choices=["mixed", "perfect-copy", "lead", "tail"], default="mixed")
    parser.add_argument("--docs", type=int, default=200)
    parser.add_argument("--seed", type=int, default=3)
    parser.add_argument("--out", required=True)
    args = parser.parse_args()

    if args.kind == "mixed":
        corpus = make_mixed_corpus(args.docs, seed=args.seed)
    elif args.kind == "perfect-copy":
        corpus = make_perfect_copy_corpus(args.docs, seed=args.seed)
    else:
        corpus = make_positional_corpus(args.docs, seed=args.seed, tail=args.kind == "tail")
    write_corpus_jsonl(corpus, args.out)
    print(f"wrote {len(corpus)} documents to {args.out}")


if __name__ == "__main__":
    main()
