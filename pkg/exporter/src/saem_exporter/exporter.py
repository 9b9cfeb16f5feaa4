"""Encode corpus sentences with a pretrained transformer into a SAEM file.

Sentences are lowercased, tokenized, and run through the encoder in eval
mode; a sentence vector is the mean of its last-hidden-layer token states,
excluding special begin/end tokens and padding. Inputs longer than
--max-length are truncated with a warning naming the document.

The output follows the SAEM v1 interchange contract: magic ``SAEM``, u32
version=1, u32 dim, then per document (ascending id byte order): u32 id
length, id bytes, u32 source row count, u32 target row count, and the
rows as little-endian float32, source rows first. dim is the model's
hidden size.
"""

from __future__ import annotations

import argparse
import json
import struct
import sys
from pathlib import Path

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

MAGIC = b"SAEM"
VERSION = 1


class ExportError(Exception):
    pass


def load_corpus(path: str | Path) -> list[dict]:
    """Read the corpus JSONL contract: {"id", "source", "target"} per line."""
    path = Path(path)
    if not path.is_file():
        raise ExportError(f"corpus file not found: {path}")
    docs = []
    seen = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ExportError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from exc
            for key in ("id", "source", "target"):
                if key not in obj:
                    raise ExportError(f"{path}:{lineno}: missing key {key!r}")
            if not obj["source"] or not obj["target"]:
                raise ExportError(f"{path}:{lineno}: document {obj['id']!r} has empty sentences")
            if obj["id"] in seen:
                raise ExportError(f"{path}:{lineno}: duplicate document id {obj['id']!r}")
            seen.add(obj["id"])
            docs.append({"id": obj["id"], "source": list(obj["source"]), "target": list(obj["target"])})
    if not docs:
        raise ExportError(f"{path}: corpus is empty")
    return docs


class SentenceEncoder:
    def __init__(self, model_name: str, max_length: int = 256):
        self.tokenizer = AutoTokenizer.from_pretrained(model_name)
        self.model = AutoModel.from_pretrained(model_name)
        self.model.eval()
        self.max_length = max_length
        self.hidden_size = int(self.model.config.hidden_size)

    def encode_batch(self, sentences: list[str]) -> np.ndarray:
        texts = [s.lower() for s in sentences]
        batch = self.tokenizer(
            texts,
            padding=True,
            truncation=True,
            max_length=self.max_length,
            return_tensors="pt",
            return_special_tokens_mask=True,
        )
        special = batch.pop("special_tokens_mask")
        with torch.no_grad():
            hidden = self.model(**batch).last_hidden_state
        keep = batch["attention_mask"] * (1 - special)
        keep = keep.unsqueeze(-1).to(hidden.dtype)
        summed = (hidden * keep).sum(dim=1)
        counts = keep.sum(dim=1).clamp(min=1.0)
        vectors = summed / counts
        # zero out rows that held no real tokens
        empty = keep.sum(dim=(1, 2)) == 0
        vectors[empty] = 0.0
        return vectors.numpy().astype(np.float32)

    def would_truncate(self, sentence: str) -> bool:
        ids = self.tokenizer(sentence.lower(), truncation=False)["input_ids"]
        return len(ids) > self.max_length


def export(
    corpus_path: str | Path,
    model_name: str,
    out_path: str | Path,
    batch_size: int = 32,
    max_length: int = 256,
) -> int:
    """Encode every source and target sentence and write the SAEM file.

    Returns the number of documents written.
    """
    if batch_size < 1:
        raise ExportError("--batch-size must be >= 1")
    if max_length < 8:
        raise ExportError("--max-length must be >= 8")
    docs = load_corpus(corpus_path)
    docs.sort(key=lambda d: d["id"].encode("utf-8"))
    try:
        encoder = SentenceEncoder(model_name, max_length)
    except Exception as exc:
        raise ExportError(f"could not load model {model_name!r}: {exc}") from exc

    flat: list[str] = []
    spans: list[tuple[str, int, int]] = []  # doc id, n source, n target
    for doc in docs:
        truncated = any(encoder.would_truncate(s) for s in doc["source"] + doc["target"])
        if truncated:
            print(
                f"warning: document {doc['id']!r} has sentences over "
                f"{max_length} tokens; truncating",
                file=sys.stderr,
            )
        flat.extend(doc["source"])
        flat.extend(doc["target"])
        spans.append((doc["id"], len(doc["source"]), len(doc["target"])))

    chunks = [
        encoder.encode_batch(flat[i : i + batch_size]) for i in range(0, len(flat), batch_size)
    ]
    vectors = np.concatenate(chunks, axis=0)

    out = bytearray()
    out += MAGIC
    out += struct.pack("<II", VERSION, encoder.hidden_size)
    offset = 0
    for doc_id, n_src, n_tgt in spans:
        id_bytes = doc_id.encode("utf-8")
        out += struct.pack("<I", len(id_bytes))
        out += id_bytes
        out += struct.pack("<II", n_src, n_tgt)
        block = vectors[offset : offset + n_src + n_tgt]
        out += np.ascontiguousarray(block, dtype="<f4").tobytes()
        offset += n_src + n_tgt
    Path(out_path).write_bytes(bytes(out))
    return len(spans)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="saem-export",
        description="Encode a corpus with a pretrained transformer into a SAEM file",
    )
    parser.add_argument("--corpus", required=True)
    parser.add_argument("--model", required=True, help="model name or local path")
    parser.add_argument("--out", required=True)
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--max-length", type=int, default=256)
    ns = parser.parse_args(argv)
    try:
        n = export(ns.corpus, ns.model, ns.out, ns.batch_size, ns.max_length)
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"exported {n} documents -> {ns.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
