"""Corpus loading, validation, and tokenization.

A corpus is a JSONL file, one document per line, with keys
``{"id": str, "source": [str, ...], "target": [str, ...]}``. Unknown keys
are ignored. Documents are immutable after construction.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import FormatError, ValidationError

# Maximal runs of alphanumeric characters (unicode-aware, underscore excluded).
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
# Split points: '.', '!' or '?' followed by whitespace or end of text.
_SENT_SPLIT_RE = re.compile(r"(?<=[.!?])(?:\s+|$)")


@dataclass(frozen=True)
class Document:
    """One source document plus its reference summary, pre-split into sentences."""

    id: str
    source: tuple[str, ...]
    target: tuple[str, ...]

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ValidationError("document id must be a non-empty string")
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        for label, sents in (("source", self.source), ("target", self.target)):
            if len(sents) == 0:
                raise ValidationError(f"document {self.id!r}: empty {label}")
            for s in sents:
                if not isinstance(s, str) or not s.strip():
                    raise ValidationError(
                        f"document {self.id!r}: blank sentence in {label}"
                    )

    @property
    def n_source(self) -> int:
        return len(self.source)

    @property
    def k_ref(self) -> int:
        """Number of reference-summary sentences; the default selection budget."""
        return len(self.target)


@dataclass(frozen=True)
class Corpus:
    name: str
    documents: tuple[Document, ...]

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))
        if not self.documents:
            raise ValidationError(f"corpus {self.name!r} has no documents")
        seen: set[str] = set()
        for doc in self.documents:
            if doc.id in seen:
                raise ValidationError(f"duplicate document id {doc.id!r}")
            seen.add(doc.id)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def by_id(self, doc_id: str) -> Document:
        for doc in self.documents:
            if doc.id == doc_id:
                return doc
        raise ValidationError(f"unknown document id {doc_id!r}")


def tokenize(sentence: str) -> list[str]:
    """Lowercase and split into maximal alphanumeric runs.

    Punctuation-only input yields an empty list.
    """
    return _TOKEN_RE.findall(sentence.lower())


def split_sentences(text: str) -> list[str]:
    """Split raw text on sentence terminators; trims and drops empties.

    Convenience for corpora delivered as flat text, not used on the
    evaluation path (corpora are expected pre-segmented).
    """
    parts = [p.strip() for p in _SENT_SPLIT_RE.split(text)]
    return [p for p in parts if p]


def load_corpus(
    path: str | Path,
    name: str | None = None,
    max_source_sentences: int | None = None,
) -> Corpus:
    """Load and validate a JSONL corpus, preserving line order.

    ``max_source_sentences`` optionally truncates each document's source to
    its first M sentences (for corpora with very long inputs).
    """
    path = Path(path)
    if max_source_sentences is not None and max_source_sentences < 1:
        raise ValidationError("--max-source-sentences must be >= 1")
    if not path.is_file():
        raise FormatError(f"corpus file not found: {path}")
    documents: list[Document] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise FormatError(f"{path}:{lineno}: expected a JSON object")
            for key in ("id", "source", "target"):
                if key not in obj:
                    raise ValidationError(f"{path}:{lineno}: missing key {key!r}")
            source = obj["source"]
            if not isinstance(source, list) or not isinstance(obj["target"], list):
                raise ValidationError(
                    f"{path}:{lineno}: source/target must be lists of sentences"
                )
            if max_source_sentences is not None:
                source = source[:max_source_sentences]
            documents.append(Document(obj["id"], tuple(source), tuple(obj["target"])))
    return Corpus(name or path.stem, tuple(documents))
