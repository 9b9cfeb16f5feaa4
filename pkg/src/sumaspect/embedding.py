"""Sentence embedding matrices and the SAEM binary interchange format.

Embeddings are 32-bit floats on disk and in the in-memory matrices;
geometry and statistics promote to 64-bit at the point of use. The
fallback encoder is feature hashing with sign bits, so it needs no corpus
state and no model weights: a document's vectors never change when the
corpus around it grows.

SAEM layout (little-endian): magic ``SAEM``, u32 version=1, u32 dim, then
one record per document sorted ascending by UTF-8 id bytes: u32 id
length, id bytes, u32 source row count, u32 target row count, then
(source+target) x dim float32 values, source rows first.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Corpus, Document, tokenize
from .errors import FormatError, ValidationError

MAGIC = b"SAEM"
VERSION = 1
DEFAULT_DIM = 64

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash, the token hash behind the fallback encoder."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Per-document sentence vectors: source rows plus target-summary rows."""

    doc_id: str
    rows: np.ndarray
    target_rows: np.ndarray

    def __post_init__(self):
        # float32 is the interchange precision; float64 inputs are kept
        # exact so directly constructed geometry is not quantized.
        def coerce(arr):
            arr = np.asarray(arr)
            return arr if arr.dtype == np.float64 else arr.astype(np.float32)

        rows = coerce(self.rows)
        target = coerce(self.target_rows)
        if rows.ndim != 2 or target.ndim != 2:
            raise ValidationError(f"embeddings for {self.doc_id!r} must be 2-D")
        if rows.shape[1] != target.shape[1]:
            raise ValidationError(
                f"embeddings for {self.doc_id!r}: source dim {rows.shape[1]} "
                f"!= target dim {target.shape[1]}"
            )
        if rows.shape[1] == 0:
            raise ValidationError(f"embeddings for {self.doc_id!r}: dim must be > 0")
        if rows.dtype != target.dtype:
            target = target.astype(rows.dtype)
        if not (np.isfinite(rows).all() and np.isfinite(target).all()):
            raise ValidationError(f"embeddings for {self.doc_id!r} contain NaN/Inf")
        rows.setflags(write=False)
        target.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "target_rows", target)

    @property
    def dim(self) -> int:
        return self.rows.shape[1]

    @property
    def n_source(self) -> int:
        return self.rows.shape[0]

    def source64(self) -> np.ndarray:
        return self.rows.astype(np.float64)

    def target64(self) -> np.ndarray:
        return self.target_rows.astype(np.float64)


@dataclass
class EmbeddingStore:
    """Read-only map doc id -> EmbeddingMatrix with one shared dim."""

    dim: int
    matrices: dict[str, EmbeddingMatrix] = field(default_factory=dict)

    def __post_init__(self):
        for mat in self.matrices.values():
            if mat.dim != self.dim:
                raise ValidationError(
                    f"store dim {self.dim} != dim {mat.dim} of document {mat.doc_id!r}"
                )

    def get(self, doc_id: str) -> EmbeddingMatrix:
        try:
            return self.matrices[doc_id]
        except KeyError:
            raise ValidationError(f"no embeddings for document {doc_id!r}") from None

    def __len__(self) -> int:
        return len(self.matrices)


def _hashed_token_update(acc: np.ndarray, token: str, dim: int) -> None:
    h = fnv1a64(token.encode("utf-8"))
    sign = -1.0 if (h >> 63) & 1 else 1.0
    acc[h % dim] += sign


def encode_sentence(sentence: str, dim: int) -> np.ndarray:
    """Hash-embed one sentence: mean of per-token signed one-hot vectors, L2-normalized.

    Tokens are accumulated in sentence order so the arithmetic is identical
    across platforms. An empty token list gives the zero vector.
    """
    acc = np.zeros(dim, dtype=np.float64)
    tokens = tokenize(sentence)
    for tok in tokens:
        _hashed_token_update(acc, tok, dim)
    if tokens:
        acc /= len(tokens)
        norm = float(np.sqrt(np.dot(acc, acc)))
        if norm > 0.0:
            acc /= norm
    return acc


def encode_fallback(doc: Document, dim: int = DEFAULT_DIM) -> EmbeddingMatrix:
    """Deterministic model-free encoder for source and target sentences."""
    if dim < 2:
        raise ValidationError("embedding dim must be >= 2")
    rows = np.stack([encode_sentence(s, dim) for s in doc.source])
    target = np.stack([encode_sentence(s, dim) for s in doc.target])
    return EmbeddingMatrix(doc.id, rows.astype(np.float32), target.astype(np.float32))


def encode_corpus(corpus: Corpus, dim: int = DEFAULT_DIM) -> EmbeddingStore:
    return EmbeddingStore(
        dim, {doc.id: encode_fallback(doc, dim) for doc in corpus}
    )


def write_embeddings(store: EmbeddingStore, path: str | Path) -> None:
    """Serialize a store to a SAEM file; ``read_embeddings`` inverts it exactly."""
    if len(store) == 0:
        raise ValidationError("refusing to write an empty embedding store")
    for mat in store.matrices.values():
        if mat.dim != store.dim:
            raise ValidationError(
                f"store dim {store.dim} != dim {mat.dim} of document {mat.doc_id!r}"
            )
    out = bytearray()
    out += MAGIC
    out += struct.pack("<II", VERSION, store.dim)
    for doc_id in sorted(store.matrices, key=lambda s: s.encode("utf-8")):
        mat = store.matrices[doc_id]
        id_bytes = doc_id.encode("utf-8")
        out += struct.pack("<I", len(id_bytes))
        out += id_bytes
        out += struct.pack("<II", mat.rows.shape[0], mat.target_rows.shape[0])
        block = np.concatenate([mat.rows, mat.target_rows], axis=0)
        out += np.ascontiguousarray(block, dtype="<f4").tobytes()
    Path(path).write_bytes(bytes(out))


def read_embeddings(path: str | Path, corpus: Corpus) -> EmbeddingStore:
    """Parse a SAEM file and check it against the corpus it claims to embed.

    The file must cover exactly the corpus's document ids, with per-document
    row counts matching the document's sentence counts.
    """
    path = Path(path)
    if not path.is_file():
        raise FormatError(f"embedding file not found: {path}")
    data = path.read_bytes()

    def need(offset: int, count: int) -> None:
        if offset + count > len(data):
            raise FormatError(
                f"{path}: truncated at byte {len(data)} (needed {offset + count})"
            )

    need(0, 12)
    if data[:4] != MAGIC:
        raise FormatError(f"{path}: bad magic {data[:4]!r}, expected {MAGIC!r}")
    version, dim = struct.unpack_from("<II", data, 4)
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if dim == 0:
        raise FormatError(f"{path}: dim is 0")

    docs = {doc.id: doc for doc in corpus}
    matrices: dict[str, EmbeddingMatrix] = {}
    offset = 12
    while offset < len(data):
        need(offset, 4)
        (id_len,) = struct.unpack_from("<I", data, offset)
        offset += 4
        need(offset, id_len)
        doc_id = data[offset : offset + id_len].decode("utf-8")
        offset += id_len
        need(offset, 8)
        n_source, n_target = struct.unpack_from("<II", data, offset)
        offset += 8
        n_floats = (n_source + n_target) * dim
        need(offset, 4 * n_floats)
        block = np.frombuffer(data, dtype="<f4", count=n_floats, offset=offset)
        offset += 4 * n_floats
        block = block.reshape(n_source + n_target, dim)
        if doc_id in matrices:
            raise FormatError(f"{path}: duplicate record for document {doc_id!r}")
        doc = docs.get(doc_id)
        if doc is None:
            raise ValidationError(
                f"{path}: document {doc_id!r} not present in the corpus"
            )
        if n_source != doc.n_source or n_target != doc.k_ref:
            raise ValidationError(
                f"{path}: document {doc_id!r} has {n_source}/{n_target} rows "
                f"but the corpus has {doc.n_source}/{doc.k_ref} sentences"
            )
        matrices[doc_id] = EmbeddingMatrix(doc_id, block[:n_source], block[n_source:])
    missing = sorted(set(docs) - set(matrices))
    if missing:
        raise ValidationError(f"{path}: no embeddings for documents {missing}")
    return EmbeddingStore(dim, matrices)
