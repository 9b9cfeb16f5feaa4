"""Offline transformer sentence-embedding exporter for SAEM files."""

from .exporter import ExportError, SentenceEncoder, export, load_corpus

__version__ = "0.1.0"
