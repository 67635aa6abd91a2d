"""Monolingual word-embedding tables and cosine retrieval."""

from app.embeddings.loader import (
    load_embeddings,
    parse_embeddings,
    save_embeddings,
    serialize_embeddings,
)
from app.embeddings.search import cosine, neighbors_above, similarities, top_k
from app.embeddings.table import EmbeddingTable, Neighbor, lookup

__all__ = [
    "EmbeddingTable",
    "Neighbor",
    "cosine",
    "load_embeddings",
    "lookup",
    "neighbors_above",
    "parse_embeddings",
    "save_embeddings",
    "serialize_embeddings",
    "similarities",
    "top_k",
]
