"""Cosine similarity and exhaustive nearest-neighbor retrieval."""

from typing import List

import numpy as np

from app.core.exceptions import ContractError, DomainError
from app.embeddings.table import EmbeddingTable, Neighbor


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """
    Cosine similarity between two vectors.

    Args:
        u: First vector
        v: Second vector of the same length

    Returns:
        u.v / (|u| |v|), clipped to [-1, 1]

    Raises:
        DomainError: If either vector has zero norm
        ContractError: If the vectors differ in length
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ContractError(f"cosine of vectors with shapes {u.shape} and {v.shape}")

    norm_u = np.linalg.norm(u)
    norm_v = np.linalg.norm(v)
    if norm_u == 0.0 or norm_v == 0.0:
        raise DomainError("cosine undefined for a zero-norm vector")

    return float(np.clip(np.dot(u, v) / (norm_u * norm_v), -1.0, 1.0))


def similarities(table: EmbeddingTable, query: np.ndarray) -> np.ndarray:
    """
    Cosine similarity of ``query`` against every vocabulary row.

    Degenerate rows get -inf so that no threshold or ranking selects them.

    Args:
        table: Embedding table
        query: Query vector of the table's dimension

    Returns:
        Array of |vocab| similarities

    Raises:
        ContractError: If the query has the wrong dimension
        DomainError: If the query has zero norm
    """
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (table.dim,):
        raise ContractError(
            f"query has shape {q.shape}, expected ({table.dim},) for '{table.language_tag}'"
        )
    norm = np.linalg.norm(q)
    if norm == 0.0:
        raise DomainError("nearest-neighbor query has zero norm")

    sims = np.clip(table.unit_vectors @ (q / norm), -1.0, 1.0)
    sims[table.degenerate] = -np.inf
    return sims


def _ranked(table: EmbeddingTable, sims: np.ndarray, order: np.ndarray) -> List[Neighbor]:
    return [Neighbor(table.vocab[i], float(sims[i])) for i in order]


def _ranking(sims: np.ndarray) -> np.ndarray:
    # Descending similarity, ties by vocabulary order
    rows = np.arange(sims.shape[0])
    return np.lexsort((rows, -sims))


def neighbors_above(
    table: EmbeddingTable, query: np.ndarray, lambda_threshold: float
) -> List[Neighbor]:
    """
    All vocabulary words whose cosine with ``query`` is strictly above the threshold.

    Args:
        table: Target embedding table
        query: Query vector
        lambda_threshold: Threshold in (0, 1]

    Returns:
        Neighbors sorted by similarity descending, ties by vocabulary order

    Raises:
        ContractError: If the threshold is outside (0, 1] or the query has the wrong dimension
        DomainError: If the query has zero norm
    """
    if not 0.0 < lambda_threshold <= 1.0:
        raise ContractError(f"lambda must lie in (0, 1], got {lambda_threshold}")

    sims = similarities(table, query)
    selected = np.flatnonzero(sims > lambda_threshold)
    order = selected[_ranking(sims[selected])]
    return _ranked(table, sims, order)


def top_k(table: EmbeddingTable, query: np.ndarray, k: int) -> List[Neighbor]:
    """
    The ``k`` most similar vocabulary words (fewer if the table is smaller).

    Args:
        table: Target embedding table
        query: Query vector
        k: Number of neighbors, positive

    Returns:
        Neighbors sorted by similarity descending, ties by vocabulary order

    Raises:
        ContractError: If k is not positive or the query has the wrong dimension
        DomainError: If the query has zero norm
    """
    if k < 1:
        raise ContractError(f"k must be positive, got {k}")

    sims = similarities(table, query)
    order = _ranking(sims)
    order = order[~table.degenerate[order]][:k]
    return _ranked(table, sims, order)
