"""Held-out translation retrieval diagnostics for a fitted map."""

from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from app.alignment.dictionary import BilingualDictionary
from app.alignment.linear_map import LinearMap, project
from app.core.exceptions import ContractError, DataError
from app.core.logging import get_logger
from app.embeddings.search import top_k
from app.embeddings.table import EmbeddingTable

logger = get_logger(__name__)


@dataclass(frozen=True)
class RetrievalReport:
    """Precision@k over held-out source words."""

    precision: float
    k: int
    evaluated_source_words: int
    hits: int
    oov_entries: int

    def as_fields(self) -> Dict[str, object]:
        """Report as ordered key-value fields."""
        return {
            "k": self.k,
            "precision_at_k": self.precision,
            "evaluated_source_words": self.evaluated_source_words,
            "hits": self.hits,
            "oov_entries": self.oov_entries,
        }


def evaluate_retrieval(
    linear_map: LinearMap,
    heldout: BilingualDictionary,
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    k: int,
) -> RetrievalReport:
    """
    Fraction of held-out source words whose gold target is among the k nearest
    target words of the projected source vector.

    A source word with several gold translations counts once and is a hit if
    any of them is retrieved. Entries with an out-of-vocabulary word are
    excluded from the denominator and counted.

    Raises:
        ContractError: If k is not positive or dimensions disagree
        DataError: If no held-out entry resolves
    """
    if k < 1:
        raise ContractError(f"k must be positive, got {k}")
    if (linear_map.d_src, linear_map.d_tgt) != (src.dim, tgt.dim):
        raise ContractError(
            f"map is {linear_map.d_tgt}x{linear_map.d_src} but tables are "
            f"{src.dim}->{tgt.dim}"
        )

    gold: Dict[str, set] = {}
    oov = 0
    for entry in heldout:
        if entry.source not in src or entry.target not in tgt:
            oov += 1
            continue
        gold.setdefault(entry.source, set()).add(tgt.vocab[tgt.index_of(entry.target)])

    if not gold:
        raise DataError(f"no resolvable held-out pairs ({oov} out-of-vocabulary)")

    hits = 0
    for source_word, targets in gold.items():
        projected = project(linear_map, src.vectors[src.index_of(source_word)])
        if not np.any(projected):
            continue
        retrieved: List[str] = [n.word for n in top_k(tgt, projected, k)]
        if targets.intersection(retrieved):
            hits += 1

    report = RetrievalReport(
        precision=hits / len(gold),
        k=k,
        evaluated_source_words=len(gold),
        hits=hits,
        oov_entries=oov,
    )
    if oov:
        logger.info(f"Excluded {oov} out-of-vocabulary held-out entries from precision@{k}")
    return report


def precision_at_k(
    linear_map: LinearMap,
    heldout: BilingualDictionary,
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    k: int,
) -> float:
    """
    Precision@k of held-out translation retrieval, in [0, 1].

    See ``evaluate_retrieval`` for the counting rules.
    """
    return evaluate_retrieval(linear_map, heldout, src, tgt, k).precision
