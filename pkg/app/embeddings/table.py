"""Immutable monolingual word-embedding table."""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from app.core.exceptions import ContractError
from app.core.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class Neighbor:
    """A retrieved vocabulary word and its cosine similarity to the query."""

    word: str
    similarity: float


def fold_case(word: str, case_fold: bool) -> str:
    """Apply the case-folding policy to a word."""
    return word.lower() if case_fold else word


class EmbeddingTable:
    """Vocabulary-to-vector map for one language.

    Raw vectors are kept for alignment training; a unit-normalized copy backs
    cosine retrieval. Rows of zero norm stay loadable but are flagged in
    ``degenerate`` and never retrieved.
    """

    def __init__(
        self,
        language_tag: str,
        vocab: Sequence[str],
        vectors: np.ndarray,
        case_fold: bool = True,
        duplicates_skipped: int = 0,
    ) -> None:
        """
        Initialize embedding table.

        Args:
            language_tag: Language of the vocabulary (e.g. "en")
            vocab: Unique words, already case-folded when ``case_fold`` is set
            vectors: |vocab| x dim matrix of finite reals
            case_fold: Whether lookups fold queries to lower case
            duplicates_skipped: Duplicate lines dropped while building the table

        Raises:
            ContractError: If shapes disagree, words repeat or values are not finite
        """
        matrix = np.array(vectors, dtype=np.float64, copy=True)
        if matrix.ndim != 2:
            raise ContractError(f"vectors must be a 2-D matrix, got {matrix.ndim}-D")
        if matrix.shape[0] != len(vocab):
            raise ContractError(
                f"vocabulary has {len(vocab)} words but matrix has {matrix.shape[0]} rows"
            )
        if matrix.shape[1] < 1:
            raise ContractError("embedding dimension must be positive")
        if not np.all(np.isfinite(matrix)):
            raise ContractError("embedding vectors must be finite")

        index: Dict[str, int] = {}
        for i, word in enumerate(vocab):
            if word in index:
                raise ContractError(f"duplicate vocabulary word: {word!r}")
            index[word] = i

        norms = np.linalg.norm(matrix, axis=1)
        degenerate = norms == 0.0
        safe_norms = np.where(degenerate, 1.0, norms)
        unit = matrix / safe_norms[:, None]
        unit[degenerate] = 0.0

        for array in (matrix, unit, degenerate):
            array.setflags(write=False)

        self._language_tag = language_tag
        self._vocab = tuple(vocab)
        self._index = index
        self._vectors = matrix
        self._unit_vectors = unit
        self._degenerate = degenerate
        self._case_fold = case_fold
        self._duplicates_skipped = duplicates_skipped

        if degenerate.any():
            logger.warning(
                f"{int(degenerate.sum())} zero-norm vectors in '{language_tag}' table "
                f"are excluded from retrieval"
            )

    @classmethod
    def from_words(
        cls,
        language_tag: str,
        words: Iterable[str],
        vectors: np.ndarray,
        case_fold: bool = True,
    ) -> "EmbeddingTable":
        """
        Build a table from raw words, folding case and keeping first duplicates.

        Args:
            language_tag: Language of the vocabulary
            words: Words in row order (may repeat after folding)
            vectors: One row per word
            case_fold: Whether to fold words to lower case

        Returns:
            EmbeddingTable with duplicates dropped
        """
        matrix = np.asarray(vectors, dtype=np.float64)
        keep_words: List[str] = []
        keep_rows: List[int] = []
        seen: set = set()
        for row, word in enumerate(words):
            folded = fold_case(word, case_fold)
            if folded in seen:
                continue
            seen.add(folded)
            keep_words.append(folded)
            keep_rows.append(row)

        skipped = (matrix.shape[0] if matrix.ndim == 2 else 0) - len(keep_rows)
        dim = matrix.shape[1] if matrix.ndim == 2 else 0
        kept = matrix[keep_rows] if keep_rows else np.zeros((0, dim))
        return cls(language_tag, keep_words, kept, case_fold, skipped)

    @property
    def language_tag(self) -> str:
        """Language of the vocabulary."""
        return self._language_tag

    @property
    def dim(self) -> int:
        """Embedding dimension."""
        return int(self._vectors.shape[1])

    @property
    def vocab(self) -> tuple[str, ...]:
        """Words in row order."""
        return self._vocab

    @property
    def vectors(self) -> np.ndarray:
        """Raw vectors, read-only."""
        return self._vectors

    @property
    def unit_vectors(self) -> np.ndarray:
        """L2-normalized vectors (zero rows for degenerate entries), read-only."""
        return self._unit_vectors

    @property
    def degenerate(self) -> np.ndarray:
        """Boolean mask of zero-norm rows."""
        return self._degenerate

    @property
    def case_fold(self) -> bool:
        """Whether lookups fold queries to lower case."""
        return self._case_fold

    @property
    def duplicates_skipped(self) -> int:
        """Duplicate vocabulary lines dropped at load time."""
        return self._duplicates_skipped

    def __len__(self) -> int:
        return len(self._vocab)

    def __contains__(self, word: object) -> bool:
        return isinstance(word, str) and self.index_of(word) is not None

    def index_of(self, word: str) -> Optional[int]:
        """Row of ``word`` after case folding, or None if out of vocabulary."""
        return self._index.get(fold_case(word, self._case_fold))

    def __repr__(self) -> str:
        return (
            f"EmbeddingTable(language_tag={self._language_tag!r}, "
            f"size={len(self)}, dim={self.dim})"
        )


def lookup(table: EmbeddingTable, word: str) -> Optional[np.ndarray]:
    """
    Return the raw vector of ``word``, or None on a miss.

    Args:
        table: Embedding table
        word: Query word (case-folded according to the table's policy)

    Returns:
        Read-only raw vector, or None if the word is out of vocabulary
    """
    row = table.index_of(word)
    if row is None:
        return None
    return table.vectors[row]
