"""Bilingual dictionaries: ordered (source, target) translation pairs."""

from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Sequence, TextIO

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.config import settings
from app.core.exceptions import ParseError
from app.core.logging import get_logger
from app.embeddings.table import fold_case

logger = get_logger(__name__)


class DictionaryEntry(BaseModel):
    """Single translation pair."""

    model_config = ConfigDict(frozen=True)

    source: str
    target: str
    frequency_rank: Optional[int] = None


class BilingualDictionary:
    """Ordered translation pairs used to fit a linear map.

    A source word may repeat with different targets; an exact duplicate
    (source, target) pair is dropped and counted.
    """

    def __init__(self, entries: Iterable[DictionaryEntry]) -> None:
        """
        Initialize dictionary.

        Args:
            entries: Translation pairs in order
        """
        kept: List[DictionaryEntry] = []
        seen: set = set()
        duplicates = 0
        for entry in entries:
            key = (entry.source, entry.target)
            if key in seen:
                duplicates += 1
                continue
            seen.add(key)
            kept.append(entry)

        self.entries: tuple[DictionaryEntry, ...] = tuple(kept)
        self.duplicates_skipped = duplicates

    @classmethod
    def from_pairs(
        cls, pairs: Iterable[tuple[str, str]], ranks: Optional[Sequence[int]] = None
    ) -> "BilingualDictionary":
        """
        Build a dictionary from plain (source, target) tuples.

        Args:
            pairs: Translation pairs
            ranks: Optional frequency rank per pair

        Returns:
            BilingualDictionary
        """
        pair_list = list(pairs)
        rank_list = list(ranks) if ranks is not None else [None] * len(pair_list)
        return cls(
            DictionaryEntry(source=s, target=t, frequency_rank=r)
            for (s, t), r in zip(pair_list, rank_list)
        )

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[DictionaryEntry]:
        return iter(self.entries)

    def pairs(self) -> List[tuple[str, str]]:
        """Return the (source, target) tuples in order."""
        return [(e.source, e.target) for e in self.entries]

    def ranked(self) -> "BilingualDictionary":
        """
        Entries sorted by frequency rank (entries without rank keep line order, last).

        Returns:
            New dictionary sorted by rank; stable for equal ranks
        """
        positions = range(len(self.entries))
        order = sorted(
            positions,
            key=lambda i: (
                self.entries[i].frequency_rank is None,
                self.entries[i].frequency_rank or 0,
                i,
            ),
        )
        return BilingualDictionary(self.entries[i] for i in order)

    def most_frequent(self, n: int) -> "BilingualDictionary":
        """
        The ``n`` best-ranked entries.

        Args:
            n: Number of entries (clamped to the dictionary size)

        Returns:
            New dictionary of at most n entries
        """
        return BilingualDictionary(self.ranked().entries[: max(n, 0)])

    def head(self, n: int) -> "BilingualDictionary":
        """The first ``n`` entries in dictionary order."""
        return BilingualDictionary(self.entries[: max(n, 0)])

    def split(
        self, heldout_fraction: float, seed: int
    ) -> tuple["BilingualDictionary", "BilingualDictionary"]:
        """
        Seeded split into a training part and a held-out part.

        Entries sharing a source word land on the same side. Both parts keep
        the original relative order.

        Args:
            heldout_fraction: Fraction of distinct source words held out
            seed: Random seed

        Returns:
            (training dictionary, held-out dictionary)
        """
        sources = list(dict.fromkeys(e.source for e in self.entries))
        rng = np.random.default_rng(seed)
        n_heldout = int(round(len(sources) * heldout_fraction))
        heldout_sources = {sources[i] for i in rng.permutation(len(sources))[:n_heldout]}
        train = BilingualDictionary(e for e in self.entries if e.source not in heldout_sources)
        heldout = BilingualDictionary(e for e in self.entries if e.source in heldout_sources)
        return train, heldout


def parse_dictionary(
    stream: Iterable[str], case_fold: Optional[bool] = None, source: str = ""
) -> BilingualDictionary:
    """
    Parse ``source<TAB>target[<TAB>frequency_rank]`` lines.

    Lines starting with ``#`` and blank lines are ignored. Without a rank
    column the rank is the entry's position.

    Args:
        stream: Readable character stream
        case_fold: Fold words to lower case (defaults to settings)
        source: Name used in error messages

    Returns:
        BilingualDictionary

    Raises:
        ParseError: On a line without two words or with a non-integer rank
    """
    if case_fold is None:
        case_fold = settings.embeddings.case_fold

    entries: List[DictionaryEntry] = []
    for line_number, line in enumerate(stream, start=1):
        stripped = line.rstrip("\r\n")
        if not stripped.strip() or stripped.lstrip().startswith("#"):
            continue
        parts = stripped.split("\t")
        if len(parts) < 2 or not parts[0] or not parts[1]:
            raise ParseError("expected 'source<TAB>target'", line_number, source)
        rank: Optional[int] = len(entries)
        if len(parts) >= 3 and parts[2].strip():
            try:
                rank = int(parts[2])
            except ValueError:
                raise ParseError(f"invalid frequency rank {parts[2]!r}", line_number, source) from None
        entries.append(
            DictionaryEntry(
                source=fold_case(parts[0].strip(), case_fold),
                target=fold_case(parts[1].strip(), case_fold),
                frequency_rank=rank,
            )
        )

    dictionary = BilingualDictionary(entries)
    if dictionary.duplicates_skipped:
        logger.warning(f"Skipped {dictionary.duplicates_skipped} duplicate dictionary pairs")
    return dictionary


def load_dictionary(path: str | Path, case_fold: Optional[bool] = None) -> BilingualDictionary:
    """
    Load a bilingual dictionary file.

    Raises:
        FileNotFoundError: If the file doesn't exist
    """
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"Dictionary file not found: {file_path}")
    with open(file_path, "r", encoding="utf-8") as f:
        dictionary = parse_dictionary(f, case_fold, source=str(file_path))
    logger.info(f"Loaded {len(dictionary)} dictionary pairs from {file_path}")
    return dictionary


def serialize_dictionary(dictionary: BilingualDictionary, stream: TextIO) -> None:
    """Write ``source<TAB>target<TAB>rank`` lines (rank column only when known)."""
    for entry in dictionary:
        if entry.frequency_rank is None:
            stream.write(f"{entry.source}\t{entry.target}\n")
        else:
            stream.write(f"{entry.source}\t{entry.target}\t{entry.frequency_rank}\n")


def save_dictionary(dictionary: BilingualDictionary, path: str | Path) -> None:
    """Write a dictionary file."""
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding="utf-8", newline="\n") as f:
        serialize_dictionary(dictionary, f)
