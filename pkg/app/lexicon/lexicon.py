"""Polarity lexicons: loading, serialization, union and summary statistics.

File layout: ``word<TAB>polarity[<TAB>origin<TAB>similarity<TAB>method]`` per
line, ``#`` comment lines ignored. Consumers ignore columns they don't need;
``-`` marks an absent origin or similarity.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, TextIO

import numpy as np

from app.core.config import settings
from app.core.exceptions import DataError, LexiconConflictError, ParseError
from app.core.logging import get_logger
from app.core.types import Polarity, ProvenanceMethod
from app.embeddings.table import fold_case

logger = get_logger(__name__)

MISSING = "-"


@dataclass(frozen=True)
class Provenance:
    """Where a lexicon entry came from."""

    method: ProvenanceMethod = ProvenanceMethod.NATIVE
    origin: Optional[str] = None
    similarity: Optional[float] = None


NATIVE = Provenance()


@dataclass(frozen=True)
class PolarityLexicon:
    """Word to polarity map with per-word provenance."""

    name: str
    entries: Dict[str, Polarity]
    provenance: Dict[str, Provenance] = field(default_factory=dict)
    conflict_drops: int = 0

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: object) -> bool:
        return word in self.entries

    def __iter__(self) -> Iterator[str]:
        return iter(self.entries)

    def polarity(self, word: str) -> Optional[Polarity]:
        """Polarity of ``word``, or None if absent."""
        return self.entries.get(word)

    def provenance_of(self, word: str) -> Provenance:
        """Provenance of ``word`` (native when unrecorded)."""
        return self.provenance.get(word, NATIVE)

    def words(self, polarity: Polarity) -> List[str]:
        """Sorted words of one polarity."""
        return sorted(w for w, p in self.entries.items() if p is polarity)


@dataclass(frozen=True)
class LexiconStats:
    """Summary of a lexicon."""

    positive: int
    negative: int
    mean_similarity: Optional[float]

    def as_fields(self) -> Dict[str, object]:
        """Summary as ordered key-value fields."""
        return {
            "positive": self.positive,
            "negative": self.negative,
            "mean_similarity": self.mean_similarity,
        }


def make_lexicon(
    name: str,
    entries: Dict[str, Polarity],
    provenance: Optional[Dict[str, Provenance]] = None,
    conflict_drops: int = 0,
) -> PolarityLexicon:
    """Build a lexicon with entries ordered by word."""
    provenance = provenance or {}
    ordered = {word: entries[word] for word in sorted(entries)}
    return PolarityLexicon(
        name=name,
        entries=ordered,
        provenance={word: provenance.get(word, NATIVE) for word in ordered},
        conflict_drops=conflict_drops,
    )


def _parse_similarity(value: str, line_number: int, source: str) -> Optional[float]:
    if value == MISSING or not value:
        return None
    try:
        similarity = float(value)
    except ValueError:
        raise ParseError(f"invalid similarity {value!r}", line_number, source) from None
    if not np.isfinite(similarity):
        raise ParseError("non-finite similarity", line_number, source)
    return similarity


def parse_lexicon(
    stream: Iterable[str],
    name: str,
    case_fold: Optional[bool] = None,
    source: str = "",
) -> PolarityLexicon:
    """
    Parse a lexicon file.

    A word listed twice with the same polarity is kept once; a word listed
    with both polarities is an error.

    Args:
        stream: Readable character stream
        name: Lexicon name
        case_fold: Fold words to lower case (defaults to settings)
        source: Name used in error messages

    Returns:
        PolarityLexicon

    Raises:
        ParseError: On an unknown polarity token or a malformed line
        LexiconConflictError: On a word listed with both polarities
        DataError: If the file holds no entries
    """
    if case_fold is None:
        case_fold = settings.embeddings.case_fold

    entries: Dict[str, Polarity] = {}
    provenance: Dict[str, Provenance] = {}

    for line_number, line in enumerate(stream, start=1):
        stripped = line.rstrip("\r\n")
        if not stripped.strip() or stripped.lstrip().startswith("#"):
            continue
        parts = stripped.split("\t")
        if len(parts) < 2 or not parts[0].strip():
            raise ParseError("expected 'word<TAB>polarity'", line_number, source)

        word = fold_case(parts[0].strip(), case_fold)
        try:
            polarity = Polarity.from_string(parts[1])
        except ValueError:
            raise ParseError(f"unknown polarity {parts[1]!r}", line_number, source) from None

        origin = parts[2].strip() if len(parts) > 2 and parts[2].strip() != MISSING else None
        similarity = _parse_similarity(parts[3].strip(), line_number, source) if len(parts) > 3 else None
        if len(parts) > 4 and parts[4].strip():
            try:
                method = ProvenanceMethod.from_string(parts[4])
            except ValueError:
                raise ParseError(f"unknown method {parts[4]!r}", line_number, source) from None
        else:
            method = ProvenanceMethod.TRANSFERRED if similarity is not None else ProvenanceMethod.NATIVE

        known = entries.get(word)
        if known is not None:
            if known is not polarity:
                raise LexiconConflictError(
                    f"conflicting polarities for {word!r} in lexicon '{name}'", word
                )
            continue
        entries[word] = polarity
        provenance[word] = Provenance(method=method, origin=origin or None, similarity=similarity)

    if not entries:
        raise DataError(f"lexicon '{name}' is empty")

    return make_lexicon(name, entries, provenance)


def load_lexicon(
    path: str | Path, name: Optional[str] = None, case_fold: Optional[bool] = None
) -> PolarityLexicon:
    """
    Load a lexicon file; the name defaults to the file stem.

    Raises:
        FileNotFoundError: If the file doesn't exist
    """
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"Lexicon file not found: {file_path}")
    with open(file_path, "r", encoding="utf-8") as f:
        lexicon = parse_lexicon(f, name or file_path.stem, case_fold, source=str(file_path))
    stats = lexicon_stats(lexicon)
    logger.info(
        f"Loaded lexicon '{lexicon.name}' from {file_path}: "
        f"{stats.positive} positive, {stats.negative} negative"
    )
    return lexicon


def serialize_lexicon(lexicon: PolarityLexicon, stream: TextIO) -> None:
    """
    Write a lexicon sorted by word.

    Native entries without provenance detail use the two mandatory columns;
    all others carry origin, similarity (17 significant digits) and method.
    """
    for word in sorted(lexicon.entries):
        polarity = lexicon.entries[word]
        prov = lexicon.provenance_of(word)
        if prov == NATIVE:
            stream.write(f"{word}\t{polarity.value}\n")
            continue
        origin = prov.origin if prov.origin is not None else MISSING
        similarity = f"{prov.similarity:.17g}" if prov.similarity is not None else MISSING
        stream.write(f"{word}\t{polarity.value}\t{origin}\t{similarity}\t{prov.method.value}\n")


def save_lexicon(lexicon: PolarityLexicon, path: str | Path) -> None:
    """Write a lexicon file."""
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding="utf-8", newline="\n") as f:
        serialize_lexicon(lexicon, f)
    logger.info(f"Lexicon '{lexicon.name}' ({len(lexicon)} entries) saved to {file_path}")


def _merge_provenance(a: Provenance, b: Provenance) -> Provenance:
    """
    Provenance of a word both lexicons agree on.

    Identical provenance is kept as is (two native entries stay native), so
    the union of a lexicon with itself is that lexicon. Differing provenance
    becomes "union" with the origin and similarity of the stronger side.
    """
    if a == b:
        return a
    # Order-independent choice: higher similarity first, then smaller origin
    best = min(
        (a, b),
        key=lambda p: (
            -(p.similarity if p.similarity is not None else -np.inf),
            p.origin or "",
        ),
    )
    return Provenance(method=ProvenanceMethod.UNION, origin=best.origin, similarity=best.similarity)


def union_lexicons(a: PolarityLexicon, b: PolarityLexicon) -> PolarityLexicon:
    """
    Union of two lexicons.

    A word present in both with the same polarity is kept once with "union"
    provenance, unless both sides record identical provenance, which is then
    kept (two native entries stay native). A word with conflicting polarities
    across the inputs is excluded and counted in ``conflict_drops``. The
    result does not depend on argument order.

    Args:
        a: First lexicon
        b: Second lexicon

    Returns:
        PolarityLexicon named after both inputs
    """
    entries: Dict[str, Polarity] = {}
    provenance: Dict[str, Provenance] = {}
    conflicts = 0

    for word in set(a.entries) | set(b.entries):
        pa, pb = a.polarity(word), b.polarity(word)
        if pa is not None and pb is not None:
            if pa is not pb:
                conflicts += 1
                continue
            entries[word] = pa
            provenance[word] = _merge_provenance(a.provenance_of(word), b.provenance_of(word))
        elif pa is not None:
            entries[word] = pa
            provenance[word] = a.provenance_of(word)
        else:
            entries[word] = pb
            provenance[word] = b.provenance_of(word)

    if conflicts:
        logger.info(f"Union of '{a.name}' and '{b.name}' dropped {conflicts} conflicting words")

    name = a.name if a.name == b.name else "+".join(sorted([a.name, b.name]))
    return make_lexicon(name, entries, provenance, conflict_drops=conflicts)


def union_all(lexicons: List[PolarityLexicon]) -> PolarityLexicon:
    """
    Fold ``union_lexicons`` over several lexicons.

    Raises:
        DataError: If no lexicon is given
    """
    if not lexicons:
        raise DataError("union needs at least one lexicon")
    result = lexicons[0]
    drops = 0
    for other in lexicons[1:]:
        result = union_lexicons(result, other)
        drops += result.conflict_drops
    return make_lexicon(result.name, result.entries, result.provenance, conflict_drops=drops)


def lexicon_stats(lexicon: PolarityLexicon) -> LexiconStats:
    """
    Count entries by polarity and average recorded similarities.

    The mean similarity is None when no entry carries a similarity.
    """
    values = list(lexicon.entries.values())
    similarities = [
        p.similarity for p in lexicon.provenance.values() if p.similarity is not None
    ]
    return LexiconStats(
        positive=sum(1 for p in values if p is Polarity.POSITIVE),
        negative=sum(1 for p in values if p is Polarity.NEGATIVE),
        mean_similarity=float(np.mean(similarities)) if similarities else None,
    )
