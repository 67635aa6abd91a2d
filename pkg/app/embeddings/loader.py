"""Textual word-vector file loading and serialization.

Layout: a header line ``"<vocab_count> <dim>"`` followed by one line per word,
``"<word> <v1> ... <vdim>"``, single ASCII spaces, UTF-8 words.
"""

from pathlib import Path
from typing import Iterable, List, Optional, TextIO

import numpy as np

from app.core.config import settings
from app.core.exceptions import ParseError
from app.core.logging import get_logger
from app.embeddings.table import EmbeddingTable, fold_case

logger = get_logger(__name__)


def _parse_header(line: Optional[str], source: str) -> tuple[int, int]:
    if line is None:
        raise ParseError("missing header", 1, source)
    parts = line.split()
    if len(parts) != 2:
        raise ParseError(f"malformed header {line.strip()!r}", 1, source)
    try:
        count, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"malformed header {line.strip()!r}", 1, source) from None
    if count < 0 or dim < 1:
        raise ParseError(f"malformed header {line.strip()!r}", 1, source)
    return count, dim


def parse_embeddings(
    stream: Iterable[str],
    language_tag: str,
    case_fold: Optional[bool] = None,
    source: str = "",
) -> EmbeddingTable:
    """
    Parse a textual vector file.

    Duplicate words (after case folding) keep their first occurrence; later
    ones are skipped and counted.

    Args:
        stream: Readable character stream (or any iterable of lines)
        language_tag: Language of the vocabulary
        case_fold: Fold words to lower case (defaults to settings)
        source: Name used in error messages

    Returns:
        EmbeddingTable

    Raises:
        ParseError: On a malformed header, a wrong value count, a non-finite
            value, or a vocabulary count that disagrees with the file
    """
    if case_fold is None:
        case_fold = settings.embeddings.case_fold

    lines = iter(stream)
    count, dim = _parse_header(next(lines, None), source)

    words: List[str] = []
    rows: List[np.ndarray] = []
    seen: set = set()
    duplicates = 0
    line_number = 1
    entries = 0

    for line in lines:
        line_number += 1
        stripped = line.rstrip("\r\n").rstrip(" ")
        if not stripped:
            continue
        entries += 1
        if entries > count:
            raise ParseError(f"more than the declared {count} vectors", line_number, source)

        parts = stripped.split(" ")
        word, values = parts[0], parts[1:]
        if len(values) != dim:
            raise ParseError(f"expected {dim} values, got {len(values)}", line_number, source)
        try:
            vector = np.array(values, dtype=np.float64)
        except ValueError:
            raise ParseError("non-numeric value", line_number, source) from None
        if not np.all(np.isfinite(vector)):
            raise ParseError("non-finite value", line_number, source)

        folded = fold_case(word, case_fold)
        if folded in seen:
            duplicates += 1
            logger.debug(f"Duplicate vocabulary word {folded!r} skipped at line {line_number}")
            continue
        seen.add(folded)
        words.append(folded)
        rows.append(vector)

    if entries != count:
        raise ParseError(
            f"expected {count} vectors, file ended after {entries}", line_number, source
        )

    if duplicates:
        logger.warning(f"Skipped {duplicates} duplicate vocabulary lines in '{language_tag}' table")

    matrix = np.vstack(rows) if rows else np.zeros((0, dim))
    table = EmbeddingTable(language_tag, words, matrix, case_fold, duplicates)
    logger.info(f"Loaded {len(table)} vectors of dimension {dim} for '{language_tag}'")
    return table


def load_embeddings(
    path: str | Path, language_tag: str, case_fold: Optional[bool] = None
) -> EmbeddingTable:
    """
    Load a textual vector file from disk.

    Args:
        path: Path to the UTF-8 vector file
        language_tag: Language of the vocabulary
        case_fold: Fold words to lower case (defaults to settings)

    Returns:
        EmbeddingTable

    Raises:
        FileNotFoundError: If the file doesn't exist
        ParseError: If the file is malformed
    """
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"Embedding file not found: {file_path}")

    with open(file_path, "r", encoding="utf-8") as f:
        return parse_embeddings(f, language_tag, case_fold, source=str(file_path))


def serialize_embeddings(table: EmbeddingTable, stream: TextIO) -> None:
    """
    Write a table in the textual layout with 6 significant digits.

    Args:
        table: Embedding table
        stream: Writable character stream
    """
    stream.write(f"{len(table)} {table.dim}\n")
    for word, vector in zip(table.vocab, table.vectors):
        stream.write(word + " " + " ".join(f"{value:.6g}" for value in vector) + "\n")


def save_embeddings(table: EmbeddingTable, path: str | Path) -> None:
    """Write a table to disk in the textual layout."""
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding="utf-8", newline="\n") as f:
        serialize_embeddings(table, f)
