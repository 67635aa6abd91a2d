"""Least-squares linear map between two embedding spaces.

The map W minimizes sum_i ||W x_i - y_i||^2 over dictionary pairs and has no
bias term. Training uses raw vectors; retrieval after projection is cosine
based, so vector scale only affects training.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, TextIO

import numpy as np

from app.alignment.dictionary import BilingualDictionary
from app.core.exceptions import ContractError, EmptyTrainingSetError, NumericError, ParseError
from app.core.logging import get_logger
from app.embeddings.table import EmbeddingTable

logger = get_logger(__name__)

SOLVER_TAG = "lstsq-svd"


@dataclass(frozen=True, eq=False)
class PairSet:
    """Aligned training matrices: row i of X translates to row i of Y."""

    X: np.ndarray
    Y: np.ndarray
    skipped: int = 0
    pair_words: tuple[tuple[str, str], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "X", np.array(self.X, dtype=np.float64))
        object.__setattr__(self, "Y", np.array(self.Y, dtype=np.float64))
        if self.X.ndim != 2 or self.Y.ndim != 2:
            raise ContractError("pair matrices must be 2-D")
        if self.X.shape[0] != self.Y.shape[0]:
            raise ContractError(
                f"X has {self.X.shape[0]} rows but Y has {self.Y.shape[0]}"
            )
        if self.X.shape[0] < 1:
            raise EmptyTrainingSetError(self.skipped)
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.Y))):
            raise ContractError("pair matrices must be finite")
        self.X.setflags(write=False)
        self.Y.setflags(write=False)

    @property
    def n(self) -> int:
        """Number of training pairs."""
        return int(self.X.shape[0])

    @property
    def d_src(self) -> int:
        """Source embedding dimension."""
        return int(self.X.shape[1])

    @property
    def d_tgt(self) -> int:
        """Target embedding dimension."""
        return int(self.Y.shape[1])


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Fitted d_tgt x d_src matrix W with fit diagnostics."""

    W: np.ndarray
    train_pair_count: int
    mean_squared_residual: float
    solver_tag: str = SOLVER_TAG

    def __post_init__(self) -> None:
        object.__setattr__(self, "W", np.array(self.W, dtype=np.float64))
        if self.W.ndim != 2:
            raise ContractError("W must be a 2-D matrix")
        if not np.all(np.isfinite(self.W)):
            raise NumericError("linear map has non-finite entries")
        self.W.setflags(write=False)

    @property
    def d_src(self) -> int:
        """Source dimension (columns of W)."""
        return int(self.W.shape[1])

    @property
    def d_tgt(self) -> int:
        """Target dimension (rows of W)."""
        return int(self.W.shape[0])


def build_pairs(
    dictionary: BilingualDictionary, src: EmbeddingTable, tgt: EmbeddingTable
) -> PairSet:
    """
    Resolve dictionary entries to (x_i, y_i) rows.

    Entries with an out-of-vocabulary word on either side are skipped and
    counted; a source word with several translations contributes one row per
    translation. Dictionary order is preserved.

    Args:
        dictionary: Translation pairs
        src: Source-language table
        tgt: Target-language table

    Returns:
        PairSet

    Raises:
        EmptyTrainingSetError: If no entry resolves
    """
    src_rows: List[int] = []
    tgt_rows: List[int] = []
    words: List[tuple[str, str]] = []
    skipped = 0

    for entry in dictionary:
        i = src.index_of(entry.source)
        j = tgt.index_of(entry.target)
        if i is None or j is None:
            skipped += 1
            continue
        src_rows.append(i)
        tgt_rows.append(j)
        words.append((entry.source, entry.target))

    if not src_rows:
        raise EmptyTrainingSetError(skipped)

    if skipped:
        logger.info(f"Skipped {skipped} out-of-vocabulary dictionary pairs")

    return PairSet(
        X=src.vectors[src_rows],
        Y=tgt.vectors[tgt_rows],
        skipped=skipped,
        pair_words=tuple(words),
    )


def objective(W: np.ndarray, pairs: PairSet) -> float:
    """Sum of squared residuals sum_i ||W x_i - y_i||^2."""
    residuals = pairs.X @ np.asarray(W).T - pairs.Y
    return float(np.sum(residuals * residuals))


def fit_linear_map(pairs: PairSet) -> LinearMap:
    """
    Fit W by least squares.

    Uses the SVD-based solver of ``numpy.linalg.lstsq``, which returns the
    minimum-Frobenius-norm solution when X is rank deficient.

    Args:
        pairs: Training pairs

    Returns:
        LinearMap

    Raises:
        NumericError: If the solve fails or produces non-finite values
    """
    try:
        with np.errstate(all="ignore"):
            solution, _, rank, _ = np.linalg.lstsq(pairs.X, pairs.Y, rcond=None)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"least-squares solve failed: {e}", {"pairs": pairs.n}) from e
    W = np.ascontiguousarray(solution.T)
    if not np.all(np.isfinite(W)):
        raise NumericError("least-squares solve produced non-finite values")

    if rank < pairs.d_src:
        logger.info(
            f"Source matrix has rank {rank} < {pairs.d_src}; using the minimum-norm solution"
        )

    residual = objective(W, pairs) / pairs.n
    linear_map = LinearMap(
        W=W,
        train_pair_count=pairs.n,
        mean_squared_residual=residual,
        solver_tag=SOLVER_TAG,
    )
    logger.info(
        f"Fitted {linear_map.d_tgt}x{linear_map.d_src} map on {pairs.n} pairs, "
        f"mean squared residual {residual:.6g}"
    )
    return linear_map


def project(linear_map: LinearMap, x: np.ndarray) -> np.ndarray:
    """
    Map a source vector into the target space (y = W x).

    Raises:
        ContractError: If x does not have d_src entries
    """
    vector = np.asarray(x, dtype=np.float64)
    if vector.shape != (linear_map.d_src,):
        raise ContractError(
            f"expected a vector of {linear_map.d_src} entries, got shape {vector.shape}"
        )
    return linear_map.W @ vector


def project_rows(linear_map: LinearMap, X: np.ndarray) -> np.ndarray:
    """Project every row of X (returns X W^T)."""
    matrix = np.asarray(X, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[1] != linear_map.d_src:
        raise ContractError(
            f"expected rows of {linear_map.d_src} entries, got shape {matrix.shape}"
        )
    return matrix @ linear_map.W.T


def residual_gradient_norm(linear_map: LinearMap, pairs: PairSet) -> float:
    """
    Frobenius norm of the objective's gradient, ||2 sum_i (W x_i - y_i) x_i^T||_F.

    Raises:
        ContractError: If map and pairs disagree on dimensions
    """
    if (linear_map.d_src, linear_map.d_tgt) != (pairs.d_src, pairs.d_tgt):
        raise ContractError(
            f"map is {linear_map.d_tgt}x{linear_map.d_src} but pairs are "
            f"{pairs.d_src}->{pairs.d_tgt}"
        )
    residuals = pairs.X @ linear_map.W.T - pairs.Y
    gradient = 2.0 * residuals.T @ pairs.X
    return float(np.linalg.norm(gradient, "fro"))


def serialize_linear_map(linear_map: LinearMap, stream: TextIO) -> None:
    """
    Write a map: header ``"d_tgt d_src solver_tag n residual"`` then W row by row.

    Reals use 17 significant digits, which round-trips float64 exactly.
    """
    stream.write(
        f"{linear_map.d_tgt} {linear_map.d_src} {linear_map.solver_tag} "
        f"{linear_map.train_pair_count} {linear_map.mean_squared_residual:.17g}\n"
    )
    for row in linear_map.W:
        stream.write(" ".join(f"{value:.17g}" for value in row) + "\n")


def parse_linear_map(stream: Iterable[str], source: str = "") -> LinearMap:
    """
    Read a map written by ``serialize_linear_map``.

    Raises:
        ParseError: On a malformed header or row
    """
    lines = iter(stream)
    header = next(lines, None)
    parts = header.split() if header else []
    if len(parts) != 5:
        raise ParseError("malformed map header", 1, source)
    try:
        d_tgt, d_src = int(parts[0]), int(parts[1])
        n = int(parts[3])
        residual = float(parts[4])
    except ValueError:
        raise ParseError("malformed map header", 1, source) from None
    solver_tag = parts[2]

    rows: List[np.ndarray] = []
    for line_number, line in enumerate(lines, start=2):
        if not line.strip():
            continue
        values = line.split()
        if len(values) != d_src:
            raise ParseError(f"expected {d_src} values, got {len(values)}", line_number, source)
        try:
            rows.append(np.array(values, dtype=np.float64))
        except ValueError:
            raise ParseError("non-numeric value", line_number, source) from None

    if len(rows) != d_tgt:
        raise ParseError(f"expected {d_tgt} rows, got {len(rows)}", None, source)

    return LinearMap(
        W=np.vstack(rows),
        train_pair_count=n,
        mean_squared_residual=residual,
        solver_tag=solver_tag,
    )


def save_linear_map(linear_map: LinearMap, path: str | Path) -> None:
    """Write a map file."""
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding="utf-8", newline="\n") as f:
        serialize_linear_map(linear_map, f)
    logger.info(f"Linear map saved to {file_path}")


def load_linear_map(path: str | Path) -> LinearMap:
    """
    Read a map file.

    Raises:
        FileNotFoundError: If the file doesn't exist
    """
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"Linear map file not found: {file_path}")
    with open(file_path, "r", encoding="utf-8") as f:
        return parse_linear_map(f, source=str(file_path))
