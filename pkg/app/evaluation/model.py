"""One-vs-rest linear classifier over feature ids and its text file format."""

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, TextIO, Union

import numpy as np
from scipy import sparse

from app.core.exceptions import ContractError, NumericError, ParseError
from app.core.logging import get_logger
from app.core.types import CLASS_ORDER, Label
from app.features.dataset import LabeledDataset
from app.features.index import FeatureVector

logger = get_logger(__name__)

MODEL_FORMAT = "linear-model"
MODEL_VERSION = 1

Matrix = Union[np.ndarray, sparse.spmatrix]


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Per-class weights and biases in the fixed class order.

    Class c scores ``weights[c] . v + biases[c]``; the predicted class is the
    arg-max, ties going to the earlier class (negative < neutral < positive).
    """

    weights: np.ndarray
    biases: np.ndarray
    regularization: float
    epochs: int
    seed: int
    tolerance: float = 1e-4
    classes: tuple[Label, ...] = CLASS_ORDER

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", np.array(self.weights, dtype=np.float64, ndmin=2))
        object.__setattr__(self, "biases", np.array(self.biases, dtype=np.float64).reshape(-1))
        if tuple(self.classes) != CLASS_ORDER:
            raise ContractError(f"class set must be {[c.value for c in CLASS_ORDER]}")
        if self.weights.shape[0] != len(CLASS_ORDER) or self.biases.shape != (len(CLASS_ORDER),):
            raise ContractError(
                f"expected {len(CLASS_ORDER)} weight rows and biases, got "
                f"{self.weights.shape} and {self.biases.shape}"
            )
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.biases))):
            raise NumericError("model has non-finite weights")
        self.weights.setflags(write=False)
        self.biases.setflags(write=False)

    @property
    def n_features(self) -> int:
        """Number of feature ids the model has weights for."""
        return int(self.weights.shape[1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearModel):
            return NotImplemented
        return (
            np.array_equal(self.weights, other.weights)
            and np.array_equal(self.biases, other.biases)
            and (self.regularization, self.epochs, self.seed, self.tolerance)
            == (other.regularization, other.epochs, other.seed, other.tolerance)
        )


def decision_function(model: LinearModel, X: Matrix) -> np.ndarray:
    """
    Class scores for every row of X.

    Columns beyond the model's feature count are ignored; missing columns
    count as zero.

    Returns:
        n x 3 array of scores in the fixed class order
    """
    if X.ndim != 2:
        raise ContractError(f"expected a 2-D matrix, got {X.ndim} dimensions")
    width = min(model.n_features, X.shape[1])
    scores = X[:, :width] @ model.weights[:, :width].T
    return np.asarray(scores, dtype=np.float64) + model.biases


def _argmax_labels(scores: np.ndarray) -> List[Label]:
    # np.argmax returns the first maximum, which is the fixed tie order
    return [CLASS_ORDER[i] for i in np.argmax(scores, axis=1)]


def predict(model: LinearModel, vector: FeatureVector) -> Label:
    """Label of one feature vector."""
    dense = vector.to_dense(model.n_features)
    scores = model.weights @ dense + model.biases
    return CLASS_ORDER[int(np.argmax(scores))]


def predict_batch(model: LinearModel, data: Union[LabeledDataset, Matrix]) -> List[Label]:
    """Labels of every item of a dataset (or row of a matrix), in order."""
    if isinstance(data, LabeledDataset):
        if len(data) == 0:
            return []
        data = data.matrix()
    return _argmax_labels(decision_function(model, data))


def serialize_model(model: LinearModel, stream: TextIO) -> None:
    """
    Write a model in the versioned text format.

    Layout::

        linear-model 1
        classes negative neutral positive
        features <F>
        hyper <regularization> <epochs> <seed> <tolerance>
        bias <b_neg> <b_neu> <b_pos>
        <class_id> <feature_id> <weight>     (non-zero weights only)

    Reals use 17 significant digits.
    """
    stream.write(f"{MODEL_FORMAT} {MODEL_VERSION}\n")
    stream.write("classes " + " ".join(c.value for c in model.classes) + "\n")
    stream.write(f"features {model.n_features}\n")
    stream.write(
        f"hyper {model.regularization:.17g} {model.epochs} {model.seed} {model.tolerance:.17g}\n"
    )
    stream.write("bias " + " ".join(f"{b:.17g}" for b in model.biases) + "\n")
    rows, cols = np.nonzero(model.weights)
    for class_id, feature_id in zip(rows, cols):
        stream.write(f"{class_id} {feature_id} {model.weights[class_id, feature_id]:.17g}\n")


def _expect(line: str, keyword: str, line_number: int, source: str) -> List[str]:
    parts = line.split()
    if not parts or parts[0] != keyword:
        raise ParseError(f"expected '{keyword}' line", line_number, source)
    return parts[1:]


def parse_model(stream: Iterable[str], source: str = "") -> LinearModel:
    """
    Read a model written by ``serialize_model``.

    Raises:
        ParseError: On an unknown format, version or class order, or a malformed line
    """
    lines = [line.rstrip("\r\n") for line in stream]
    if len(lines) < 5:
        raise ParseError("truncated model file", None, source)
    try:
        version = _expect(lines[0], MODEL_FORMAT, 1, source)
        if version != [str(MODEL_VERSION)]:
            raise ParseError(f"unsupported model version {' '.join(version)!r}", 1, source)
        classes = _expect(lines[1], "classes", 2, source)
        if classes != [c.value for c in CLASS_ORDER]:
            raise ParseError(f"unexpected class order {classes}", 2, source)
        n_features = int(_expect(lines[2], "features", 3, source)[0])
        regularization, epochs, seed, tolerance = _expect(lines[3], "hyper", 4, source)
        biases = [float(b) for b in _expect(lines[4], "bias", 5, source)]
        weights = np.zeros((len(CLASS_ORDER), n_features), dtype=np.float64)
        for line_number, line in enumerate(lines[5:], start=6):
            if not line.strip():
                continue
            class_id, feature_id, value = line.split()
            weights[int(class_id), int(feature_id)] = float(value)
    except (ValueError, IndexError) as e:
        raise ParseError(f"malformed model file: {e}", None, source) from None

    return LinearModel(
        weights=weights,
        biases=np.array(biases),
        regularization=float(regularization),
        epochs=int(epochs),
        seed=int(seed),
        tolerance=float(tolerance),
    )


def save_model(model: LinearModel, path: str | Path) -> None:
    """Write a model file."""
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding="utf-8", newline="\n") as f:
        serialize_model(model, f)
    logger.info(f"Model ({model.n_features} features) saved to {file_path}")


def load_model(path: str | Path) -> LinearModel:
    """
    Read a model file.

    Raises:
        FileNotFoundError: If the file doesn't exist
    """
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"Model file not found: {file_path}")
    with open(file_path, "r", encoding="utf-8") as f:
        model = parse_model(f, source=str(file_path))
    logger.info(f"Model loaded from {file_path}")
    return model
