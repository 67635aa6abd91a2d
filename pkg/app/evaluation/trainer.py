"""Linear SVM training and k-fold cross-validation."""

import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.model_selection import KFold
from sklearn.svm import LinearSVC

from app.core.config import ClassifierConfig, settings
from app.core.exceptions import ContractError, DataError
from app.core.logging import get_logger
from app.core.types import CLASS_ORDER
from app.evaluation.metrics import CrossValidationReport, EvaluationReport, macro_f, summarize_folds
from app.evaluation.model import LinearModel, predict_batch
from app.features.dataset import LabeledDataset

logger = get_logger(__name__)

# bias of a class that never occurs in the training data
ABSENT_CLASS_BIAS = -1.0
# bias of the only class of a single-class fold
SOLE_CLASS_BIAS = 1.0

# non-convergence is read from n_iter_ instead; catch_warnings is not thread-safe
warnings.filterwarnings("ignore", category=ConvergenceWarning, module=r"sklearn\.svm")


def train(
    data: LabeledDataset,
    hyper: Optional[ClassifierConfig] = None,
    allow_single_class: bool = False,
) -> LinearModel:
    """
    Train one-vs-rest linear SVMs, one per class in the fixed order.

    Each binary problem minimizes ``||w||^2 / 2 + regularization * mean hinge``
    (liblinear's dual coordinate descent with ``C = regularization / n``), so
    scaling the training set by duplication leaves the optimum unchanged.
    Results are deterministic given data order and seed.

    Args:
        data: Labeled training set
        hyper: Classifier hyperparameters (defaults to settings)
        allow_single_class: Return a constant model instead of failing when
            only one class is present (used for cross-validation folds)

    Returns:
        LinearModel

    Raises:
        DataError: If the data is empty, unlabeled, single-class or non-finite
    """
    hyper = hyper or settings.classifier
    if len(data) == 0:
        raise DataError("cannot train on an empty dataset")

    y = data.class_ids()
    present = np.unique(y)
    X = data.matrix()
    if not np.all(np.isfinite(X.data)):
        raise DataError("training features contain non-finite values")

    if len(present) < 2:
        sole = CLASS_ORDER[int(present[0])]
        if not allow_single_class:
            raise DataError(f"training data holds a single class ({sole.value})")
        return _constant_model(sole.class_id, data.n_features, hyper)

    n_features = data.n_features
    if n_features == 0:
        # liblinear needs at least one column
        X = data.matrix(1)

    weights = np.zeros((len(CLASS_ORDER), X.shape[1]), dtype=np.float64)
    biases = np.full(len(CLASS_ORDER), ABSENT_CLASS_BIAS, dtype=np.float64)
    C = hyper.regularization / len(data)

    for label in CLASS_ORDER:
        c = label.class_id
        if c not in present:
            logger.info(f"Class '{label.value}' absent from training data; it keeps bias {ABSENT_CLASS_BIAS}")
            continue
        target = np.where(y == c, 1, -1)
        classifier = LinearSVC(
            loss="hinge",
            dual=True,
            C=C,
            tol=hyper.tolerance,
            max_iter=hyper.epochs,
            random_state=hyper.seed,
        )
        classifier.fit(X, target)
        if classifier.n_iter_ >= hyper.epochs:
            logger.warning(
                f"Solver for class '{label.value}' did not converge in {hyper.epochs} epochs"
            )
        weights[c] = classifier.coef_[0]
        biases[c] = classifier.intercept_[0]

    model = LinearModel(
        weights=weights[:, :n_features],
        biases=biases,
        regularization=hyper.regularization,
        epochs=hyper.epochs,
        seed=hyper.seed,
        tolerance=hyper.tolerance,
    )
    logger.info(
        f"Trained linear model on {len(data)} examples, {n_features} features "
        f"(regularization={hyper.regularization}, epochs={hyper.epochs}, seed={hyper.seed})"
    )
    return model


def _constant_model(class_id: int, n_features: int, hyper: ClassifierConfig) -> LinearModel:
    biases = np.full(len(CLASS_ORDER), ABSENT_CLASS_BIAS, dtype=np.float64)
    biases[class_id] = SOLE_CLASS_BIAS
    logger.info(
        f"Training data holds only class '{CLASS_ORDER[class_id].value}'; "
        f"using a constant model"
    )
    return LinearModel(
        weights=np.zeros((len(CLASS_ORDER), n_features), dtype=np.float64),
        biases=biases,
        regularization=hyper.regularization,
        epochs=hyper.epochs,
        seed=hyper.seed,
        tolerance=hyper.tolerance,
    )


def evaluate(model: LinearModel, data: LabeledDataset) -> EvaluationReport:
    """Score a model on a labeled dataset."""
    if len(data) == 0:
        raise DataError("cannot evaluate on an empty dataset")
    return macro_f(list(data.labels), predict_batch(model, data))


def cross_validate(
    data: LabeledDataset,
    folds: Optional[int] = None,
    hyper: Optional[ClassifierConfig] = None,
    workers: int = 1,
) -> CrossValidationReport:
    """
    K-fold cross-validation.

    Items are shuffled with a generator seeded by ``hyper.seed``, then cut
    into contiguous blocks; block k is the test set of fold k. A fold whose
    training part holds a single class gets a constant model predicting it.

    Args:
        data: Labeled dataset
        folds: Number of folds, at least 2 and at most len(data) (defaults to settings)
        hyper: Classifier hyperparameters (defaults to settings)
        workers: Folds trained concurrently

    Returns:
        CrossValidationReport with per-fold and mean reports

    Raises:
        ContractError: If folds is out of range
    """
    hyper = hyper or settings.classifier
    folds = folds or settings.experiment.folds
    if folds < 2:
        raise ContractError(f"folds must be >= 2, got {folds}")
    if folds > len(data):
        raise ContractError(f"folds ({folds}) exceeds the dataset size ({len(data)})")

    order = np.random.default_rng(hyper.seed).permutation(len(data))
    splits = list(KFold(n_splits=folds, shuffle=False).split(order))

    def run_fold(split: tuple[np.ndarray, np.ndarray]) -> EvaluationReport:
        train_rows, test_rows = split
        model = train(data.subset(order[train_rows].tolist()), hyper, allow_single_class=True)
        return evaluate(model, data.subset(order[test_rows].tolist()))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            reports: List[EvaluationReport] = list(executor.map(run_fold, splits))
    else:
        reports = [run_fold(split) for split in splits]

    result = summarize_folds(reports, seed=hyper.seed)
    logger.info(
        f"{folds}-fold cross-validation: mean macro-F {result.mean.macro_f:.4f} "
        f"(std {result.macro_f_std:.4f})"
    )
    return result
