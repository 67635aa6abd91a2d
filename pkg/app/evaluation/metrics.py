"""Per-class precision, recall and F1 with macro averaging over the fixed classes."""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Union

import numpy as np
from sklearn.metrics import confusion_matrix

from app.core.exceptions import ContractError
from app.core.logging import get_logger
from app.core.types import CLASS_ORDER, Label

logger = get_logger(__name__)

LabelLike = Union[Label, str]


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    """Scores of one prediction run.

    Per-class arrays follow the fixed class order (negative, neutral,
    positive). Confusion rows are gold classes, columns predicted classes.
    """

    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    macro_f: float
    confusion: np.ndarray

    def f1_of(self, label: Label) -> float:
        """F1 of one class."""
        return float(self.f1[label.class_id])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EvaluationReport):
            return NotImplemented
        return (
            self.macro_f == other.macro_f
            and np.array_equal(self.precision, other.precision)
            and np.array_equal(self.recall, other.recall)
            and np.array_equal(self.f1, other.f1)
            and np.array_equal(self.support, other.support)
            and np.array_equal(self.confusion, other.confusion)
        )

    def as_fields(self) -> Dict[str, object]:
        """Report as ordered key-value fields."""
        fields: Dict[str, object] = {"macro_f": self.macro_f}
        for label in CLASS_ORDER:
            i = label.class_id
            fields[f"{label.value}.precision"] = float(self.precision[i])
            fields[f"{label.value}.recall"] = float(self.recall[i])
            fields[f"{label.value}.f1"] = float(self.f1[i])
            fields[f"{label.value}.support"] = int(self.support[i])
        for gold in CLASS_ORDER:
            for pred in CLASS_ORDER:
                fields[f"confusion.{gold.value}.{pred.value}"] = int(
                    self.confusion[gold.class_id, pred.class_id]
                )
        return fields

    def render_table(self) -> str:
        """Aligned text table of per-class scores, macro-F and the confusion matrix."""
        width = max(len(label.value) for label in CLASS_ORDER) + 2
        lines = [
            f"{'class':<{width}}{'precision':>11}{'recall':>11}{'f1':>11}{'support':>9}"
        ]
        for label in CLASS_ORDER:
            i = label.class_id
            lines.append(
                f"{label.value:<{width}}{self.precision[i]:>11.4f}{self.recall[i]:>11.4f}"
                f"{self.f1[i]:>11.4f}{int(self.support[i]):>9d}"
            )
        lines.append(f"{'macro-F':<{width}}{'':>22}{self.macro_f:>11.4f}{int(self.support.sum()):>9d}")
        lines.append("")
        corner = "gold/pred"
        lines.append(f"{corner:<{width + 2}}" + "".join(f"{c.value:>10}" for c in CLASS_ORDER))
        for gold in CLASS_ORDER:
            row = self.confusion[gold.class_id]
            lines.append(f"{gold.value:<{width + 2}}" + "".join(f"{int(c):>10d}" for c in row))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class CrossValidationReport:
    """Per-fold reports and their average."""

    folds: List[EvaluationReport]
    mean: EvaluationReport
    macro_f_std: float
    seed: int = 0

    @property
    def fold_macro_f(self) -> List[float]:
        """Macro-F of every fold in fold order."""
        return [report.macro_f for report in self.folds]

    def as_fields(self) -> Dict[str, object]:
        """Mean report plus per-fold macro-F as ordered key-value fields."""
        fields: Dict[str, object] = {
            "folds": len(self.folds),
            "seed": self.seed,
            "macro_f_std": self.macro_f_std,
        }
        for i, value in enumerate(self.fold_macro_f):
            fields[f"fold{i}.macro_f"] = value
        fields.update(self.mean.as_fields())
        return fields


def _to_label(value: LabelLike) -> Label:
    if isinstance(value, Label):
        return value
    try:
        return Label.from_string(value)
    except ValueError:
        raise ContractError(f"unknown label token {value!r}") from None


def _safe_ratio(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    # zero denominators yield zero
    out = np.zeros_like(numerator, dtype=np.float64)
    np.divide(numerator, denominator, out=out, where=denominator > 0)
    return out


def report_from_confusion(confusion: np.ndarray) -> EvaluationReport:
    """
    Scores from a 3x3 confusion matrix (rows gold, columns predicted).

    P = TP/(TP+FP), R = TP/(TP+FN), F1 = 2PR/(P+R), each 0 when its
    denominator is 0. macro_f averages F1 over all three classes.
    """
    confusion = np.asarray(confusion, dtype=np.int64)
    tp = np.diag(confusion).astype(np.float64)
    predicted = confusion.sum(axis=0).astype(np.float64)
    support = confusion.sum(axis=1)

    precision = _safe_ratio(tp, predicted)
    recall = _safe_ratio(tp, support.astype(np.float64))
    f1 = _safe_ratio(2.0 * precision * recall, precision + recall)

    return EvaluationReport(
        precision=precision,
        recall=recall,
        f1=f1,
        support=support,
        macro_f=float(f1.sum() / len(CLASS_ORDER)),
        confusion=confusion,
    )


def macro_f(gold: Sequence[LabelLike], pred: Sequence[LabelLike]) -> EvaluationReport:
    """
    Score predictions against gold labels.

    Args:
        gold: Gold labels (Label members or label tokens)
        pred: Predicted labels, same length

    Returns:
        EvaluationReport

    Raises:
        ContractError: On a length mismatch, empty input or unknown label token
    """
    if len(gold) != len(pred):
        raise ContractError(f"gold has {len(gold)} labels but pred has {len(pred)}")
    if not gold:
        raise ContractError("cannot score an empty prediction list")

    gold_ids = [_to_label(g).class_id for g in gold]
    pred_ids = [_to_label(p).class_id for p in pred]
    confusion = confusion_matrix(gold_ids, pred_ids, labels=list(range(len(CLASS_ORDER))))
    return report_from_confusion(confusion)


def average_reports(reports: Sequence[EvaluationReport]) -> EvaluationReport:
    """
    Average several reports.

    Per-class precision, recall, F1 and macro-F are unweighted means; support
    and confusion counts are summed.

    Raises:
        ContractError: If no report is given
    """
    if not reports:
        raise ContractError("cannot average zero reports")
    f1 = np.mean([r.f1 for r in reports], axis=0)
    return EvaluationReport(
        precision=np.mean([r.precision for r in reports], axis=0),
        recall=np.mean([r.recall for r in reports], axis=0),
        f1=f1,
        support=np.sum([r.support for r in reports], axis=0),
        macro_f=float(np.mean([r.macro_f for r in reports])),
        confusion=np.sum([r.confusion for r in reports], axis=0),
    )


def summarize_folds(reports: Sequence[EvaluationReport], seed: int = 0) -> CrossValidationReport:
    """Combine fold reports; the spread is the sample standard deviation of fold macro-F."""
    scores = [r.macro_f for r in reports]
    std = float(np.std(scores, ddof=1)) if len(scores) > 1 else 0.0
    return CrossValidationReport(
        folds=list(reports), mean=average_reports(reports), macro_f_std=std, seed=seed
    )
