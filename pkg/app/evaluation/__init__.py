"""Linear classifier training, prediction and macro-F scoring."""

from app.evaluation.metrics import (
    CrossValidationReport,
    EvaluationReport,
    average_reports,
    macro_f,
    report_from_confusion,
)
from app.evaluation.model import (
    LinearModel,
    decision_function,
    load_model,
    parse_model,
    predict,
    predict_batch,
    save_model,
    serialize_model,
)
from app.evaluation.trainer import cross_validate, evaluate, train

__all__ = [
    "CrossValidationReport",
    "EvaluationReport",
    "LinearModel",
    "average_reports",
    "cross_validate",
    "decision_function",
    "evaluate",
    "load_model",
    "macro_f",
    "parse_model",
    "predict",
    "predict_batch",
    "report_from_confusion",
    "save_model",
    "serialize_model",
    "train",
]
