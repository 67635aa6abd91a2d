"""Linear maps between embedding spaces fitted on bilingual dictionaries."""

from app.alignment.dictionary import (
    BilingualDictionary,
    DictionaryEntry,
    load_dictionary,
    parse_dictionary,
    save_dictionary,
    serialize_dictionary,
)
from app.alignment.linear_map import (
    LinearMap,
    PairSet,
    build_pairs,
    fit_linear_map,
    load_linear_map,
    objective,
    parse_linear_map,
    project,
    project_rows,
    residual_gradient_norm,
    save_linear_map,
    serialize_linear_map,
)
from app.alignment.retrieval import RetrievalReport, evaluate_retrieval, precision_at_k

__all__ = [
    "BilingualDictionary",
    "DictionaryEntry",
    "LinearMap",
    "PairSet",
    "RetrievalReport",
    "build_pairs",
    "evaluate_retrieval",
    "fit_linear_map",
    "load_dictionary",
    "load_linear_map",
    "objective",
    "parse_dictionary",
    "parse_linear_map",
    "precision_at_k",
    "project",
    "project_rows",
    "residual_gradient_norm",
    "save_dictionary",
    "save_linear_map",
    "serialize_dictionary",
    "serialize_linear_map",
]
