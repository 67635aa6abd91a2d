"""Tweet tokenization and feature extraction."""

from app.features.dataset import (
    LabeledDataset,
    export_svmlight,
    featurize_dataset,
    load_dataset,
    save_dataset,
)
from app.features.extractor import Tweet, extract_features, feature_counts
from app.features.index import FeatureIndex, FeatureVector
from app.features.tokenizer import EMOTICONS, Token, TokenStream, tokenize

__all__ = [
    "EMOTICONS",
    "FeatureIndex",
    "FeatureVector",
    "LabeledDataset",
    "Token",
    "TokenStream",
    "Tweet",
    "export_svmlight",
    "extract_features",
    "feature_counts",
    "featurize_dataset",
    "load_dataset",
    "save_dataset",
    "tokenize",
]
