"""Tweet datasets: TSV I/O, featurization and sparse matrix export."""

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import sparse
from sklearn.datasets import dump_svmlight_file

from app.core.config import settings
from app.core.exceptions import ContractError, DataError, ParseError
from app.core.logging import get_logger
from app.core.types import Label
from app.features.extractor import Tweet, extract_features
from app.features.index import FeatureIndex, FeatureVector
from app.lexicon.lexicon import PolarityLexicon

logger = get_logger(__name__)

UNLABELED_ID = -1


@dataclass
class LabeledDataset:
    """Feature vectors aligned one-to-one with tweet ids and labels."""

    ids: List[str] = field(default_factory=list)
    vectors: List[FeatureVector] = field(default_factory=list)
    labels: List[Optional[Label]] = field(default_factory=list)
    n_features: int = 0

    def __post_init__(self) -> None:
        if not len(self.ids) == len(self.vectors) == len(self.labels):
            raise ContractError("ids, vectors and labels must have equal lengths")

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def is_labeled(self) -> bool:
        """True when every item carries a label."""
        return all(label is not None for label in self.labels)

    def matrix(self, n_features: Optional[int] = None) -> sparse.csr_matrix:
        """
        Sparse n x F matrix of the vectors.

        Args:
            n_features: Column count (defaults to the dataset's); larger ids are dropped

        Returns:
            CSR matrix of float64
        """
        width = self.n_features if n_features is None else n_features
        rows: List[int] = []
        cols: List[int] = []
        data: List[float] = []
        for row, vector in enumerate(self.vectors):
            for feature_id, value in vector.items():
                if feature_id < width:
                    rows.append(row)
                    cols.append(feature_id)
                    data.append(value)
        return sparse.csr_matrix(
            (np.asarray(data, dtype=np.float64), (rows, cols)), shape=(len(self), width)
        )

    def class_ids(self) -> np.ndarray:
        """
        Labels as positions in the fixed class order.

        Raises:
            DataError: If an item is unlabeled
        """
        if not self.is_labeled:
            raise DataError("dataset contains unlabeled items")
        return np.array([label.class_id for label in self.labels], dtype=np.int64)

    def subset(self, positions: Sequence[int]) -> "LabeledDataset":
        """Items at ``positions`` in that order (repeats allowed)."""
        return LabeledDataset(
            ids=[self.ids[i] for i in positions],
            vectors=[self.vectors[i] for i in positions],
            labels=[self.labels[i] for i in positions],
            n_features=self.n_features,
        )


def load_dataset(path: str | Path) -> List[Tweet]:
    """
    Load ``id<TAB>label<TAB>text`` (or ``id<TAB>text``) lines.

    An empty label cell means unlabeled. Quotes are ordinary characters.

    Args:
        path: Dataset file

    Returns:
        Tweets in file order

    Raises:
        FileNotFoundError: If the file doesn't exist
        ParseError: On a malformed row or unknown label
    """
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"Dataset file not found: {file_path}")

    try:
        df = pd.read_csv(
            file_path,
            sep="\t",
            header=None,
            dtype=str,
            quoting=csv.QUOTE_NONE,
            keep_default_na=False,
            skip_blank_lines=True,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        logger.warning(f"Dataset {file_path} is empty")
        return []
    except pd.errors.ParserError as e:
        raise ParseError(str(e), None, str(file_path)) from e

    if df.shape[1] == 3:
        df.columns = ["id", "label", "text"]
    elif df.shape[1] == 2:
        df.columns = ["id", "text"]
        df["label"] = ""
    else:
        raise ParseError(f"expected 2 or 3 columns, got {df.shape[1]}", 1, str(file_path))

    tweets: List[Tweet] = []
    for row_number, row in enumerate(df.itertuples(index=False), start=1):
        if pd.isna(row.id) or pd.isna(row.text) or pd.isna(row.label):
            raise ParseError("missing column", row_number, str(file_path))
        label: Optional[Label] = None
        if row.label.strip():
            try:
                label = Label.from_string(row.label)
            except ValueError:
                raise ParseError(f"unknown label {row.label!r}", row_number, str(file_path)) from None
        tweets.append(Tweet(id=row.id, text=row.text, label=label))

    logger.info(f"Loaded {len(tweets)} tweets from {file_path}")
    return tweets


def save_dataset(tweets: Sequence[Tweet], path: str | Path) -> None:
    """
    Write tweets as ``id<TAB>label<TAB>text`` lines (empty label when unlabeled).

    Raises:
        ContractError: If an id or text contains a tab or a newline
    """
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding="utf-8", newline="\n") as f:
        for tweet in tweets:
            if any(c in tweet.id + tweet.text for c in "\t\r\n"):
                raise ContractError(f"tweet '{tweet.id}' contains a tab or newline")
            label = tweet.label.value if tweet.label is not None else ""
            f.write(f"{tweet.id}\t{label}\t{tweet.text}\n")
    logger.info(f"Saved {len(tweets)} tweets to {file_path}")


def featurize_dataset(
    tweets: Sequence[Tweet],
    lexicons: Sequence[PolarityLexicon],
    index: FeatureIndex,
    ngram_max: Optional[int] = None,
    training: bool = True,
    workers: int = 1,
) -> LabeledDataset:
    """
    Featurize tweets in input order.

    In training mode the index grows with unseen features. In inference mode
    a frozen copy of the index is used, so unseen features are dropped and
    the caller's index is not modified; tweets are then featurized in
    parallel on ``workers`` threads.

    Args:
        tweets: Tweets to featurize
        lexicons: Polarity lexicons (may be empty)
        index: Shared feature index
        ngram_max: Highest n-gram order (defaults to settings)
        training: Grow the index (True) or use it frozen (False)
        workers: Threads for inference-mode featurization

    Returns:
        LabeledDataset with ``n_features`` equal to the index size

    Raises:
        ContractError: In training mode with a frozen index, or inference
            mode with an empty index
    """
    if ngram_max is None:
        ngram_max = settings.features.ngram_max

    if training:
        if index.frozen:
            raise ContractError("cannot grow a frozen feature index")
        vectors = [extract_features(t, lexicons, index, ngram_max) for t in tweets]
    else:
        if len(index) == 0:
            raise ContractError("inference needs a non-empty feature index")
        index = index.frozen_copy()
        if workers > 1 and len(tweets) > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                vectors = list(
                    executor.map(lambda t: extract_features(t, lexicons, index, ngram_max), tweets)
                )
        else:
            vectors = [extract_features(t, lexicons, index, ngram_max) for t in tweets]

    dataset = LabeledDataset(
        ids=[t.id for t in tweets],
        vectors=vectors,
        labels=[t.label for t in tweets],
        n_features=len(index),
    )
    logger.debug(
        f"Featurized {len(dataset)} tweets ({'training' if training else 'inference'}), "
        f"{len(index)} features"
    )
    return dataset


def export_svmlight(dataset: LabeledDataset, index: FeatureIndex, path: str | Path) -> Path:
    """
    Write the dataset in sparse ``label index:value`` format plus the index mapping.

    Labels are class positions in the fixed order (negative 0, neutral 1,
    positive 2); unlabeled items get -1. Feature ids are zero-based. The
    mapping goes next to the matrix with suffix ``.index``.

    Returns:
        Path of the mapping file
    """
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    y = np.array(
        [label.class_id if label is not None else UNLABELED_ID for label in dataset.labels],
        dtype=np.int64,
    )
    dump_svmlight_file(
        dataset.matrix(len(index)),
        y,
        str(file_path),
        zero_based=True,
        comment="classes: negative=0 neutral=1 positive=2",
    )
    index_path = file_path.with_suffix(".index")
    index.save(index_path)
    logger.info(f"Exported {len(dataset)} rows x {len(index)} features to {file_path}")
    return index_path
