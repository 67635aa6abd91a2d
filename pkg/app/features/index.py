"""Feature name to integer id mapping and sparse feature vectors."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional

import numpy as np

from app.core.exceptions import ContractError, ParseError
from app.core.logging import get_logger

logger = get_logger(__name__)


class FeatureIndex:
    """Shared, persistent mapping between feature names and integer ids.

    Ids are assigned densely in first-seen order. A frozen index never grows;
    lookups of unseen names return None.
    """

    def __init__(self, names: Optional[List[str]] = None, frozen: bool = False) -> None:
        """
        Initialize index.

        Args:
            names: Feature names in id order
            frozen: Whether the index may still grow
        """
        self._ids: Dict[str, int] = {}
        self._names: List[str] = []
        for name in names or []:
            self._add(name)
        self.frozen = frozen

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name: object) -> bool:
        return name in self._ids

    def __iter__(self) -> Iterator[str]:
        return iter(self._names)

    def _add(self, name: str) -> int:
        if name in self._ids:
            raise ContractError(f"duplicate feature name {name!r}")
        feature_id = len(self._names)
        self._ids[name] = feature_id
        self._names.append(name)
        return feature_id

    def get(self, name: str) -> Optional[int]:
        """Id of ``name`` or None."""
        return self._ids.get(name)

    def lookup(self, name: str) -> Optional[int]:
        """
        Id of ``name``, assigning a new id when the index is not frozen.

        Returns:
            Feature id, or None for an unseen name in a frozen index
        """
        feature_id = self._ids.get(name)
        if feature_id is None and not self.frozen:
            feature_id = self._add(name)
        return feature_id

    def name_of(self, feature_id: int) -> str:
        """Name of a feature id."""
        return self._names[feature_id]

    def names(self) -> List[str]:
        """All names in id order."""
        return list(self._names)

    def freeze(self) -> "FeatureIndex":
        """Stop the index from growing; returns self."""
        self.frozen = True
        return self

    def frozen_copy(self) -> "FeatureIndex":
        """Frozen index with the same names; this one is left as is."""
        return FeatureIndex(self._names, frozen=True)

    def save(self, path: str | Path) -> None:
        """Write ``id<TAB>name`` lines in id order."""
        file_path = Path(path)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, "w", encoding="utf-8", newline="\n") as f:
            for feature_id, name in enumerate(self._names):
                f.write(f"{feature_id}\t{name}\n")
        logger.info(f"Feature index ({len(self)} features) saved to {file_path}")

    @classmethod
    def load(cls, path: str | Path) -> "FeatureIndex":
        """
        Read a mapping written by ``save``; the loaded index is frozen.

        Raises:
            FileNotFoundError: If the file doesn't exist
            ParseError: If ids are not dense and in order
        """
        file_path = Path(path)
        if not file_path.exists():
            raise FileNotFoundError(f"Feature index file not found: {file_path}")
        names: List[str] = []
        with open(file_path, "r", encoding="utf-8") as f:
            for line_number, line in enumerate(f, start=1):
                stripped = line.rstrip("\r\n")
                if not stripped:
                    continue
                feature_id, _, name = stripped.partition("\t")
                if feature_id != str(len(names)) or not name:
                    raise ParseError("expected 'id<TAB>name' with dense ids", line_number, str(file_path))
                names.append(name)
        return cls(names, frozen=True)


@dataclass(frozen=True)
class FeatureVector:
    """Sparse feature vector: feature id to finite value, zeros omitted."""

    values: Dict[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for feature_id, value in self.values.items():
            if feature_id < 0:
                raise ContractError(f"negative feature id {feature_id}")
            if not np.isfinite(value):
                raise ContractError(f"non-finite value for feature {feature_id}")

    def __getitem__(self, feature_id: int) -> float:
        return self.values.get(feature_id, 0.0)

    def __len__(self) -> int:
        return len(self.values)

    def items(self) -> List[tuple[int, float]]:
        """Non-zero (id, value) pairs sorted by id."""
        return sorted(self.values.items())

    def to_dense(self, size: int) -> np.ndarray:
        """Dense vector of ``size`` entries; ids beyond ``size`` are dropped."""
        dense = np.zeros(size, dtype=np.float64)
        for feature_id, value in self.values.items():
            if feature_id < size:
                dense[feature_id] = value
        return dense

    def named(self, index: FeatureIndex) -> Dict[str, float]:
        """Values keyed by feature name."""
        return {index.name_of(i): v for i, v in self.items()}
