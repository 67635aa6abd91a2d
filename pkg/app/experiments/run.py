"""Run configuration and run directories.

A run configuration is assembled in three layers: defaults from ``settings``,
then a key-value config file (dotenv syntax), then command-line flags. Every
command writes under ``<output_dir>/<command>-<hash>``, where the hash covers
the whole configuration except where outputs go and how many threads run.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.core.config import ClassifierConfig, settings
from app.core.exceptions import ConfigurationError, RunDirectoryExistsError
from app.core.logging import format_key_values, get_logger

logger = get_logger(__name__)

HASH_LENGTH = 12
CONFIG_FILE = "config.json"

# spellings accepted in config files and on the command line
KEY_ALIASES: Dict[str, str] = {
    "lambda": "lambda_threshold",
    "dict": "dictionary",
    "lexicon": "lexicons",
    "out": "output_dir",
    "map": "map_path",
    "train": "train_path",
    "test": "test_path",
    "heldout": "heldout_path",
}

LIST_KEYS = {"lexicons", "sizes", "counts"}

# settings that change where or how fast a run happens, not what it produces
UNHASHED_KEYS = {"output_dir", "overwrite", "workers"}


class RunConfig(BaseModel):
    """Everything a command needs: inputs, hyperparameters and the output root."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    src_emb: Optional[Path] = None
    tgt_emb: Optional[Path] = None
    src_lang: str = "src"
    tgt_lang: str = "tgt"
    dictionary: Optional[Path] = None
    heldout_path: Optional[Path] = None
    lexicons: List[Path] = Field(default_factory=list)
    native_lexicon: Optional[Path] = None
    gold_translations: Optional[Path] = None
    map_path: Optional[Path] = None
    train_path: Optional[Path] = None
    test_path: Optional[Path] = None

    case_fold: bool = Field(default_factory=lambda: settings.embeddings.case_fold)
    lambda_threshold: float = Field(
        default_factory=lambda: settings.transfer.lambda_threshold, gt=0.0, le=1.0
    )
    ngram_max: int = Field(default_factory=lambda: settings.features.ngram_max, ge=1)
    regularization: float = Field(default_factory=lambda: settings.classifier.regularization, gt=0.0)
    epochs: int = Field(default_factory=lambda: settings.classifier.epochs, ge=1)
    tolerance: float = Field(default_factory=lambda: settings.classifier.tolerance, gt=0.0)
    seed: int = Field(default_factory=lambda: settings.classifier.seed, ge=0)
    seeds: int = Field(default_factory=lambda: settings.experiment.seeds, ge=1)
    folds: int = Field(default_factory=lambda: settings.experiment.folds, ge=2)
    heldout_fraction: float = Field(
        default_factory=lambda: settings.alignment.heldout_fraction, gt=0.0, lt=1.0
    )
    precision_k: int = Field(default_factory=lambda: settings.alignment.precision_k, ge=1)
    sizes: List[int] = Field(default_factory=list)
    counts: List[int] = Field(default_factory=list)

    n_words: int = Field(default=2000, ge=1)
    dim: int = Field(default=50, ge=1)
    noise: float = Field(default=0.01, ge=0.0)
    dictionary_size: int = Field(default=500, ge=1)
    lexicon_size: int = Field(default=800, ge=2)
    n_train: int = Field(default=2000, ge=0)
    n_test: int = Field(default=500, ge=0)

    output_dir: Path = Field(default_factory=lambda: Path(settings.experiment.output_dir))
    overwrite: bool = False
    workers: int = Field(default_factory=lambda: settings.experiment.workers, ge=1)

    def classifier_config(self) -> ClassifierConfig:
        """Classifier hyperparameters of this run."""
        return ClassifierConfig(
            regularization=self.regularization,
            epochs=self.epochs,
            tolerance=self.tolerance,
            seed=self.seed,
        )

    def seed_list(self) -> List[int]:
        """The ``seeds`` consecutive seeds starting at ``seed``."""
        return list(range(self.seed, self.seed + self.seeds))

    def require(self, *names: str) -> None:
        """
        Check that inputs are configured and exist.

        Raises:
            ConfigurationError: If a named setting is unset or empty
            FileNotFoundError: If a configured path does not exist
        """
        for name in names:
            value = getattr(self, name)
            if value is None or value == []:
                flag = next((k for k, v in KEY_ALIASES.items() if v == name), name)
                raise ConfigurationError(f"missing required setting '{flag.replace('_', '-')}'")
            for path in value if isinstance(value, list) else [value]:
                if isinstance(path, Path) and not path.exists():
                    raise FileNotFoundError(f"{name}: file not found: {path}")

    def canonical_json(self) -> str:
        """Sorted-key JSON of the hashed settings."""
        data = self.model_dump(mode="json", exclude=UNHASHED_KEYS)
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    def run_hash(self, command: str) -> str:
        """First hex digits of the SHA-256 of command plus configuration."""
        digest = hashlib.sha256(f"{command}\n{self.canonical_json()}".encode("utf-8"))
        return digest.hexdigest()[:HASH_LENGTH]


def normalize_key(key: str) -> str:
    """Map a flag or file key to its RunConfig field name."""
    name = key.strip().lstrip("-").lower().replace("-", "_")
    return KEY_ALIASES.get(name, name)


def _coerce(name: str, value: Any) -> Any:
    if name in LIST_KEYS and isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


def read_config_file(path: str | Path) -> Dict[str, Any]:
    """
    Read a ``key=value`` config file (dotenv syntax; lists comma-separated).

    Raises:
        FileNotFoundError: If the file doesn't exist
    """
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"Config file not found: {file_path}")
    values = dotenv_values(file_path)
    return {normalize_key(k): _coerce(normalize_key(k), v) for k, v in values.items() if v is not None}


def build_run_config(
    overrides: Optional[Mapping[str, Any]] = None, config_file: Optional[str | Path] = None
) -> RunConfig:
    """
    Layer settings defaults, an optional config file and explicit overrides.

    Args:
        overrides: Values set on the command line (None values are ignored)
        config_file: Optional key-value file

    Returns:
        Validated RunConfig

    Raises:
        ConfigurationError: On unknown keys or invalid values
    """
    layered: Dict[str, Any] = {}
    if config_file is not None:
        layered.update(read_config_file(config_file))
    for key, value in (overrides or {}).items():
        if value is not None:
            name = normalize_key(key)
            layered[name] = _coerce(name, value)

    try:
        return RunConfig(**layered)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()
        )
        raise ConfigurationError(f"invalid configuration: {problems}") from e


def prepare_run_dir(config: RunConfig, command: str) -> Path:
    """
    Create the run directory of a command.

    A directory holding ``config.json`` belongs to a finished run and is only
    reused with ``overwrite``. A directory without it was left by a failed
    run and is reused as is.

    Raises:
        RunDirectoryExistsError: If a finished run already used the directory
            and ``overwrite`` is not set
    """
    run_dir = config.output_dir / f"{command}-{config.run_hash(command)}"
    if (run_dir / CONFIG_FILE).exists() and not config.overwrite:
        raise RunDirectoryExistsError(
            f"run directory {run_dir} already exists; pass --overwrite to replace its files",
            {"run_dir": str(run_dir)},
        )
    run_dir.mkdir(parents=True, exist_ok=True)
    # the run counts as unfinished until mark_run_complete
    (run_dir / CONFIG_FILE).unlink(missing_ok=True)
    logger.info(f"Run directory: {run_dir}")
    return run_dir


def mark_run_complete(config: RunConfig, run_dir: Path) -> None:
    """Record the configuration of a run whose artifacts are all written."""
    (run_dir / CONFIG_FILE).write_text(
        json.dumps(json.loads(config.canonical_json()), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def write_sidecar(path: Path, fields: Mapping[str, Any]) -> None:
    """Write a machine-readable ``key=value`` report file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(format_key_values(fields))
