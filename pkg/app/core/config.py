"""Configuration management using Pydantic settings."""

from pathlib import Path

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load .env file into environment before creating any settings
# Use override=False to respect existing environment variables
env_path = Path(".env")
if env_path.exists():
    load_dotenv(env_path, override=False)


class EmbeddingConfig(BaseSettings):
    """Word-embedding loading configuration."""

    # Applied identically to embeddings, dictionaries and lexicons
    case_fold: bool = Field(default=True)

    model_config = SettingsConfigDict(
        env_prefix="EMB_", case_sensitive=False, extra="ignore"
    )


class AlignmentConfig(BaseSettings):
    """Linear map fitting and retrieval diagnostics configuration."""

    heldout_fraction: float = Field(default=0.2, gt=0.0, lt=1.0)
    precision_k: int = Field(default=1, ge=1)

    model_config = SettingsConfigDict(
        env_prefix="ALIGN_", case_sensitive=False, extra="ignore"
    )


class TransferConfig(BaseSettings):
    """Lexicon transfer configuration."""

    lambda_threshold: float = Field(default=0.65, gt=0.0, le=1.0)
    workers: int = Field(default=1, ge=1)

    model_config = SettingsConfigDict(
        env_prefix="TRANSFER_", case_sensitive=False, extra="ignore"
    )


class FeatureConfig(BaseSettings):
    """Tweet feature extraction configuration."""

    ngram_max: int = Field(default=2, ge=1)

    model_config = SettingsConfigDict(
        env_prefix="FEATURES_", case_sensitive=False, extra="ignore"
    )


class ClassifierConfig(BaseSettings):
    """Linear SVM hyperparameters."""

    regularization: float = Field(default=1.0, gt=0.0)
    epochs: int = Field(default=50, ge=1)
    tolerance: float = Field(default=1e-4, gt=0.0)
    seed: int = Field(default=42, ge=0)

    model_config = SettingsConfigDict(
        env_prefix="CLF_", case_sensitive=False, extra="ignore"
    )


class ExperimentConfig(BaseSettings):
    """Experiment runner configuration."""

    seeds: int = Field(default=5, ge=1)
    output_dir: str = Field(default="runs")
    workers: int = Field(default=1, ge=1)
    folds: int = Field(default=3, ge=2)

    model_config = SettingsConfigDict(
        env_prefix="EXP_", case_sensitive=False, extra="ignore"
    )


class Settings(BaseSettings):
    """Main application settings."""

    embeddings: EmbeddingConfig = Field(default_factory=EmbeddingConfig)
    alignment: AlignmentConfig = Field(default_factory=AlignmentConfig)
    transfer: TransferConfig = Field(default_factory=TransferConfig)
    features: FeatureConfig = Field(default_factory=FeatureConfig)
    classifier: ClassifierConfig = Field(default_factory=ClassifierConfig)
    experiment: ExperimentConfig = Field(default_factory=ExperimentConfig)
    log_level: str = Field(default="INFO")
    log_json: bool = Field(default=False)

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",  # Ignore extra fields from .env file that don't match model fields
    )


# Global settings instance
settings = Settings()
