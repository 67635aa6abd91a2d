"""Experiment commands, sweeps and synthetic data."""

from app.experiments.commands import COMMANDS, CommandResult
from app.experiments.run import RunConfig, build_run_config, mark_run_complete, prepare_run_dir
from app.experiments.sweeps import (
    SweepCurve,
    SweepPoint,
    load_curve,
    save_curve,
    sweep_dictionary_size,
    sweep_seed_lexicon,
)
from app.experiments.synthetic import (
    make_aligned_spaces,
    make_linear_instance,
    make_planted_setup,
    make_tweets,
    write_bundle,
)

__all__ = [
    "COMMANDS",
    "CommandResult",
    "RunConfig",
    "SweepCurve",
    "SweepPoint",
    "build_run_config",
    "load_curve",
    "make_aligned_spaces",
    "make_linear_instance",
    "make_planted_setup",
    "make_tweets",
    "mark_run_complete",
    "prepare_run_dir",
    "save_curve",
    "sweep_dictionary_size",
    "sweep_seed_lexicon",
    "write_bundle",
]
