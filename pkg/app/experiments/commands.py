"""End-to-end commands behind the command-line subcommands.

Every command validates its inputs, creates its run directory, writes its
artifacts there and emits its report as a ``[title]`` key-value block on
standard error plus a ``.kv`` sidecar file.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

import pandas as pd

from app.alignment.dictionary import load_dictionary
from app.alignment.linear_map import (
    LinearMap,
    build_pairs,
    fit_linear_map,
    load_linear_map,
    residual_gradient_norm,
    save_linear_map,
)
from app.alignment.retrieval import evaluate_retrieval
from app.core.logging import emit_report_block, get_logger
from app.core.types import CLASS_ORDER
from app.embeddings.loader import load_embeddings
from app.embeddings.table import EmbeddingTable
from app.evaluation.model import save_model
from app.evaluation.trainer import cross_validate, evaluate, train
from app.experiments.run import RunConfig, mark_run_complete, prepare_run_dir, write_sidecar
from app.experiments.sweeps import DownstreamTask, save_curve, sweep_dictionary_size, sweep_seed_lexicon
from app.experiments.synthetic import make_planted_setup, make_tweets, write_bundle
from app.features.dataset import export_svmlight, featurize_dataset, load_dataset
from app.features.index import FeatureIndex
from app.lexicon.lexicon import (
    PolarityLexicon,
    lexicon_stats,
    load_lexicon,
    save_lexicon,
    union_all,
)
from app.lexicon.transfer import transfer_lexicon

logger = get_logger(__name__)


@dataclass
class CommandResult:
    """Run directory, reported fields and in-memory artifacts of a command."""

    run_dir: Path
    fields: Dict[str, Any] = field(default_factory=dict)
    artifacts: Dict[str, Any] = field(default_factory=dict)


def _report(run_dir: Path, title: str, fields: Mapping[str, Any]) -> None:
    emit_report_block(title, fields)
    write_sidecar(run_dir / f"{title}.kv", fields)


def _load_tables(config: RunConfig) -> tuple[EmbeddingTable, EmbeddingTable]:
    config.require("src_emb", "tgt_emb")
    src = load_embeddings(config.src_emb, config.src_lang, config.case_fold)
    tgt = load_embeddings(config.tgt_emb, config.tgt_lang, config.case_fold)
    return src, tgt


def _load_lexicons(config: RunConfig) -> List[PolarityLexicon]:
    return [load_lexicon(path, case_fold=config.case_fold) for path in config.lexicons]


def _fit_from_dictionary(
    config: RunConfig, src: EmbeddingTable, tgt: EmbeddingTable
) -> tuple[LinearMap, Dict[str, Any]]:
    config.require("dictionary")
    dictionary = load_dictionary(config.dictionary, config.case_fold)
    pairs = build_pairs(dictionary, src, tgt)
    linear_map = fit_linear_map(pairs)
    fields = {
        "dictionary_entries": len(dictionary),
        "train_pairs": pairs.n,
        "skipped_pairs": pairs.skipped,
        "mean_squared_residual": linear_map.mean_squared_residual,
        "gradient_norm": residual_gradient_norm(linear_map, pairs),
        "solver": linear_map.solver_tag,
    }
    return linear_map, fields


def cmd_align(config: RunConfig) -> CommandResult:
    """
    Fit a linear map on the bilingual dictionary and write it to ``map.txt``.

    With a held-out dictionary the report includes precision@k.
    """
    src, tgt = _load_tables(config)
    linear_map, fields = _fit_from_dictionary(config, src, tgt)
    if config.heldout_path is not None:
        config.require("heldout_path")
        heldout = load_dictionary(config.heldout_path, config.case_fold)
        retrieval = evaluate_retrieval(linear_map, heldout, src, tgt, config.precision_k)
        fields.update(retrieval.as_fields())

    run_dir = prepare_run_dir(config, "align")
    save_linear_map(linear_map, run_dir / "map.txt")
    _report(run_dir, "align", fields)
    mark_run_complete(config, run_dir)
    return CommandResult(run_dir, fields, {"map": linear_map})


def cmd_transfer(config: RunConfig) -> CommandResult:
    """
    Transfer every configured lexicon into the target language.

    The map comes from ``--map`` or, when absent, is fitted on ``--dict``.
    Each output lexicon is written as ``<name>.tsv`` with provenance columns.
    """
    config.require("lexicons")
    src, tgt = _load_tables(config)
    if config.map_path is not None:
        config.require("map_path")
        linear_map = load_linear_map(config.map_path)
    else:
        linear_map, _ = _fit_from_dictionary(config, src, tgt)

    native = None
    if config.native_lexicon is not None:
        config.require("native_lexicon")
        native = load_lexicon(config.native_lexicon, case_fold=config.case_fold)

    lexicons = _load_lexicons(config)
    run_dir = prepare_run_dir(config, "transfer")
    outputs: List[PolarityLexicon] = []
    fields: Dict[str, Any] = {}
    for lexicon in lexicons:
        output, report = transfer_lexicon(
            lexicon,
            linear_map,
            src,
            tgt,
            config.lambda_threshold,
            native=native,
            workers=config.workers,
        )
        save_lexicon(output, run_dir / f"{output.name}.tsv")
        report_fields = {**report.as_fields(), **lexicon_stats(output).as_fields()}
        _report(run_dir, f"transfer.{lexicon.name}", report_fields)
        fields.update({f"{lexicon.name}.{k}": v for k, v in report_fields.items()})
        outputs.append(output)
    mark_run_complete(config, run_dir)
    return CommandResult(run_dir, fields, {"lexicons": outputs, "map": linear_map})


def cmd_union(config: RunConfig) -> CommandResult:
    """Union all configured lexicons into ``<name>.tsv``."""
    config.require("lexicons")
    lexicons = _load_lexicons(config)
    union = union_all(lexicons)
    run_dir = prepare_run_dir(config, "union")
    save_lexicon(union, run_dir / f"{union.name}.tsv")
    fields = {
        "inputs": len(lexicons),
        "output_size": len(union),
        "conflict_drops": union.conflict_drops,
        **lexicon_stats(union).as_fields(),
    }
    _report(run_dir, "union", fields)
    mark_run_complete(config, run_dir)
    return CommandResult(run_dir, fields, {"lexicon": union})


def cmd_featurize(config: RunConfig) -> CommandResult:
    """
    Featurize the training split (growing the index) and optionally the test
    split (frozen index) into sparse ``.svm`` files with their ``.index`` mappings.
    """
    config.require("train_path")
    lexicons = _load_lexicons(config)
    index = FeatureIndex()
    train_set = featurize_dataset(load_dataset(config.train_path), lexicons, index, config.ngram_max)
    test_set = None
    if config.test_path is not None:
        config.require("test_path")
        test_set = featurize_dataset(
            load_dataset(config.test_path), lexicons, index, config.ngram_max,
            training=False, workers=config.workers,
        )

    run_dir = prepare_run_dir(config, "featurize")
    export_svmlight(train_set, index, run_dir / "train.svm")
    fields: Dict[str, Any] = {"features": len(index), "train_rows": len(train_set)}
    if test_set is not None:
        export_svmlight(test_set, index, run_dir / "test.svm")
        fields["test_rows"] = len(test_set)
    _report(run_dir, "featurize", fields)
    mark_run_complete(config, run_dir)
    return CommandResult(run_dir, fields, {"index": index, "train": train_set, "test": test_set})


def lexicon_sets(lexicons: List[PolarityLexicon]) -> List[tuple[str, List[PolarityLexicon]]]:
    """The evaluated lexicon sets: none, each lexicon alone, and all of them when several."""
    sets: List[tuple[str, List[PolarityLexicon]]] = [("none", [])]
    sets += [(lexicon.name, [lexicon]) for lexicon in lexicons]
    if len(lexicons) > 1:
        sets.append(("all", list(lexicons)))
    return sets


def cmd_train_eval(config: RunConfig) -> CommandResult:
    """
    Train and evaluate the classifier once per lexicon set.

    The "none" set is the no-lexicon ablation. With a test split each set is
    trained on the training split and scored on the test split; without one
    it is cross-validated on the training split. Per-set reports go to
    ``<set>.report.txt`` and ``<set>.kv``; all sets are collected in
    ``summary.tsv``.
    """
    config.require("train_path")
    train_tweets = load_dataset(config.train_path)
    test_tweets = None
    if config.test_path is not None:
        config.require("test_path")
        test_tweets = load_dataset(config.test_path)
    lexicons = _load_lexicons(config)
    hyper = config.classifier_config()

    run_dir = prepare_run_dir(config, "train-eval")
    rows: List[Dict[str, Any]] = []
    reports: Dict[str, Any] = {}
    for set_name, chosen in lexicon_sets(lexicons):
        index = FeatureIndex()
        train_set = featurize_dataset(train_tweets, chosen, index, config.ngram_max)
        if test_tweets is not None:
            model = train(train_set, hyper)
            test_set = featurize_dataset(
                test_tweets, chosen, index, config.ngram_max, training=False, workers=config.workers
            )
            report = evaluate(model, test_set)
            save_model(model, run_dir / f"{set_name}.model")
            fields = report.as_fields()
            table = report.render_table()
        else:
            cv = cross_validate(train_set, config.folds, hyper, workers=config.workers)
            report = cv.mean
            fields = cv.as_fields()
            table = report.render_table()
        (run_dir / f"{set_name}.report.txt").write_text(table, encoding="utf-8")
        _report(run_dir, set_name, fields)
        reports[set_name] = report
        rows.append(
            {
                "lexicon_set": set_name,
                "lexicons": "+".join(lex.name for lex in chosen) or "-",
                "features": len(index),
                "macro_f": report.macro_f,
                **{f"f1_{label.value}": report.f1[label.class_id] for label in CLASS_ORDER},
            }
        )

    pd.DataFrame(rows).to_csv(run_dir / "summary.tsv", sep="\t", index=False, float_format="%.17g")
    summary = {row["lexicon_set"]: row["macro_f"] for row in rows}
    mark_run_complete(config, run_dir)
    return CommandResult(run_dir, summary, {"reports": reports})


def _downstream(config: RunConfig) -> Optional[DownstreamTask]:
    if config.train_path is None:
        return None
    config.require("train_path")
    test = None
    if config.test_path is not None:
        config.require("test_path")
        test = load_dataset(config.test_path)
    return DownstreamTask(
        train=load_dataset(config.train_path),
        test=test,
        ngram_max=config.ngram_max,
        hyper=config.classifier_config(),
        folds=config.folds,
    )


def _curve_fields(curve) -> Dict[str, Any]:
    fields: Dict[str, Any] = {"kind": curve.kind, "metric": curve.metric, "seed": curve.seed}
    for point in curve.points:
        fields[f"x{point.x}.score"] = point.score
        fields[f"x{point.x}.dispersion"] = point.dispersion
    for requested, used in curve.clamped:
        fields[f"clamped.{requested}"] = used
    return fields


def cmd_sweep_dict(config: RunConfig) -> CommandResult:
    """
    Dictionary-size sweep (``--sizes``) over ``--seeds`` seeds.

    Scores held-out precision@k, or macro-F when ``--train`` and lexicons are given.
    """
    config.require("dictionary", "sizes")
    src, tgt = _load_tables(config)
    dictionary = load_dictionary(config.dictionary, config.case_fold)
    heldout = None
    if config.heldout_path is not None:
        config.require("heldout_path")
        heldout = load_dictionary(config.heldout_path, config.case_fold)
    downstream = _downstream(config)

    curve = sweep_dictionary_size(
        src,
        tgt,
        dictionary,
        config.sizes,
        config.seed_list(),
        heldout=heldout,
        heldout_fraction=config.heldout_fraction,
        k=config.precision_k,
        downstream=downstream,
        lexicons=_load_lexicons(config) if downstream is not None else (),
        lambda_threshold=config.lambda_threshold,
        workers=config.workers,
    )
    run_dir = prepare_run_dir(config, "sweep-dict")
    save_curve(curve, run_dir / "sweep-dict")
    fields = _curve_fields(curve)
    _report(run_dir, "sweep-dict", fields)
    mark_run_complete(config, run_dir)
    return CommandResult(run_dir, fields, {"curve": curve})


def cmd_sweep_seed_lexicon(config: RunConfig) -> CommandResult:
    """
    Seed-lexicon sweep (``--counts``) over ``--seeds`` seeds.

    Uses the first ``--lexicon`` and its ``--gold-translations``. Scores
    transfer accuracy, or macro-F when ``--train`` is given.
    """
    config.require("lexicons", "gold_translations", "counts")
    src, tgt = _load_tables(config)
    lexicon = load_lexicon(config.lexicons[0], case_fold=config.case_fold)
    gold = load_dictionary(config.gold_translations, config.case_fold)

    curve = sweep_seed_lexicon(
        src,
        tgt,
        lexicon,
        gold,
        config.counts,
        config.seed_list(),
        downstream=_downstream(config),
        lambda_threshold=config.lambda_threshold,
        workers=config.workers,
    )
    run_dir = prepare_run_dir(config, "sweep-seed-lexicon")
    save_curve(curve, run_dir / "sweep-seed-lexicon")
    fields = _curve_fields(curve)
    _report(run_dir, "sweep-seed-lexicon", fields)
    mark_run_complete(config, run_dir)
    return CommandResult(run_dir, fields, {"curve": curve})


def cmd_gen_synthetic(config: RunConfig) -> CommandResult:
    """
    Write a synthetic bundle: two embedding files, an alignment dictionary, a
    planted source lexicon with gold translations, the gold target lexicon,
    and lexicon-driven train/test tweet sets.
    """
    setup = make_planted_setup(
        n_words=config.n_words,
        dim=config.dim,
        noise=config.noise,
        dictionary_size=config.dictionary_size,
        lexicon_size=config.lexicon_size,
        seed=config.seed,
    )
    train_tweets = make_tweets(setup, config.n_train, seed=config.seed + 2, id_prefix="train")
    test_tweets = make_tweets(setup, config.n_test, seed=config.seed + 3, id_prefix="test")

    run_dir = prepare_run_dir(config, "gen-synthetic")
    paths = write_bundle(setup, train_tweets, test_tweets, run_dir)
    fields: Dict[str, Any] = {
        "words": config.n_words,
        "dim": config.dim,
        "noise": config.noise,
        "dictionary_entries": len(setup.dictionary),
        "lexicon_size": len(setup.lexicon),
        "train_tweets": len(train_tweets),
        "test_tweets": len(test_tweets),
    }
    fields.update({f"path.{role}": path.name for role, path in paths.items()})
    _report(run_dir, "gen-synthetic", fields)
    mark_run_complete(config, run_dir)
    return CommandResult(run_dir, fields, {"setup": setup, "paths": paths})


COMMANDS = {
    "align": cmd_align,
    "transfer": cmd_transfer,
    "union": cmd_union,
    "featurize": cmd_featurize,
    "train-eval": cmd_train_eval,
    "sweep-dict": cmd_sweep_dict,
    "sweep-seed-lexicon": cmd_sweep_seed_lexicon,
    "gen-synthetic": cmd_gen_synthetic,
}
