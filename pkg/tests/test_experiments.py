"""Tests for run configuration, synthetic data, sweeps, commands and the CLI."""

import logging

import numpy as np
import pandas as pd
import pytest

from app.alignment.dictionary import BilingualDictionary
from app.core.exceptions import (
    ConfigurationError,
    ContractError,
    DataError,
    EmptyTrainingSetError,
    RunDirectoryExistsError,
)
from app.core.types import Label, Polarity
from app.embeddings.table import lookup
from app.experiments.cli import main
from app.experiments.commands import (
    cmd_align,
    cmd_gen_synthetic,
    cmd_train_eval,
    cmd_transfer,
    cmd_union,
    lexicon_sets,
)
from app.experiments.run import build_run_config, mark_run_complete, prepare_run_dir
from app.experiments.sweeps import (
    SweepCurve,
    SweepPoint,
    clamp_settings,
    load_curve,
    save_curve,
    sweep_dictionary_size,
    sweep_seed_lexicon,
    transfer_accuracy,
)
from app.experiments.synthetic import (
    make_aligned_spaces,
    make_planted_setup,
    make_tweets,
    source_word,
    target_word,
)
from app.lexicon.lexicon import lexicon_stats, load_lexicon, make_lexicon


@pytest.fixture
def restore_logging():
    """Put back the root logger handlers that the CLI replaces."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def small_bundle(tmp_path):
    """A small synthetic bundle written by gen-synthetic."""
    config = build_run_config(
        {
            "out": tmp_path / "runs",
            "n_words": 300,
            "dim": 10,
            "dictionary_size": 120,
            "lexicon_size": 100,
            "n_train": 60,
            "n_test": 30,
            "seed": 4,
        }
    )
    return cmd_gen_synthetic(config).artifacts["paths"]


def test_run_config_defaults():
    """Test defaults taken from settings."""
    config = build_run_config()
    assert config.lambda_threshold == 0.65
    assert config.ngram_max == 2
    assert config.lexicons == []
    assert config.case_fold is True


def test_run_config_layers(tmp_path):
    """Test that command-line values override the config file, which overrides defaults."""
    config_file = tmp_path / "run.env"
    config_file.write_text("lambda=0.5\nsizes=10, 20\nngram-max=3\nout=elsewhere\n", encoding="utf-8")

    config = build_run_config({"lambda": 0.7, "seed": 9}, config_file)
    assert config.lambda_threshold == 0.7
    assert config.sizes == [10, 20]
    assert config.ngram_max == 3
    assert config.seed == 9
    assert config.output_dir.name == "elsewhere"


def test_run_config_rejects_bad_values(tmp_path):
    """Test unknown keys, out-of-range values and a missing config file."""
    with pytest.raises(ConfigurationError, match="invalid configuration"):
        build_run_config({"colour": "blue"})
    with pytest.raises(ConfigurationError):
        build_run_config({"lambda": 1.5})
    with pytest.raises(ConfigurationError):
        build_run_config({"ngram_max": 0})
    with pytest.raises(FileNotFoundError):
        build_run_config({}, tmp_path / "missing.env")


def test_run_config_require(tmp_path):
    """Test the checks on required inputs."""
    config = build_run_config({"src_emb": tmp_path / "missing.vec"})
    with pytest.raises(ConfigurationError, match="missing required setting 'dict'"):
        config.require("dictionary")
    with pytest.raises(FileNotFoundError):
        config.require("src_emb")


def test_run_hash_ignores_placement_settings(tmp_path):
    """Test that the hash covers results but not where or how fast they are produced."""
    base = build_run_config({"seed": 1})
    moved = build_run_config({"seed": 1, "out": tmp_path, "workers": 4, "overwrite": True})
    assert base.run_hash("align") == moved.run_hash("align")
    assert base.run_hash("align") != base.run_hash("transfer")
    assert base.run_hash("align") != build_run_config({"seed": 2}).run_hash("align")
    assert len(base.run_hash("align")) == 12


def test_prepare_run_dir_refuses_overwrite(tmp_path):
    """Test that a finished run directory is only reused with overwrite."""
    config = build_run_config({"out": tmp_path})
    run_dir = prepare_run_dir(config, "union")
    assert run_dir.parent == tmp_path
    assert run_dir.name.startswith("union-")
    assert not (run_dir / "config.json").exists()

    (run_dir / "partial.tsv").write_text("left over\n", encoding="utf-8")
    assert prepare_run_dir(config, "union") == run_dir

    mark_run_complete(config, run_dir)
    assert (run_dir / "config.json").exists()
    with pytest.raises(RunDirectoryExistsError):
        prepare_run_dir(config, "union")

    overwrite = build_run_config({"out": tmp_path, "overwrite": True})
    assert prepare_run_dir(overwrite, "union") == run_dir
    assert not (run_dir / "config.json").exists()


def test_failed_command_can_rerun_without_overwrite(tmp_path, small_bundle):
    """Test that a command failing after creating its directory does not block an identical rerun."""
    bad_train = tmp_path / "bad.tsv"
    bad_train.write_text("1\tpositive\tgood day\n2\tpositive\tnice day\n", encoding="utf-8")
    config = build_run_config({"out": tmp_path / "runs", "train": bad_train, "test": small_bundle["test"]})

    with pytest.raises(DataError):
        cmd_train_eval(config)
    with pytest.raises(DataError):
        cmd_train_eval(config)

    good = build_run_config(
        {"out": tmp_path / "runs", "train": small_bundle["train"], "test": small_bundle["test"]}
    )
    result = cmd_train_eval(good)
    assert (result.run_dir / "config.json").exists()


def test_aligned_spaces_share_concepts():
    """Test that both views are linear images of the same latent vectors."""
    spaces = make_aligned_spaces(n_words=200, dim=8, noise=0.0, seed=1)
    assert len(spaces.src) == len(spaces.tgt) == len(spaces.dictionary) == 200
    assert spaces.dictionary.entries[3].source == source_word(3) == "s00003"
    assert spaces.dictionary.entries[3].target == target_word(3) == "t00003"

    projected = spaces.true_map @ lookup(spaces.src, "s00017")
    np.testing.assert_allclose(projected, lookup(spaces.tgt, "t00017"), atol=1e-9)

    again = make_aligned_spaces(n_words=200, dim=8, noise=0.0, seed=1)
    np.testing.assert_array_equal(again.src.vectors, spaces.src.vectors)


def test_planted_setup_layout():
    """Test the split of concepts into dictionary, lexicon and fillers."""
    setup = make_planted_setup(n_words=400, dim=10, dictionary_size=100, lexicon_size=200, seed=2)
    assert len(setup.dictionary) == 100
    assert len(setup.lexicon) == 200
    assert lexicon_stats(setup.lexicon).positive == 100
    assert not set(setup.lexicon.entries) & {e.source for e in setup.dictionary}
    assert len(setup.filler_words) == 200
    assert not set(setup.filler_words) & set(setup.target_lexicon.entries)
    for entry in setup.gold_translations:
        assert setup.target_lexicon.polarity(entry.target) is setup.lexicon.polarity(entry.source)

    with pytest.raises(ContractError):
        make_planted_setup(n_words=100, dictionary_size=60, lexicon_size=60)


def test_tweets_are_driven_by_lexicon_words():
    """Test that only polar tweets contain planted words of their polarity."""
    setup = make_planted_setup(n_words=400, dim=10, dictionary_size=100, lexicon_size=200, seed=2)
    tweets = make_tweets(setup, 300, seed=5)
    positive = set(setup.target_pool(Polarity.POSITIVE))
    negative = set(setup.target_pool(Polarity.NEGATIVE))

    assert {t.label for t in tweets} == set(Label)
    for tweet in tweets:
        words = set(tweet.text.split())
        if tweet.label is Label.POSITIVE:
            assert words & positive and not words & negative
        elif tweet.label is Label.NEGATIVE:
            assert words & negative and not words & positive
        else:
            assert not words & (positive | negative)
    assert [t.text for t in make_tweets(setup, 300, seed=5)] == [t.text for t in tweets]


def test_clamp_settings():
    """Test clamping, deduplication and rejected settings."""
    used, clamps = clamp_settings([5, 2000, 5], 100, "size")
    assert used == [5, 100]
    assert clamps == [(2000, 100)]

    with pytest.raises(EmptyTrainingSetError):
        clamp_settings([0, 10], 100, "size")
    with pytest.raises(ContractError):
        clamp_settings([-1], 100, "size")
    with pytest.raises(ContractError):
        clamp_settings([], 100, "size")


def test_curve_requires_increasing_x():
    """Test that curve x values must strictly increase."""
    with pytest.raises(ContractError):
        SweepCurve("dict-size", "macro_f", 0, (SweepPoint(10, 0.5, 0.0), SweepPoint(10, 0.6, 0.0)))


def test_curve_file_round_trip(tmp_path):
    """Test the curve file and the per-seed table."""
    curve = SweepCurve(
        kind="dict-size",
        metric="precision_at_1",
        seed=0,
        points=(SweepPoint(10, 0.1 + 0.2, 0.05, (0.25, 0.35)), SweepPoint(100, 0.9, 0.0, (0.9, 0.9))),
        clamped=((5000, 100),),
        seeds=(0, 1),
    )
    path = save_curve(curve, tmp_path / "sweep")
    assert path.suffix == ".curve"

    loaded = load_curve(path)
    assert loaded.kind == "dict-size"
    assert loaded.metric == "precision_at_1"
    assert loaded.xs == [10, 100]
    assert loaded.scores == curve.scores
    assert loaded.clamped == ((5000, 100),)

    table = pd.read_csv(tmp_path / "sweep.tsv", sep="\t")
    assert list(table.columns) == ["x", "mean", "std", "seed_0", "seed_1"]
    assert table["seed_1"].tolist() == [0.35, 0.9]


def test_dictionary_sweep_improves_with_size():
    """Test that held-out precision@1 grows with the dictionary size over five seeds."""
    spaces = make_aligned_spaces(n_words=1250, dim=50, noise=0.01, seed=0)
    curve = sweep_dictionary_size(
        spaces.src, spaces.tgt, spaces.dictionary, [1000, 10], seeds=[0, 1, 2, 3, 4], k=1
    )
    assert curve.xs == [10, 1000]
    assert curve.metric == "precision_at_1"
    assert curve.score_at(1000) >= 0.95
    assert curve.score_at(1000) - curve.score_at(10) >= 0.05
    assert all(len(p.seed_scores) == 5 for p in curve.points)


def test_dictionary_sweep_on_rotated_setup():
    """Test precision@1 at 1,000 requested pairs against 50 pairs on 1,000 words, d=50, noise 0.01."""
    spaces = make_aligned_spaces(n_words=1000, dim=50, noise=0.01, seed=0)
    curve = sweep_dictionary_size(
        spaces.src, spaces.tgt, spaces.dictionary, [50, 1000], seeds=[0, 1, 2, 3, 4], k=1
    )
    # a fifth of the words is held out, so 1,000 pairs clamp to the 800 left
    assert curve.xs == [50, 800]
    assert curve.clamped == ((1000, 800),)
    assert curve.score_at(800) >= 0.95
    assert curve.score_at(800) >= curve.score_at(50)
    assert all(
        large >= small
        for small, large in zip(curve.points[0].seed_scores, curve.points[1].seed_scores)
    )


def test_dictionary_sweep_reports_clamps():
    """Test that sizes beyond the training part are clamped and recorded."""
    spaces = make_aligned_spaces(n_words=100, dim=5, noise=0.01, seed=0)
    curve = sweep_dictionary_size(
        spaces.src, spaces.tgt, spaces.dictionary, [20, 500], seeds=[0, 1], heldout_fraction=0.2
    )
    assert curve.xs == [20, 80]
    assert curve.clamped == ((500, 80),)


def test_dictionary_sweep_is_independent_of_workers():
    """Test that threaded sweeps give the same curve."""
    spaces = make_aligned_spaces(n_words=300, dim=10, noise=0.05, seed=3)
    args = (spaces.src, spaces.tgt, spaces.dictionary, [8, 30, 200], [0, 1, 2])
    assert sweep_dictionary_size(*args, workers=1) == sweep_dictionary_size(*args, workers=3)


def test_transfer_accuracy():
    """Test the share of gold source words recovered with their polarity."""
    lexicon = make_lexicon("L", {"good": Polarity.POSITIVE, "bad": Polarity.NEGATIVE})
    output = make_lexicon("L.tgt", {"bueno": Polarity.POSITIVE, "malo": Polarity.POSITIVE})
    gold = BilingualDictionary.from_pairs([("good", "bueno"), ("good", "buen"), ("bad", "malo")])
    assert transfer_accuracy(output, gold, lexicon) == 0.5


def test_seed_lexicon_sweep_improves_with_seed_size():
    """Test that more hand-translated seed words give higher transfer accuracy."""
    setup = make_planted_setup(n_words=1200, dim=50, dictionary_size=200, lexicon_size=800, seed=0)
    curve = sweep_seed_lexicon(
        setup.spaces.src,
        setup.spaces.tgt,
        setup.lexicon,
        setup.gold_translations,
        [10, 500],
        seeds=[0, 1, 2],
    )
    assert curve.metric == "transfer_accuracy"
    assert curve.xs == [10, 500]
    assert curve.score_at(500) >= 0.9
    assert curve.score_at(500) > curve.score_at(10)


def test_seed_lexicon_sweep_rejects_zero_count():
    """Test that a zero seed size is an empty training set."""
    setup = make_planted_setup(n_words=300, dim=10, dictionary_size=100, lexicon_size=100, seed=0)
    with pytest.raises(EmptyTrainingSetError):
        sweep_seed_lexicon(
            setup.spaces.src, setup.spaces.tgt, setup.lexicon, setup.gold_translations, [0], [0]
        )


def test_lexicon_sets():
    """Test the ablation row and the combined set."""
    a = make_lexicon("a", {"x": Polarity.POSITIVE})
    b = make_lexicon("b", {"y": Polarity.NEGATIVE})
    assert [name for name, _ in lexicon_sets([])] == ["none"]
    assert [name for name, _ in lexicon_sets([a])] == ["none", "a"]
    assert [name for name, _ in lexicon_sets([a, b])] == ["none", "a", "b", "all"]


def test_gen_synthetic_writes_bundle(small_bundle):
    """Test that the synthetic bundle reads back as ordinary inputs."""
    lexicon = load_lexicon(small_bundle["lexicon"])
    assert lexicon.name == "planted"
    assert len(lexicon) == 100
    assert small_bundle["src_emb"].read_text(encoding="utf-8").splitlines()[0] == "300 10"
    assert (small_bundle["train"].parent / "gen-synthetic.kv").exists()


def test_align_and_transfer_commands(tmp_path, small_bundle):
    """Test align with a held-out dictionary, then transfer with the saved map."""
    out = tmp_path / "runs"
    align = cmd_align(
        build_run_config(
            {
                "out": out,
                "src_emb": small_bundle["src_emb"],
                "tgt_emb": small_bundle["tgt_emb"],
                "dict": small_bundle["dictionary"],
                "heldout": small_bundle["gold_translations"],
            }
        )
    )
    assert align.fields["train_pairs"] == 120
    assert align.fields["precision_at_k"] >= 0.9
    assert (align.run_dir / "map.txt").exists()

    transfer = cmd_transfer(
        build_run_config(
            {
                "out": out,
                "src_emb": small_bundle["src_emb"],
                "tgt_emb": small_bundle["tgt_emb"],
                "map": align.run_dir / "map.txt",
                "lexicon": [small_bundle["lexicon"]],
                "lambda": 0.9,
            }
        )
    )
    output = load_lexicon(transfer.run_dir / "planted.tgt.tsv")
    gold = load_lexicon(small_bundle["target_lexicon"])
    assert len(output) > 0
    recovered = sum(1 for word, polarity in gold.entries.items() if output.polarity(word) is polarity)
    assert recovered / len(gold) >= 0.9
    assert (transfer.run_dir / "transfer.planted.kv").exists()


def test_union_command(tmp_path, small_bundle):
    """Test that the union of a lexicon with itself is the same lexicon."""
    result = cmd_union(
        build_run_config(
            {"out": tmp_path / "runs", "lexicon": [small_bundle["lexicon"], small_bundle["lexicon"]]}
        )
    )
    assert result.fields["output_size"] == 100
    assert result.fields["conflict_drops"] == 0
    assert (result.run_dir / "planted.tsv").exists()


def test_train_eval_without_test_split_cross_validates(tmp_path, small_bundle):
    """Test the ablation row and the summary table under cross-validation."""
    result = cmd_train_eval(
        build_run_config(
            {
                "out": tmp_path / "runs",
                "train": small_bundle["train"],
                "lexicon": [small_bundle["target_lexicon"]],
                "folds": 3,
            }
        )
    )
    assert set(result.fields) == {"none", "planted.gold"}
    summary = pd.read_csv(result.run_dir / "summary.tsv", sep="\t")
    assert summary["lexicon_set"].tolist() == ["none", "planted.gold"]
    assert summary["lexicons"].tolist() == ["-", "planted.gold"]
    assert (result.run_dir / "none.report.txt").exists()


def test_transferred_lexicon_beats_no_lexicon_ablation(tmp_path):
    """Test the end-to-end gain of the transferred lexicon over five seeds."""
    gains = []
    for seed in range(5):
        out = tmp_path / f"seed{seed}"
        paths = cmd_gen_synthetic(build_run_config({"out": out, "seed": seed})).artifacts["paths"]
        transfer = cmd_transfer(
            build_run_config(
                {
                    "out": out,
                    "src_emb": paths["src_emb"],
                    "tgt_emb": paths["tgt_emb"],
                    "dict": paths["dictionary"],
                    "lexicon": [paths["lexicon"]],
                    "seed": seed,
                }
            )
        )
        result = cmd_train_eval(
            build_run_config(
                {
                    "out": out,
                    "train": paths["train"],
                    "test": paths["test"],
                    "lexicon": [transfer.run_dir / "planted.tgt.tsv"],
                    "seed": seed,
                }
            )
        )
        gains.append(result.fields["planted.tgt"] - result.fields["none"])
    assert np.mean(gains) >= 0.05


def test_repeated_runs_are_byte_identical(tmp_path, small_bundle):
    """Test that rerunning a command with the same settings rewrites identical files."""
    settings = {
        "out": tmp_path / "runs",
        "train": small_bundle["train"],
        "test": small_bundle["test"],
        "lexicon": [small_bundle["target_lexicon"]],
        "overwrite": True,
    }
    first = cmd_train_eval(build_run_config(settings))
    snapshot = {p.name: p.read_bytes() for p in first.run_dir.iterdir()}
    second = cmd_train_eval(build_run_config(settings))
    assert second.run_dir == first.run_dir
    assert {p.name: p.read_bytes() for p in second.run_dir.iterdir()} == snapshot

    bundle_dir = small_bundle["train"].parent
    before = {p.name: p.read_bytes() for p in bundle_dir.iterdir()}
    regenerated = cmd_gen_synthetic(
        build_run_config(
            {
                "out": tmp_path / "runs",
                "n_words": 300,
                "dim": 10,
                "dictionary_size": 120,
                "lexicon_size": 100,
                "n_train": 60,
                "n_test": 30,
                "seed": 4,
                "overwrite": True,
            }
        )
    )
    assert regenerated.run_dir == bundle_dir
    assert {p.name: p.read_bytes() for p in bundle_dir.iterdir()} == before


def test_cli_success(tmp_path, restore_logging, capsys):
    """Test a successful gen-synthetic run and its report block."""
    code = main(
        ["gen-synthetic", "--out", str(tmp_path), "--n-words", "50", "--dim", "4",
         "--dictionary-size", "20", "--lexicon-size", "10", "--n-train", "5", "--n-test", "5"]
    )
    assert code == 0
    assert "[gen-synthetic]" in capsys.readouterr().err
    assert len(list(tmp_path.glob("gen-synthetic-*/src.vec"))) == 1


def test_cli_exit_codes(tmp_path, restore_logging):
    """Test exit codes for configuration and file errors."""
    assert main(["align", "--out", str(tmp_path)]) == 2
    assert main(["transfer", "--lambda", "1.5", "--out", str(tmp_path)]) == 2
    missing = str(tmp_path / "missing.vec")
    assert main(["align", "--src-emb", missing, "--tgt-emb", missing, "--out", str(tmp_path)]) == 3


def test_cli_out_of_vocabulary_dictionary(tmp_path, restore_logging, capsys):
    """Test that a fully out-of-vocabulary dictionary fails with a data error."""
    (tmp_path / "src.vec").write_text("2 2\ncat 1 0\ndog 0 1\n", encoding="utf-8")
    (tmp_path / "tgt.vec").write_text("2 2\nchat 1 0\nchien 0 1\n", encoding="utf-8")
    (tmp_path / "dict.tsv").write_text("bird\toiseau\nfish\tpoisson\n", encoding="utf-8")
    code = main(
        ["align", "--src-emb", str(tmp_path / "src.vec"), "--tgt-emb", str(tmp_path / "tgt.vec"),
         "--dict", str(tmp_path / "dict.tsv"), "--out", str(tmp_path / "runs")]
    )
    assert code == 3
    assert "empty training set" in capsys.readouterr().err
    assert not (tmp_path / "runs").exists()
