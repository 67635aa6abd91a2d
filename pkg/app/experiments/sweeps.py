"""Dictionary-size and seed-lexicon sweeps.

Each sweep evaluates one metric at several settings of x and over several
seeds. Every (x, seed) job is independent; jobs may run on a thread pool and
are reduced in input order, so the curve does not depend on ``workers``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from app.alignment.dictionary import BilingualDictionary
from app.alignment.linear_map import LinearMap, build_pairs, fit_linear_map
from app.alignment.retrieval import precision_at_k
from app.core.config import ClassifierConfig
from app.core.exceptions import ContractError, EmptyTrainingSetError, NumericError, ParseError
from app.core.logging import get_logger
from app.core.types import Polarity
from app.embeddings.table import EmbeddingTable
from app.evaluation.trainer import cross_validate, evaluate, train
from app.features.dataset import featurize_dataset
from app.features.extractor import Tweet
from app.features.index import FeatureIndex
from app.lexicon.lexicon import PolarityLexicon, make_lexicon
from app.lexicon.transfer import transfer_lexicon

logger = get_logger(__name__)

METRIC_PRECISION = "precision_at_{k}"
METRIC_TRANSFER_ACCURACY = "transfer_accuracy"
METRIC_MACRO_F = "macro_f"


@dataclass(frozen=True)
class SweepPoint:
    """Score at one x: mean over seeds, sample standard deviation and per-seed values."""

    x: int
    score: float
    dispersion: float
    seed_scores: Tuple[float, ...] = ()


@dataclass(frozen=True)
class SweepCurve:
    """Ordered sweep points with metadata."""

    kind: str
    metric: str
    seed: int
    points: Tuple[SweepPoint, ...]
    clamped: Tuple[Tuple[int, int], ...] = field(default_factory=tuple)
    seeds: Tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        xs = [p.x for p in self.points]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ContractError(f"sweep x values must be strictly increasing, got {xs}")
        if not all(np.isfinite(p.score) for p in self.points):
            raise NumericError("sweep produced a non-finite score")

    @property
    def xs(self) -> List[int]:
        """x values in order."""
        return [p.x for p in self.points]

    @property
    def scores(self) -> List[float]:
        """Mean scores in order."""
        return [p.score for p in self.points]

    def score_at(self, x: int) -> float:
        """Mean score at x."""
        for point in self.points:
            if point.x == x:
                return point.score
        raise KeyError(x)


@dataclass(frozen=True)
class DownstreamTask:
    """Labeled tweets for scoring transferred lexicons by macro-F.

    Without a test split the score is the mean macro-F of k-fold
    cross-validation on the training split.
    """

    train: Sequence[Tweet]
    test: Optional[Sequence[Tweet]]
    ngram_max: int
    hyper: ClassifierConfig
    folds: int = 3

    def score(self, lexicons: Sequence[PolarityLexicon]) -> float:
        """Macro-F of a classifier using ``lexicons``."""
        index = FeatureIndex()
        train_set = featurize_dataset(self.train, lexicons, index, self.ngram_max)
        if not self.test:
            return cross_validate(train_set, self.folds, self.hyper).mean.macro_f
        model = train(train_set, self.hyper)
        test_set = featurize_dataset(self.test, lexicons, index, self.ngram_max, training=False)
        return evaluate(model, test_set).macro_f


def clamp_settings(requested: Iterable[int], available: int, what: str) -> Tuple[List[int], List[Tuple[int, int]]]:
    """
    Clamp sweep settings to what the data allows.

    Returns:
        (sorted distinct settings, list of (requested, used) clamps)

    Raises:
        ContractError: If no setting is given or one is negative
        EmptyTrainingSetError: If a setting is zero or nothing is available
    """
    values = list(requested)
    if not values:
        raise ContractError(f"no {what} given")
    if any(v < 0 for v in values):
        raise ContractError(f"{what} must be non-negative, got {values}")
    if any(v == 0 for v in values) or available < 1:
        raise EmptyTrainingSetError(0)

    clamps: List[Tuple[int, int]] = []
    used: List[int] = []
    for value in values:
        if value > available:
            logger.warning(f"Clamped {what} {value} to the {available} available")
            clamps.append((value, available))
            value = available
        used.append(value)
    return sorted(set(used)), clamps


def _run_jobs(
    job: Callable[[int, int], float], xs: Sequence[int], seeds: Sequence[int], workers: int
) -> List[SweepPoint]:
    grid = [(x, s) for x in xs for s in seeds]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(lambda item: job(*item), grid))
    else:
        results = [job(x, s) for x, s in grid]

    points: List[SweepPoint] = []
    for i, x in enumerate(xs):
        scores = results[i * len(seeds):(i + 1) * len(seeds)]
        dispersion = float(np.std(scores, ddof=1)) if len(scores) > 1 else 0.0
        points.append(SweepPoint(x=x, score=float(np.mean(scores)), dispersion=dispersion, seed_scores=tuple(scores)))
    return points


def _fit(dictionary: BilingualDictionary, src: EmbeddingTable, tgt: EmbeddingTable) -> LinearMap:
    return fit_linear_map(build_pairs(dictionary, src, tgt))


def sweep_dictionary_size(
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    dictionary: BilingualDictionary,
    sizes: Sequence[int],
    seeds: Sequence[int],
    heldout: Optional[BilingualDictionary] = None,
    heldout_fraction: float = 0.2,
    k: int = 1,
    downstream: Optional[DownstreamTask] = None,
    lexicons: Sequence[PolarityLexicon] = (),
    lambda_threshold: float = 0.65,
    workers: int = 1,
) -> SweepCurve:
    """
    Fit a map on the n most frequent dictionary entries for every n in ``sizes``.

    Without a downstream task the metric is held-out precision@k. The held-out
    part is ``heldout`` when given, otherwise a seeded split of the dictionary
    by source word. With a downstream task every lexicon is transferred with
    the fitted map and the metric is macro-F.

    Args:
        src: Source-language table
        tgt: Target-language table
        dictionary: Frequency-ranked dictionary
        sizes: Requested dictionary sizes (clamped to the training part)
        seeds: Seeds, one job per (size, seed)
        heldout: Fixed held-out pairs for precision@k
        heldout_fraction: Held-out share of source words when splitting
        k: Retrieval depth for precision@k
        downstream: Labeled tweets for the macro-F metric
        lexicons: Source lexicons transferred for the downstream metric
        lambda_threshold: Transfer threshold
        workers: Concurrent jobs

    Returns:
        SweepCurve
    """
    if downstream is not None and not lexicons:
        raise ContractError("a downstream sweep needs at least one lexicon")

    splits = {
        seed: (dictionary, heldout)
        if heldout is not None or downstream is not None
        else dictionary.split(heldout_fraction, seed)
        for seed in seeds
    }
    available = min(len(train_part) for train_part, _ in splits.values())
    xs, clamps = clamp_settings(sizes, available, "dictionary size")

    def job(n: int, seed: int) -> float:
        train_part, heldout_part = splits[seed]
        linear_map = _fit(train_part.most_frequent(n), src, tgt)
        if downstream is None:
            return precision_at_k(linear_map, heldout_part, src, tgt, k)
        transferred = [
            transfer_lexicon(lex, linear_map, src, tgt, lambda_threshold, workers=1)[0]
            for lex in lexicons
        ]
        return downstream.score(transferred)

    metric = METRIC_MACRO_F if downstream is not None else METRIC_PRECISION.format(k=k)
    curve = SweepCurve(
        kind="dict-size",
        metric=metric,
        seed=seeds[0],
        points=tuple(_run_jobs(job, xs, seeds, workers)),
        clamped=tuple(clamps),
        seeds=tuple(seeds),
    )
    logger.info(f"Dictionary-size sweep over {xs}: {metric} {[round(s, 4) for s in curve.scores]}")
    return curve


def transfer_accuracy(
    output: PolarityLexicon, expected: BilingualDictionary, lexicon: PolarityLexicon
) -> float:
    """
    Share of source words whose gold translation is in ``output`` with the source polarity.

    A source word with several gold translations counts once.
    """
    gold: Dict[str, set] = {}
    for entry in expected:
        gold.setdefault(entry.source, set()).add(entry.target)
    if not gold:
        raise ContractError("no gold translations to score")
    hits = sum(
        1
        for word, targets in gold.items()
        if any(output.polarity(t) is lexicon.polarity(word) for t in targets)
    )
    return hits / len(gold)


def _with_seed_entries(
    output: PolarityLexicon, seed: PolarityLexicon, tgt: EmbeddingTable
) -> PolarityLexicon:
    # hand translations the transfer never reached, kept to the target vocabulary
    entries = dict(output.entries)
    provenance = dict(output.provenance)
    for word, polarity in seed.entries.items():
        if word not in entries and word in tgt:
            entries[word] = polarity
            provenance[word] = seed.provenance_of(word)
    return make_lexicon(output.name, entries, provenance, output.conflict_drops)


def sweep_seed_lexicon(
    src: EmbeddingTable,
    tgt: EmbeddingTable,
    lexicon: PolarityLexicon,
    gold_translations: BilingualDictionary,
    counts: Sequence[int],
    seeds: Sequence[int],
    downstream: Optional[DownstreamTask] = None,
    lambda_threshold: float = 0.65,
    workers: int = 1,
) -> SweepCurve:
    """
    Fit a map on c hand-translated lexicon words and transfer the rest.

    For every seed the lexicon words with a gold translation are shuffled; the
    first c of them (with all their translations) train the map. Without a
    downstream task the metric is the transfer accuracy on the remaining gold
    words. With one, the remaining lexicon is transferred, the c seed
    translations are added as native entries, and the metric is macro-F.

    Args:
        src: Source-language table
        tgt: Target-language table
        lexicon: Source lexicon
        gold_translations: Gold source-to-target translations of lexicon words
        counts: Requested seed sizes (clamped so at least one word remains)
        seeds: Seeds, one job per (count, seed)
        downstream: Labeled tweets for the macro-F metric
        lambda_threshold: Transfer threshold
        workers: Concurrent jobs

    Returns:
        SweepCurve
    """
    usable = BilingualDictionary(e for e in gold_translations if e.source in lexicon)
    words = list(dict.fromkeys(e.source for e in usable))
    xs, clamps = clamp_settings(counts, len(words) - 1, "seed lexicon size")

    def job(c: int, seed: int) -> float:
        order = np.random.default_rng(seed).permutation(len(words))
        seed_words = {words[i] for i in order[:c]}
        seed_pairs = BilingualDictionary(e for e in usable if e.source in seed_words)
        rest = make_lexicon(
            lexicon.name,
            {w: p for w, p in lexicon.entries.items() if w not in seed_words},
            lexicon.provenance,
        )
        linear_map = _fit(seed_pairs, src, tgt)

        if downstream is None:
            output, _ = transfer_lexicon(rest, linear_map, src, tgt, lambda_threshold, workers=1)
            remaining = BilingualDictionary(e for e in usable if e.source not in seed_words)
            return transfer_accuracy(output, remaining, lexicon)

        native: Dict[str, Polarity] = {}
        conflicted = set()
        for entry in seed_pairs:
            polarity = lexicon.entries[entry.source]
            if native.get(entry.target, polarity) is not polarity:
                conflicted.add(entry.target)
            native[entry.target] = polarity
        native_lexicon = make_lexicon(
            f"{lexicon.name}.seed", {w: p for w, p in native.items() if w not in conflicted}
        )
        output, _ = transfer_lexicon(
            rest, linear_map, src, tgt, lambda_threshold, native=native_lexicon, workers=1
        )
        return downstream.score([_with_seed_entries(output, native_lexicon, tgt)])

    metric = METRIC_MACRO_F if downstream is not None else METRIC_TRANSFER_ACCURACY
    curve = SweepCurve(
        kind="seed-lexicon",
        metric=metric,
        seed=seeds[0],
        points=tuple(_run_jobs(job, xs, seeds, workers)),
        clamped=tuple(clamps),
        seeds=tuple(seeds),
    )
    logger.info(f"Seed-lexicon sweep over {xs}: {metric} {[round(s, 4) for s in curve.scores]}")
    return curve


def save_curve(curve: SweepCurve, path: str | Path) -> Path:
    """
    Write ``<path>.curve`` (metadata header and x/score/dispersion rows) and
    the plot-ready ``<path>.tsv`` (one column per seed).

    Returns:
        Path of the curve file
    """
    base = Path(path)
    base.parent.mkdir(parents=True, exist_ok=True)
    curve_path = base.with_suffix(".curve")
    with open(curve_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# kind={curve.kind}\n")
        f.write(f"# metric={curve.metric}\n")
        f.write(f"# seed={curve.seed}\n")
        for requested, used in curve.clamped:
            f.write(f"# clamped={requested}->{used}\n")
        f.write("x\tscore\tdispersion\n")
        for point in curve.points:
            f.write(f"{point.x}\t{point.score:.17g}\t{point.dispersion:.17g}\n")

    table = pd.DataFrame({"x": curve.xs, "mean": curve.scores, "std": [p.dispersion for p in curve.points]})
    for j, seed in enumerate(curve.seeds):
        table[f"seed_{seed}"] = [p.seed_scores[j] for p in curve.points]
    table.to_csv(base.with_suffix(".tsv"), sep="\t", index=False, float_format="%.17g")
    logger.info(f"Sweep curve written to {curve_path}")
    return curve_path


def load_curve(path: str | Path) -> SweepCurve:
    """
    Read a ``.curve`` file written by ``save_curve`` (per-seed scores are not kept).

    Raises:
        ParseError: On a malformed file
    """
    file_path = Path(path)
    meta: dict = {}
    clamps: List[Tuple[int, int]] = []
    points: List[SweepPoint] = []
    with open(file_path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            stripped = line.rstrip("\n")
            if stripped.startswith("# "):
                key, _, value = stripped[2:].partition("=")
                if key == "clamped":
                    requested, _, used = value.partition("->")
                    clamps.append((int(requested), int(used)))
                else:
                    meta[key] = value
                continue
            if stripped == "x\tscore\tdispersion" or not stripped:
                continue
            parts = stripped.split("\t")
            if len(parts) != 3:
                raise ParseError("expected 'x<TAB>score<TAB>dispersion'", line_number, str(file_path))
            try:
                points.append(SweepPoint(int(parts[0]), float(parts[1]), float(parts[2])))
            except ValueError:
                raise ParseError("non-numeric value", line_number, str(file_path)) from None
    if not {"kind", "metric", "seed"} <= meta.keys():
        raise ParseError("missing curve metadata", None, str(file_path))
    return SweepCurve(
        kind=meta["kind"],
        metric=meta["metric"],
        seed=int(meta["seed"]),
        points=tuple(points),
        clamped=tuple(clamps),
    )
