"""Synthetic aligned embedding spaces, planted lexicons and labeled tweets.

Both languages are noisy linear views of one latent vector per concept:
``src_i = A_s z_i + noise`` and ``tgt_i = A_t z_i + noise``, so the true
source-to-target map is ``A_t A_s^-1``. Views are random orthogonal matrices
with column scales in [0.5, 2], which keeps their condition number below 4.
Concept i is the word ``s{i:05d}`` in the source language and ``t{i:05d}``
in the target language, and its frequency rank is i.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np

from app.alignment.dictionary import BilingualDictionary, save_dictionary
from app.alignment.linear_map import PairSet
from app.core.exceptions import ContractError
from app.core.logging import get_logger
from app.core.types import Label, Polarity
from app.embeddings.loader import save_embeddings
from app.embeddings.table import EmbeddingTable
from app.features.dataset import save_dataset
from app.features.extractor import Tweet
from app.features.tokenizer import NEGATIVE_EMOTICONS, POSITIVE_EMOTICONS
from app.lexicon.lexicon import PolarityLexicon, make_lexicon, save_lexicon

logger = get_logger(__name__)

SCALE_RANGE = (0.5, 2.0)


def source_word(i: int) -> str:
    """Source-language surface of concept i."""
    return f"s{i:05d}"


def target_word(i: int) -> str:
    """Target-language surface of concept i."""
    return f"t{i:05d}"


def random_view(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Orthogonal matrix with column scales drawn from SCALE_RANGE."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.sign(np.diag(r))
    return q * rng.uniform(*SCALE_RANGE, size=dim)


@dataclass(frozen=True, eq=False)
class AlignedSpaces:
    """Two embedding tables sharing latent concepts, with the full ranked dictionary."""

    src: EmbeddingTable
    tgt: EmbeddingTable
    dictionary: BilingualDictionary
    src_view: np.ndarray
    tgt_view: np.ndarray

    @property
    def true_map(self) -> np.ndarray:
        """Noise-free source-to-target map A_t A_s^-1."""
        return self.tgt_view @ np.linalg.inv(self.src_view)


def make_aligned_spaces(
    n_words: int = 1000,
    dim: int = 50,
    noise: float = 0.01,
    seed: int = 0,
    src_tag: str = "src",
    tgt_tag: str = "tgt",
) -> AlignedSpaces:
    """
    Generate two aligned embedding tables.

    Args:
        n_words: Concepts (words per language)
        dim: Embedding dimension of both languages
        noise: Standard deviation of the Gaussian noise added to each view
        seed: Random seed
        src_tag: Source language tag
        tgt_tag: Target language tag

    Returns:
        AlignedSpaces whose dictionary pairs concept i in both languages, rank i
    """
    if n_words < 1 or dim < 1:
        raise ContractError(f"need n_words >= 1 and dim >= 1, got {n_words}, {dim}")
    rng = np.random.default_rng(seed)
    src_view = random_view(rng, dim)
    tgt_view = random_view(rng, dim)
    latent = rng.standard_normal((n_words, dim))
    src_vectors = latent @ src_view.T + noise * rng.standard_normal((n_words, dim))
    tgt_vectors = latent @ tgt_view.T + noise * rng.standard_normal((n_words, dim))

    src_words = [source_word(i) for i in range(n_words)]
    tgt_words = [target_word(i) for i in range(n_words)]
    return AlignedSpaces(
        src=EmbeddingTable(src_tag, src_words, src_vectors),
        tgt=EmbeddingTable(tgt_tag, tgt_words, tgt_vectors),
        dictionary=BilingualDictionary.from_pairs(zip(src_words, tgt_words), ranks=range(n_words)),
        src_view=src_view,
        tgt_view=tgt_view,
    )


def make_linear_instance(
    n_pairs: int = 500, dim: int = 50, noise: float = 0.0, seed: int = 0
) -> tuple[PairSet, np.ndarray]:
    """
    Random least-squares instance ``Y = X A^T + noise``.

    Returns:
        (PairSet, A) where A is a well-conditioned dim x dim matrix
    """
    rng = np.random.default_rng(seed)
    A = random_view(rng, dim)
    X = rng.standard_normal((n_pairs, dim))
    Y = X @ A.T + noise * rng.standard_normal((n_pairs, dim))
    return PairSet(X=X, Y=Y), A


@dataclass(frozen=True, eq=False)
class PlantedSetup:
    """Aligned spaces with a planted source lexicon and its gold translations.

    Concepts ``[0, dictionary_size)`` form the alignment dictionary, the next
    ``lexicon_size`` concepts the lexicon; lexicon words never occur in the
    alignment dictionary.
    """

    spaces: AlignedSpaces
    dictionary: BilingualDictionary
    lexicon: PolarityLexicon
    gold_translations: BilingualDictionary
    target_lexicon: PolarityLexicon
    filler_words: tuple[str, ...]

    def target_pool(self, polarity: Polarity) -> List[str]:
        """Target-language words planted with one polarity."""
        return self.target_lexicon.words(polarity)


def make_planted_setup(
    n_words: int = 2000,
    dim: int = 50,
    noise: float = 0.01,
    dictionary_size: int = 500,
    lexicon_size: int = 800,
    seed: int = 0,
    lexicon_name: str = "planted",
) -> PlantedSetup:
    """
    Generate aligned spaces with a balanced planted lexicon.

    Args:
        n_words: Concepts per language
        dim: Embedding dimension
        noise: View noise
        dictionary_size: Concepts in the alignment dictionary
        lexicon_size: Concepts in the lexicon (half positive)
        seed: Random seed
        lexicon_name: Name of the source lexicon

    Returns:
        PlantedSetup

    Raises:
        ContractError: If the dictionary and lexicon don't fit in the vocabulary
    """
    if dictionary_size + lexicon_size > n_words:
        raise ContractError(
            f"dictionary ({dictionary_size}) and lexicon ({lexicon_size}) exceed "
            f"the vocabulary ({n_words})"
        )
    spaces = make_aligned_spaces(n_words, dim, noise, seed)
    rng = np.random.default_rng(seed + 1)

    concepts = np.arange(dictionary_size, dictionary_size + lexicon_size)
    positive = set(rng.permutation(concepts)[: lexicon_size // 2].tolist())
    polarity_of = {
        int(i): Polarity.POSITIVE if int(i) in positive else Polarity.NEGATIVE for i in concepts
    }

    lexicon = make_lexicon(lexicon_name, {source_word(i): p for i, p in polarity_of.items()})
    target_lexicon = make_lexicon(
        f"{lexicon_name}.gold", {target_word(i): p for i, p in polarity_of.items()}
    )
    gold = BilingualDictionary.from_pairs(
        [(source_word(int(i)), target_word(int(i))) for i in concepts], ranks=concepts.tolist()
    )
    dictionary = spaces.dictionary.head(dictionary_size)
    fillers = tuple(
        target_word(i)
        for i in list(range(dictionary_size)) + list(range(dictionary_size + lexicon_size, n_words))
    )
    return PlantedSetup(
        spaces=spaces,
        dictionary=dictionary,
        lexicon=lexicon,
        gold_translations=gold,
        target_lexicon=target_lexicon,
        filler_words=fillers,
    )


def _tweet_text(
    rng: np.random.Generator,
    label: Label,
    pools: Dict[Polarity, Sequence[str]],
    fillers: Sequence[str],
) -> str:
    tokens = list(rng.choice(fillers, size=int(rng.integers(4, 9))))
    if label is Label.POSITIVE:
        tokens += list(rng.choice(pools[Polarity.POSITIVE], size=int(rng.integers(1, 3))))
    elif label is Label.NEGATIVE:
        tokens += list(rng.choice(pools[Polarity.NEGATIVE], size=int(rng.integers(1, 3))))
    tokens = [str(t) for t in rng.permutation(tokens)]

    # class-independent decoration
    if rng.random() < 0.2:
        tokens.insert(0, f"#topic{int(rng.integers(20))}")
    if rng.random() < 0.1:
        tokens.insert(0, f"@user{int(rng.integers(50))}")
    if rng.random() < 0.1:
        tokens.append(str(rng.choice(POSITIVE_EMOTICONS + NEGATIVE_EMOTICONS)))
    if rng.random() < 0.15:
        tokens.append("!!")
    return " ".join(tokens)


def make_tweets(setup: PlantedSetup, n: int, seed: int, id_prefix: str = "tw") -> List[Tweet]:
    """
    Labeled tweets whose class is carried by planted lexicon words.

    Positive and negative tweets contain one or two target words of their
    polarity among four to eight filler words; neutral tweets contain only
    fillers. Classes are drawn uniformly.

    Args:
        setup: Planted setup supplying the word pools
        n: Number of tweets
        seed: Random seed
        id_prefix: Prefix of tweet ids

    Returns:
        Tweets in generation order
    """
    rng = np.random.default_rng(seed)
    pools = {p: setup.target_pool(p) for p in Polarity}
    labels = [Label.NEGATIVE, Label.NEUTRAL, Label.POSITIVE]
    tweets: List[Tweet] = []
    for i in range(n):
        label = labels[int(rng.integers(3))]
        text = _tweet_text(rng, label, pools, setup.filler_words)
        tweets.append(Tweet(id=f"{id_prefix}{i:06d}", text=text, label=label))
    return tweets


def write_bundle(
    setup: PlantedSetup, train: Sequence[Tweet], test: Sequence[Tweet], directory: Path
) -> Dict[str, Path]:
    """
    Write a synthetic setup as ordinary input files.

    Returns:
        Mapping of role to written path
    """
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "src_emb": directory / f"{setup.spaces.src.language_tag}.vec",
        "tgt_emb": directory / f"{setup.spaces.tgt.language_tag}.vec",
        "dictionary": directory / "dictionary.tsv",
        "lexicon": directory / f"{setup.lexicon.name}.tsv",
        "gold_translations": directory / "gold_translations.tsv",
        "target_lexicon": directory / f"{setup.target_lexicon.name}.tsv",
        "train": directory / "train.tsv",
        "test": directory / "test.tsv",
    }
    save_embeddings(setup.spaces.src, paths["src_emb"])
    save_embeddings(setup.spaces.tgt, paths["tgt_emb"])
    save_dictionary(setup.dictionary, paths["dictionary"])
    save_lexicon(setup.lexicon, paths["lexicon"])
    save_dictionary(setup.gold_translations, paths["gold_translations"])
    save_lexicon(setup.target_lexicon, paths["target_lexicon"])
    save_dataset(train, paths["train"])
    save_dataset(test, paths["test"])
    logger.info(f"Synthetic bundle written to {directory}")
    return paths
