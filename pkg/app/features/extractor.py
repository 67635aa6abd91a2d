"""Tweet feature families.

Feature names:

* ``ngram:<n>:<w1 ... wn>`` binary indicator over lower-cased word tokens
* ``allcaps`` number of all-caps words
* ``hashtags`` number of hashtags
* ``lexicon:<name>:<polarity>`` number of word tokens listed with that polarity
* ``punct_runs`` number of ``!``/``?`` runs
* ``last_punct`` last token contains ``!`` or ``?``
* ``emoticon_pos_present`` / ``emoticon_neg_present``
* ``last_emoticon_pos`` / ``last_emoticon_neg``
* ``elongated`` number of words with a character repeated four or more times

Zero-valued features are omitted from the sparse vector.
"""

from collections import Counter
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict

from app.core.config import settings
from app.core.exceptions import ContractError
from app.core.types import Label, Polarity, TokenKind
from app.features.index import FeatureIndex, FeatureVector
from app.features.tokenizer import TokenStream, is_all_caps, is_elongated, tokenize
from app.lexicon.lexicon import PolarityLexicon


class Tweet(BaseModel):
    """Tweet with an optional gold label."""

    model_config = ConfigDict(frozen=True)

    id: str
    text: str
    label: Optional[Label] = None


def lexicon_feature_name(lexicon_name: str, polarity: Polarity) -> str:
    """Name of the (lexicon, polarity) count feature."""
    return f"lexicon:{lexicon_name}:{polarity.value}"


def _ngram_features(words: List[str], ngram_max: int) -> Dict[str, float]:
    features: Dict[str, float] = {}
    for n in range(1, ngram_max + 1):
        for start in range(len(words) - n + 1):
            features[f"ngram:{n}:{' '.join(words[start:start + n])}"] = 1.0
    return features


def _lexicon_features(
    words: List[str], lexicons: Sequence[PolarityLexicon]
) -> Dict[str, float]:
    features: Dict[str, float] = {}
    for lexicon in lexicons:
        counts: Counter = Counter(
            lexicon.entries[w] for w in words if w in lexicon.entries
        )
        for polarity in (Polarity.POSITIVE, Polarity.NEGATIVE):
            if counts[polarity]:
                features[lexicon_feature_name(lexicon.name, polarity)] = float(counts[polarity])
    return features


def feature_counts(
    stream: TokenStream, lexicons: Sequence[PolarityLexicon], ngram_max: int
) -> Dict[str, float]:
    """
    Named non-zero feature values of a token stream.

    Args:
        stream: Tokenized tweet
        lexicons: Lexicons with distinct names
        ngram_max: Highest n-gram order (>= 1)

    Returns:
        Feature name to value, zeros omitted

    Raises:
        ContractError: If ngram_max < 1 or lexicon names repeat
    """
    if ngram_max < 1:
        raise ContractError(f"ngram_max must be >= 1, got {ngram_max}")
    names = [lexicon.name for lexicon in lexicons]
    if len(set(names)) != len(names):
        raise ContractError(f"lexicon names must be distinct, got {names}")

    words = [t.surface for t in stream.of_kind(TokenKind.WORD)]
    lowered = [w.lower() for w in words]

    features = _ngram_features(lowered, ngram_max)
    features.update(_lexicon_features(lowered, lexicons))

    kinds = [t.kind for t in stream]
    last = stream[-1] if len(stream) else None
    scalars = {
        "allcaps": sum(1 for w in words if is_all_caps(w)),
        "hashtags": kinds.count(TokenKind.HASHTAG),
        "punct_runs": kinds.count(TokenKind.PUNCT_RUN),
        "last_punct": int(last is not None and ("!" in last.surface or "?" in last.surface)),
        "emoticon_pos_present": int(TokenKind.EMOTICON_POS in kinds),
        "emoticon_neg_present": int(TokenKind.EMOTICON_NEG in kinds),
        "last_emoticon_pos": int(last is not None and last.kind is TokenKind.EMOTICON_POS),
        "last_emoticon_neg": int(last is not None and last.kind is TokenKind.EMOTICON_NEG),
        "elongated": sum(1 for w in lowered if is_elongated(w)),
    }
    features.update({name: float(value) for name, value in scalars.items() if value})
    return features


def extract_features(
    tweet: Tweet,
    lexicons: Sequence[PolarityLexicon],
    index: FeatureIndex,
    ngram_max: Optional[int] = None,
) -> FeatureVector:
    """
    Featurize one tweet against a shared index.

    An index that is not frozen grows with unseen feature names; a frozen
    index drops them.

    Args:
        tweet: Tweet with non-empty text
        lexicons: Polarity lexicons (may be empty)
        index: Feature index
        ngram_max: Highest n-gram order (defaults to settings, 2)

    Returns:
        FeatureVector

    Raises:
        ContractError: On empty text or an invalid ngram_max
    """
    if ngram_max is None:
        ngram_max = settings.features.ngram_max
    if not tweet.text.strip():
        raise ContractError(f"tweet '{tweet.id}' has empty text")

    named = feature_counts(tokenize(tweet.text), lexicons, ngram_max)
    values: Dict[int, float] = {}
    # sorted so that ids are assigned independently of dict construction order
    for name in sorted(named):
        feature_id = index.lookup(name)
        if feature_id is not None:
            values[feature_id] = named[name]
    return FeatureVector(values)
