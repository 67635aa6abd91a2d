"""Tests for the tweet tokenizer, feature extraction and datasets."""

import numpy as np
import pytest
from sklearn.datasets import load_svmlight_file

from app.core.exceptions import ContractError, DataError, ParseError
from app.core.types import Label, Polarity, TokenKind
from app.features.dataset import (
    LabeledDataset,
    export_svmlight,
    featurize_dataset,
    load_dataset,
    save_dataset,
)
from app.features.extractor import Tweet, extract_features, feature_counts, lexicon_feature_name
from app.features.index import FeatureIndex, FeatureVector
from app.features.tokenizer import NEGATIVE_EMOTICONS, POSITIVE_EMOTICONS, tokenize
from app.lexicon.lexicon import make_lexicon


@pytest.fixture
def good_bad():
    """Lexicon L = {good: positive, bad: negative}."""
    return make_lexicon("L", {"good": Polarity.POSITIVE, "bad": Polarity.NEGATIVE})


@pytest.fixture
def tweets():
    """A few labeled tweets covering every class."""
    return [
        Tweet(id="1", text="good day :)", label=Label.POSITIVE),
        Tweet(id="2", text="bad BAD day :(", label=Label.NEGATIVE),
        Tweet(id="3", text="just a day", label=Label.NEUTRAL),
        Tweet(id="4", text="#news @bob http://x.co/abc what?!", label=Label.NEUTRAL),
    ]


def pairs(text):
    """(surface, kind) pairs of a tokenized text."""
    return [(t.surface, t.kind) for t in tokenize(text)]


def test_tokenize_tags_and_emoticons():
    """Test hashtag, user tag and emoticon tokens."""
    assert pairs("#happy @bob :)") == [
        ("<hashtag>", TokenKind.HASHTAG),
        ("<user>", TokenKind.USERTAG),
        (":)", TokenKind.EMOTICON_POS),
    ]


def test_tokenize_punctuation_runs():
    """Test that punctuation runs split from words."""
    assert pairs("good!!") == [("good", TokenKind.WORD), ("!!", TokenKind.PUNCT_RUN)]
    assert pairs("what?!?") == [("what", TokenKind.WORD), ("?!?", TokenKind.PUNCT_RUN)]


def test_tokenize_keeps_elongated_words():
    """Test that elongated words stay whole."""
    assert pairs("loooool") == [("loooool", TokenKind.WORD)]


def test_tokenize_urls_and_other():
    """Test URL replacement, apostrophes and single other characters."""
    assert pairs("see https://t.co/x1 now") == [
        ("see", TokenKind.WORD),
        ("<url>", TokenKind.OTHER),
        ("now", TokenKind.WORD),
    ]
    assert pairs("don't") == [("don't", TokenKind.WORD)]
    assert pairs("a,b") == [("a", TokenKind.WORD), (",", TokenKind.OTHER), ("b", TokenKind.WORD)]


def test_tokenize_empty_and_blank():
    """Test that blank text gives an empty stream."""
    assert len(tokenize("")) == 0
    assert len(tokenize("   \t ")) == 0


@pytest.mark.parametrize("emoticon", POSITIVE_EMOTICONS)
def test_positive_emoticon_table(emoticon):
    """Test that every positive emoticon is recognized on its own."""
    assert pairs(emoticon) == [(emoticon, TokenKind.EMOTICON_POS)]


@pytest.mark.parametrize("emoticon", NEGATIVE_EMOTICONS)
def test_negative_emoticon_table(emoticon):
    """Test that every negative emoticon is recognized on its own."""
    assert pairs(emoticon) == [(emoticon, TokenKind.EMOTICON_NEG)]


def test_emoticons_attached_to_words():
    """Test an emoticon glued to a word, and that letters inside words are not emoticons."""
    assert pairs("nice:)") == [("nice", TokenKind.WORD), (":)", TokenKind.EMOTICON_POS)]
    assert pairs("xDx") == [("xDx", TokenKind.WORD)]


def test_elongated_count():
    """Test one elongated word for four repeated characters."""
    assert feature_counts(tokenize("loooool"), [], 1)["elongated"] == 1.0
    assert feature_counts(tokenize("looool"), [], 1)["elongated"] == 1.0
    assert "elongated" not in feature_counts(tokenize("lool"), [], 1)


def test_allcaps_count():
    """Test all-caps words of two or more letters."""
    assert feature_counts(tokenize("GREAT DAY ok"), [], 1)["allcaps"] == 2.0
    assert "allcaps" not in feature_counts(tokenize("I A ok"), [], 1)


def test_lexicon_counts(good_bad):
    """Test per-polarity lexicon counts."""
    features = feature_counts(tokenize("good good bad"), [good_bad], 1)
    assert features[lexicon_feature_name("L", Polarity.POSITIVE)] == 2.0
    assert features[lexicon_feature_name("L", Polarity.NEGATIVE)] == 1.0


def test_lexicon_counts_ignore_case_and_entry_order(good_bad):
    """Test that matching is case-insensitive and independent of entry order."""
    reordered = make_lexicon("L", {"bad": Polarity.NEGATIVE, "good": Polarity.POSITIVE})
    text = tokenize("GOOD Good bad")
    assert feature_counts(text, [good_bad], 2) == feature_counts(text, [reordered], 2)
    assert feature_counts(text, [good_bad], 1)["lexicon:L:positive"] == 2.0


def test_dropping_lexicons_removes_only_lexicon_features(tweets, good_bad):
    """Test that without lexicons exactly the (lexicon, polarity) features disappear."""
    other = make_lexicon("M", {"day": Polarity.NEGATIVE, "news": Polarity.POSITIVE})
    lexicon_names = {
        lexicon_feature_name(name, polarity) for name in ("L", "M") for polarity in Polarity
    }
    for tweet in tweets + [Tweet(id="5", text="GOOD good BAD day!! :) #news")]:
        stream = tokenize(tweet.text)
        with_lexicons = feature_counts(stream, [good_bad, other], 2)
        without = feature_counts(stream, [], 2)

        removed = set(with_lexicons) - set(without)
        assert removed == lexicon_names & set(with_lexicons)
        assert set(without) <= set(with_lexicons)
        assert {name: with_lexicons[name] for name in without} == without
    assert lexicon_feature_name("L", Polarity.POSITIVE) in feature_counts(tokenize("good"), [good_bad], 1)


def test_ngram_features():
    """Test unigram and bigram indicators over lower-cased words."""
    features = feature_counts(tokenize("Good day good day"), [], 2)
    ngrams = {name for name in features if name.startswith("ngram:")}
    assert ngrams == {"ngram:1:good", "ngram:1:day", "ngram:2:good day", "ngram:2:day good"}
    assert features["ngram:2:good day"] == 1.0


def test_punctuation_and_emoticon_features():
    """Test punctuation runs and emoticon booleans."""
    features = feature_counts(tokenize("wow!! :( really?! :)"), [], 1)
    assert features["punct_runs"] == 2.0
    assert features["emoticon_pos_present"] == 1.0
    assert features["emoticon_neg_present"] == 1.0
    assert features["last_emoticon_pos"] == 1.0
    assert "last_emoticon_neg" not in features
    assert "last_punct" not in features

    assert feature_counts(tokenize("what?"), [], 1)["last_punct"] == 1.0
    assert feature_counts(tokenize("#a #b"), [], 1)["hashtags"] == 2.0


def test_feature_values_are_non_negative(tweets, good_bad):
    """Test that counts are non-negative and booleans are 0 or 1."""
    booleans = {
        "last_punct",
        "emoticon_pos_present",
        "emoticon_neg_present",
        "last_emoticon_pos",
        "last_emoticon_neg",
    }
    for tweet in tweets:
        features = feature_counts(tokenize(tweet.text), [good_bad], 2)
        assert all(value > 0 for value in features.values())
        assert all(features[name] == 1.0 for name in booleans & set(features))


def test_feature_count_contracts(good_bad):
    """Test invalid n-gram orders and duplicate lexicon names."""
    with pytest.raises(ContractError):
        feature_counts(tokenize("a"), [], 0)
    with pytest.raises(ContractError):
        feature_counts(tokenize("a"), [good_bad, good_bad], 1)


def test_extract_features_grows_and_freezes_index(good_bad):
    """Test that a frozen index drops unseen features."""
    index = FeatureIndex()
    first = extract_features(Tweet(id="a", text="good day"), [good_bad], index, 1)
    assert first.named(index) == {
        "ngram:1:good": 1.0,
        "ngram:1:day": 1.0,
        "lexicon:L:positive": 1.0,
    }

    index.freeze()
    size = len(index)
    second = extract_features(Tweet(id="b", text="good night"), [good_bad], index, 1)
    assert len(index) == size
    assert second.named(index) == {"ngram:1:good": 1.0, "lexicon:L:positive": 1.0}


def test_extract_features_is_deterministic(good_bad):
    """Test identical vectors for identical input."""
    index = FeatureIndex()
    tweet = Tweet(id="a", text="GOOD day!! :)")
    assert extract_features(tweet, [good_bad], index, 2) == extract_features(tweet, [good_bad], index, 2)


def test_extract_features_rejects_empty_text():
    """Test that empty text is a contract error."""
    with pytest.raises(ContractError):
        extract_features(Tweet(id="a", text="  "), [], FeatureIndex(), 1)


def test_feature_index_save_and_load(tmp_path):
    """Test the index file round trip and its contracts."""
    index = FeatureIndex()
    for name in ["b", "a", "ngram:2:good day"]:
        index.lookup(name)
    path = tmp_path / "features.index"
    index.save(path)

    loaded = FeatureIndex.load(path)
    assert loaded.names() == ["b", "a", "ngram:2:good day"]
    assert loaded.frozen
    assert loaded.lookup("unseen") is None

    with pytest.raises(ContractError):
        FeatureIndex(["x", "x"])

    path.write_text("0\ta\n2\tb\n", encoding="utf-8")
    with pytest.raises(ParseError):
        FeatureIndex.load(path)


def test_feature_vector_contracts():
    """Test vector validation and dense conversion."""
    vector = FeatureVector({3: 2.0, 0: 1.0})
    assert vector.items() == [(0, 1.0), (3, 2.0)]
    assert vector[5] == 0.0
    np.testing.assert_array_equal(vector.to_dense(3), [1.0, 0.0, 0.0])
    with pytest.raises(ContractError):
        FeatureVector({-1: 1.0})
    with pytest.raises(ContractError):
        FeatureVector({0: float("nan")})


def test_featurize_dataset_order_and_replay(tweets, good_bad):
    """Test input-order alignment and train-then-frozen replay equality."""
    index = FeatureIndex()
    train_set = featurize_dataset(tweets, [good_bad], index, 2)
    assert train_set.ids == ["1", "2", "3", "4"]
    assert train_set.n_features == len(index)

    replay = featurize_dataset(tweets, [good_bad], index, 2, training=False, workers=3)
    assert (train_set.matrix() != replay.matrix()).nnz == 0
    assert replay.vectors == train_set.vectors


def test_inference_leaves_caller_index_growable(tweets, good_bad):
    """Test that inference mode does not freeze the caller's index."""
    index = FeatureIndex()
    featurize_dataset(tweets[:2], [good_bad], index, 1)
    size = len(index)

    unseen = featurize_dataset([Tweet(id="9", text="fresh words")], [good_bad], index, 1, training=False)
    assert not index.frozen
    assert len(index) == size
    assert unseen.n_features == size
    assert len(unseen.vectors[0]) == 0

    featurize_dataset(tweets[2:], [good_bad], index, 1)
    assert len(index) > size


def test_featurize_dataset_edge_cases(tweets, good_bad):
    """Test the empty list, duplicates and index-mode contracts."""
    assert len(featurize_dataset([], [], FeatureIndex(), 1)) == 0

    doubled = featurize_dataset([tweets[0], tweets[0]], [good_bad], FeatureIndex(), 2)
    assert doubled.vectors[0] == doubled.vectors[1]

    with pytest.raises(ContractError):
        featurize_dataset(tweets, [], FeatureIndex(), 1, training=False)
    with pytest.raises(ContractError):
        featurize_dataset(tweets, [], FeatureIndex(["a"], frozen=True), 1)


def test_dataset_matrix_and_labels(tweets):
    """Test the sparse matrix, class ids and subsets."""
    dataset = featurize_dataset(tweets, [], FeatureIndex(), 1)
    matrix = dataset.matrix()
    assert matrix.shape == (4, dataset.n_features)
    assert dataset.class_ids().tolist() == [2, 0, 1, 1]
    assert dataset.subset([2, 2]).ids == ["3", "3"]

    unlabeled = LabeledDataset(ids=["x"], vectors=[FeatureVector({})], labels=[None], n_features=0)
    with pytest.raises(DataError):
        unlabeled.class_ids()


def test_dataset_file_round_trip(tmp_path, tweets):
    """Test that written datasets load back unchanged, quotes included."""
    extra = Tweet(id="5", text='she said "hi" :\'(', label=None)
    path = tmp_path / "tweets.tsv"
    save_dataset(tweets + [extra], path)
    assert load_dataset(path) == tweets + [extra]


def test_load_dataset_formats(tmp_path):
    """Test two-column files, unknown labels and empty files."""
    two_columns = tmp_path / "unlabeled.tsv"
    two_columns.write_text("a\tfirst tweet\nb\tsecond tweet\n", encoding="utf-8")
    assert [t.label for t in load_dataset(two_columns)] == [None, None]

    bad = tmp_path / "bad.tsv"
    bad.write_text("a\tpositive\tfine\nb\tmeh\tnot fine\n", encoding="utf-8")
    with pytest.raises(ParseError, match="at line 2"):
        load_dataset(bad)

    empty = tmp_path / "empty.tsv"
    empty.write_text("", encoding="utf-8")
    assert load_dataset(empty) == []

    with pytest.raises(FileNotFoundError):
        load_dataset(tmp_path / "missing.tsv")


def test_save_dataset_rejects_tabs(tmp_path):
    """Test that tabs in text cannot be written."""
    with pytest.raises(ContractError):
        save_dataset([Tweet(id="a", text="x\ty")], tmp_path / "out.tsv")


def test_export_svmlight(tmp_path, tweets, good_bad):
    """Test the sparse export and its index mapping."""
    index = FeatureIndex()
    dataset = featurize_dataset(tweets, [good_bad], index, 2)
    mapping = export_svmlight(dataset, index, tmp_path / "train.svm")

    X, y = load_svmlight_file(str(tmp_path / "train.svm"), n_features=len(index), zero_based=True)
    assert y.tolist() == [2.0, 0.0, 1.0, 1.0]
    assert np.allclose(X.toarray(), dataset.matrix().toarray())
    assert FeatureIndex.load(mapping).names() == index.names()
