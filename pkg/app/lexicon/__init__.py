"""Polarity lexicons and their cross-lingual transfer."""

from app.lexicon.lexicon import (
    LexiconStats,
    PolarityLexicon,
    Provenance,
    lexicon_stats,
    load_lexicon,
    make_lexicon,
    parse_lexicon,
    save_lexicon,
    serialize_lexicon,
    union_all,
    union_lexicons,
)
from app.lexicon.transfer import TransferReport, transfer_lexicon

__all__ = [
    "LexiconStats",
    "PolarityLexicon",
    "Provenance",
    "TransferReport",
    "lexicon_stats",
    "load_lexicon",
    "make_lexicon",
    "parse_lexicon",
    "save_lexicon",
    "serialize_lexicon",
    "transfer_lexicon",
    "union_all",
    "union_lexicons",
]
