"""Polarity, label and token-kind enumerations shared across modules."""

from enum import Enum
from typing import Type, TypeVar

E = TypeVar("E", bound="_LowerCaseEnum")


class _LowerCaseEnum(str, Enum):
    """String enum parsed case-insensitively from its lower-case value."""

    @classmethod
    def from_string(cls: Type[E], value: str) -> E:
        """
        Convert string to enum member (case-insensitive).

        Args:
            value: String value (e.g., "positive", "POSITIVE")

        Returns:
            Enum member

        Raises:
            ValueError: If the value is not recognized
        """
        if not value:
            raise ValueError(f"{cls.__name__} value cannot be empty")

        normalized = value.strip().lower()
        for member in cls:
            if member.value == normalized:
                return member

        raise ValueError(
            f"Unknown {cls.__name__}: '{value}'. "
            f"Available values: {[m.value for m in cls]}"
        )

    def __str__(self) -> str:
        """String representation returns the enum value."""
        return self.value


class Polarity(_LowerCaseEnum):
    """Polarity of a lexicon entry."""

    POSITIVE = "positive"
    NEGATIVE = "negative"


class Label(_LowerCaseEnum):
    """Gold or predicted tweet class.

    Declaration order is the fixed class order used for tie-breaking and for
    every per-class array: negative < neutral < positive.
    """

    NEGATIVE = "negative"
    NEUTRAL = "neutral"
    POSITIVE = "positive"

    @classmethod
    def ordered(cls) -> tuple["Label", ...]:
        """Return the three classes in the fixed class order."""
        return tuple(cls)

    @property
    def class_id(self) -> int:
        """Position of the class in the fixed class order."""
        return CLASS_ORDER.index(self)


CLASS_ORDER: tuple[Label, ...] = Label.ordered()


class TokenKind(_LowerCaseEnum):
    """Kind of a token produced by the tweet tokenizer."""

    WORD = "word"
    HASHTAG = "hashtag"
    USERTAG = "usertag"
    EMOTICON_POS = "emoticon_pos"
    EMOTICON_NEG = "emoticon_neg"
    PUNCT_RUN = "punct_run"
    OTHER = "other"


class ProvenanceMethod(_LowerCaseEnum):
    """How a lexicon entry came to be."""

    NATIVE = "native"
    TRANSFERRED = "transferred"
    UNION = "union"
