"""Rule-based tweet tokenizer with a fixed emoticon table.

Text is split on whitespace and every chunk is refined left to right:

* ``http://``, ``https://`` and ``www.`` chunks become ``<url>`` (kind other)
* ``#tag`` becomes ``<hashtag>``, ``@name`` becomes ``<user>``
* emoticons from ``EMOTICONS`` keep their surface and are classified
* runs of ``!`` and ``?`` (any mix, any length) become punct_run tokens
* words (letters, digits, underscores, inner apostrophes) keep their case
* any other non-space character is a single token of kind other
"""

import re
from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple

from app.core.types import TokenKind

HASHTAG_SURFACE = "<hashtag>"
USER_SURFACE = "<user>"
URL_SURFACE = "<url>"

POSITIVE_EMOTICONS: Tuple[str, ...] = (
    ":)", ":-)", ":]", ":-]", ":D", ":-D", ":o)", ":')",
    "=)", "=]", "=D", ";)", ";-)", ";D", "(:", "(-:", "(=",
    ":P", ":-P", ":p", ":-p", "xD", "XD", "8)", "8-)",
    ":*", ":-*", "<3", "^_^", "^^",
)
NEGATIVE_EMOTICONS: Tuple[str, ...] = (
    ":(", ":-(", ":[", ":-[", ":'(", ":/", ":-/", ":\\", ":|",
    ":S", ":-S", ":@", "=(", "=/", ";(", "):", ")-:", "D:",
    ">:(", "</3", "-_-",
)

# surface -> kind, for the emoticons the tokenizer recognizes
EMOTICONS: Dict[str, TokenKind] = {
    **{e: TokenKind.EMOTICON_POS for e in POSITIVE_EMOTICONS},
    **{e: TokenKind.EMOTICON_NEG for e in NEGATIVE_EMOTICONS},
}

URL_PATTERN = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
ELONGATED_PATTERN = re.compile(r"(.)\1{3,}")


def _emoticon_alternative(emoticon: str) -> str:
    pattern = re.escape(emoticon)
    # emoticons bordering on letters must not split a word
    if emoticon[0].isalnum():
        pattern = r"(?<!\w)" + pattern
    if emoticon[-1].isalnum():
        pattern += r"(?!\w)"
    return pattern


_EMOTICON_ALTERNATIVES = "|".join(
    _emoticon_alternative(e) for e in sorted(EMOTICONS, key=lambda e: (-len(e), e))
)

CHUNK_PATTERN = re.compile(
    rf"""
    (?P<hashtag>\#\w+)
    |(?P<usertag>@\w+)
    |(?P<emoticon>{_EMOTICON_ALTERNATIVES})
    |(?P<punct_run>[!?]+)
    |(?P<word>\w+(?:['’]\w+)*)
    |(?P<other>\S)
    """,
    re.VERBOSE | re.UNICODE,
)


@dataclass(frozen=True)
class Token:
    """Single token: display surface and kind."""

    surface: str
    kind: TokenKind


@dataclass(frozen=True)
class TokenStream:
    """Tokens of one text in source order."""

    tokens: Tuple[Token, ...] = ()

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __getitem__(self, position: int) -> Token:
        return self.tokens[position]

    def of_kind(self, kind: TokenKind) -> List[Token]:
        """Tokens of one kind, in order."""
        return [t for t in self.tokens if t.kind is kind]

    def surfaces(self) -> List[str]:
        """Token surfaces in order."""
        return [t.surface for t in self.tokens]


def _tokenize_chunk(chunk: str) -> List[Token]:
    if chunk in EMOTICONS:
        return [Token(chunk, EMOTICONS[chunk])]
    if URL_PATTERN.match(chunk):
        return [Token(URL_SURFACE, TokenKind.OTHER)]

    tokens: List[Token] = []
    for match in CHUNK_PATTERN.finditer(chunk):
        group = match.lastgroup
        surface = match.group()
        if group == "hashtag":
            tokens.append(Token(HASHTAG_SURFACE, TokenKind.HASHTAG))
        elif group == "usertag":
            tokens.append(Token(USER_SURFACE, TokenKind.USERTAG))
        elif group == "emoticon":
            tokens.append(Token(surface, EMOTICONS[surface]))
        elif group == "punct_run":
            tokens.append(Token(surface, TokenKind.PUNCT_RUN))
        elif group == "word":
            tokens.append(Token(surface, TokenKind.WORD))
        else:
            tokens.append(Token(surface, TokenKind.OTHER))
    return tokens


def tokenize(text: str) -> TokenStream:
    """
    Tokenize a tweet.

    Args:
        text: Raw tweet text

    Returns:
        TokenStream (empty for empty or blank text)
    """
    tokens: List[Token] = []
    for chunk in text.split():
        tokens.extend(_tokenize_chunk(chunk))
    return TokenStream(tuple(tokens))


def is_elongated(surface: str) -> bool:
    """True if some character repeats at least four times in a row."""
    return ELONGATED_PATTERN.search(surface) is not None


def is_all_caps(surface: str) -> bool:
    """True for alphabetic words of two or more upper-case characters."""
    return len(surface) >= 2 and surface.isalpha() and surface.isupper()
