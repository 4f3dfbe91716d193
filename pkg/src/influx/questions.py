"""Filter for questions that probe wording rather than meaning.

Questions like "what does the underlined word in paragraph 2 mean?" are
only answerable against one specific wording of a passage; they must be
dropped before measuring how much meaning (as opposed to wording)
drives the output. The rule is a word-level match, case-insensitive:

a question is flagged when it mentions a structural unit of text
(word, sentence, paragraph, phrase) and either

* also uses a reference verb (refer / mean, in any listed form), or
* places the unit within two tokens of a number or ordinal
  ("paragraph 2", "the second sentence").
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

_TOKEN_RE = re.compile(r"[a-z0-9']+")

_UNIT_WORDS = frozenset(
    {"word", "words", "sentence", "sentences", "paragraph", "paragraphs", "phrase"}
)
_REFERENCE_VERBS = frozenset({"refer", "refers", "referred", "mean", "means", "meant"})
_ORDINAL_WORDS = frozenset(
    {
        "first",
        "second",
        "third",
        "fourth",
        "fifth",
        "sixth",
        "seventh",
        "eighth",
        "ninth",
        "tenth",
    }
)
_ORDINAL_SUFFIX_RE = re.compile(r"\d+(st|nd|rd|th)")


def _is_number_token(token: str) -> bool:
    return (
        token.isdigit()
        or token in _ORDINAL_WORDS
        or _ORDINAL_SUFFIX_RE.fullmatch(token) is not None
    )


def is_linguistic_question(question_text: str) -> bool:
    """True when the question should be filtered out (wording-bound)."""
    tokens = _TOKEN_RE.findall(question_text.lower())
    unit_positions = [i for i, t in enumerate(tokens) if t in _UNIT_WORDS]
    if not unit_positions:
        return False
    if any(t in _REFERENCE_VERBS for t in tokens):
        return True
    number_positions = [i for i, t in enumerate(tokens) if _is_number_token(t)]
    return any(
        abs(u - n) <= 2 for u in unit_positions for n in number_positions
    )


def filter_questions(texts: Iterable[str]) -> tuple[list[str], list[str]]:
    """Split question texts into (kept, removed) in input order."""
    kept: list[str] = []
    removed: list[str] = []
    for text in texts:
        (removed if is_linguistic_question(text) else kept).append(text)
    return kept, removed


def removed_fraction(texts: Sequence[str]) -> float:
    if not texts:
        return 0.0
    _, removed = filter_questions(texts)
    return len(removed) / len(texts)
