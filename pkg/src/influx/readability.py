"""Flesch reading-ease scoring with a fixed, documented syllable heuristic.

    score = 206.835 - 1.015 * (words / sentences) - 84.6 * (syllables / words)

Higher scores mean easier text. There is no canonical syllable counter,
so this module freezes one and every fixture is computed under it:

* lowercase the word and count maximal runs of the vowels a e i o u y
  (y always counts as a vowel; apostrophes break runs);
* subtract one syllable for a trailing "e", "es", or "ed" whose "e"
  forms its own vowel run (a silent e), unless the word ends in a
  consonant followed by "le" ("table" keeps its final syllable);
* never return fewer than one syllable.

Words are maximal alphabetic runs (apostrophes allowed inside, so
"don't" is one word). Sentences are the segments left after splitting on
runs of ``. ! ?``; a segment counts only if it contains a word, so an
unterminated trailing sentence still counts and stray terminators do not.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from influx.dataset import ValidationError

_WORD_RE = re.compile(r"[A-Za-z']+")
_SENTENCE_SPLIT_RE = re.compile(r"[.!?]+")
_VOWELS = frozenset("aeiouy")


@dataclass(frozen=True)
class ReadabilityBreakdown:
    score: float
    n_words: int
    n_sentences: int
    n_syllables: int


def words(text: str) -> list[str]:
    return [t for t in _WORD_RE.findall(text) if any(c.isalpha() for c in t)]


def sentence_count(text: str) -> int:
    return sum(
        1
        for segment in _SENTENCE_SPLIT_RE.split(text)
        if any(c.isalpha() for c in segment)
    )


def count_syllables(word: str) -> int:
    """Syllable count of one word under the frozen heuristic above."""
    if not word or not any(c.isalpha() for c in word) or not all(
        c.isalpha() or c == "'" for c in word
    ):
        raise ValidationError(f"not an alphabetic token: {word!r}")
    w = word.lower()

    runs = 0
    previous_vowel = False
    for c in w:
        vowel = c in _VOWELS
        if vowel and not previous_vowel:
            runs += 1
        previous_vowel = vowel

    keeps_le_syllable = len(w) >= 3 and w.endswith("le") and w[-3] not in _VOWELS
    if not keeps_le_syllable:
        if w.endswith("e"):
            silent = len(w) < 2 or w[-2] not in _VOWELS
        elif w.endswith(("es", "ed")):
            silent = len(w) >= 3 and w[-3] not in _VOWELS
        else:
            silent = False
        if silent:
            runs -= 1
    return max(runs, 1)


def fres_score(text: str) -> ReadabilityBreakdown:
    """Reading-ease score and the counts behind it, unrounded."""
    ws = words(text)
    if not ws:
        raise ValidationError("no words found")
    n_words = len(ws)
    n_sentences = sentence_count(text)
    n_syllables = sum(count_syllables(w) for w in ws)
    score = 206.835 - 1.015 * (n_words / n_sentences) - 84.6 * (n_syllables / n_words)
    return ReadabilityBreakdown(score, n_words, n_sentences, n_syllables)
