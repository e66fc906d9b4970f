"""Shared tokenization, detokenization and lexicon defaults."""
from __future__ import annotations

import re

CONJUNCTIONS = ("and", "or", "but", "nor")

# Both lexicons are overridable wherever they are consumed; these are the
# defaults used throughout the pipeline.
QUANTIFIERS = frozenset({
    "all", "every", "each", "some", "any", "most", "few", "many",
    "several", "both", "no", "none", "total",
})
NEGATIONS = frozenset({"not", "n't", "no", "never", "none", "nor", "neither"})

# Negation cues that scope over a following coordination ("did not produce
# gravity or anti-gravity"). Excludes "neither", which introduces its own
# correlative construction.
CLAUSE_NEGATORS = frozenset({"not", "n't", "no", "never", "none", "nor"})

_WORD_RE = re.compile(r"[\w']+")

_NO_SPACE_BEFORE = {",", ".", ":", ";", "%", "''", "'"}
_OPEN_BRACKETS = {"(", "[", "{"}


def word_tokens(text: str) -> list[str]:
    """Lowercased word tokens of ``text``, for lexicon and bucket matching."""
    return _WORD_RE.findall(text.lower())


def detokenize_with_offsets(tokens) -> tuple[str, list[tuple[int, int]]]:
    """Join tokens into a surface string, returning per-token char spans.

    Single spaces everywhere, except: no space before , . : ; ' '' % or any
    token starting with an apostrophe, and no space after ( [ {.
    """
    out: list[str] = []
    spans: list[tuple[int, int]] = []
    pos = 0
    prev = None
    for tok in tokens:
        glue = (
            prev is None
            or prev in _OPEN_BRACKETS
            or tok in _NO_SPACE_BEFORE
            or tok.startswith("'")
        )
        if not glue:
            out.append(" ")
            pos += 1
        out.append(tok)
        spans.append((pos, pos + len(tok)))
        pos += len(tok)
        prev = tok
    return "".join(out), spans


def detokenize(tokens_or_text) -> str:
    """Detokenize a token sequence, or re-detokenize a whitespace-split string."""
    if isinstance(tokens_or_text, str):
        tokens_or_text = tokens_or_text.split()
    return detokenize_with_offsets(tokens_or_text)[0]
