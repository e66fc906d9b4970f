"""BIO tag handling over word pieces and constrained Viterbi decoding.

Word-level tags are propagated onto word pieces for training, and recovered
from the first piece of each word after decoding. Decoding maximizes the sum
of per-position scores subject to two constraints: a sequence cannot start
with an I- tag, and an I-X must follow B-X or I-X of the same X.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class TagError(ValueError):
    pass


def split_tag(tag: str) -> tuple[str, str | None]:
    """("B"|"I"|"O", argument kind). Raises TagError on malformed tags."""
    if tag == "O":
        return "O", None
    if len(tag) > 2 and tag[1] == "-" and tag[0] in ("B", "I"):
        return tag[0], tag[2:]
    raise TagError(f"malformed BIO tag {tag!r}")


def is_allowed_transition(prev: str, cur: str) -> bool:
    head, kind = split_tag(cur)
    if head != "I":
        return True
    prev_head, prev_kind = split_tag(prev)
    return prev_head in ("B", "I") and prev_kind == kind


def is_allowed_start(tag: str) -> bool:
    return split_tag(tag)[0] != "I"


def validate_sequence(tags) -> None:
    tags = list(tags)
    if tags and not is_allowed_start(tags[0]):
        raise TagError(f"sequence starts with {tags[0]!r}")
    for prev, cur in zip(tags, tags[1:]):
        if not is_allowed_transition(prev, cur):
            raise TagError(f"illegal transition {prev!r} -> {cur!r}")


def _check_wordpiece_map(wordpiece_map, num_pieces=None):
    prev_end = -1
    for start, end in wordpiece_map:
        if start >= end:
            raise ValueError(f"empty word-piece range ({start}, {end})")
        if start < prev_end:
            raise ValueError("word-piece ranges must be ascending and disjoint")
        prev_end = end
    if num_pieces is not None and prev_end > num_pieces:
        raise ValueError("word-piece ranges exceed the piece count")


def propagate_tags(word_tags, wordpiece_map, num_pieces: int | None = None) -> list[str]:
    """Spread word-level BIO tags onto pieces.

    B-X goes on the first piece with I-X on the rest; I-X and O are copied to
    every piece; positions not covered by any word range (boundary tokens)
    get O.
    """
    word_tags = list(word_tags)
    wordpiece_map = [tuple(r) for r in wordpiece_map]
    if len(word_tags) != len(wordpiece_map):
        raise ValueError(
            f"{len(word_tags)} word tags for {len(wordpiece_map)} word-piece ranges"
        )
    _check_wordpiece_map(wordpiece_map, num_pieces)
    total = num_pieces if num_pieces is not None else (
        wordpiece_map[-1][1] if wordpiece_map else 0
    )
    out = ["O"] * total
    for tag, (start, end) in zip(word_tags, wordpiece_map):
        head, kind = split_tag(tag)
        if head == "B":
            out[start] = tag
            for i in range(start + 1, end):
                out[i] = f"I-{kind}"
        else:
            for i in range(start, end):
                out[i] = tag
    return out


def recover_word_tags(piece_tags, wordpiece_map) -> list[str]:
    """Word tag = the predicted tag of the word's first piece."""
    piece_tags = list(piece_tags)
    wordpiece_map = [tuple(r) for r in wordpiece_map]
    _check_wordpiece_map(wordpiece_map, len(piece_tags))
    return [piece_tags[start] for start, _ in wordpiece_map]


@dataclass
class TagLattice:
    """Per-piece tag score matrix plus the word/piece alignment."""

    pieces: tuple[str, ...]
    tagset: tuple[str, ...]
    scores: np.ndarray  # shape (len(pieces), len(tagset))
    wordpiece_map: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        self.pieces = tuple(self.pieces)
        self.tagset = tuple(self.tagset)
        self.scores = np.asarray(self.scores, dtype=float)
        self.wordpiece_map = tuple(tuple(r) for r in self.wordpiece_map)
        if self.scores.shape != (len(self.pieces), len(self.tagset)):
            raise ValueError(
                f"scores shape {self.scores.shape} does not match "
                f"{len(self.pieces)} pieces x {len(self.tagset)} tags"
            )
        if not np.isfinite(self.scores).all():
            raise ValueError("scores must be finite")
        if "O" not in self.tagset:
            raise ValueError("tagset must contain 'O'")
        kinds = {split_tag(t)[1] for t in self.tagset if split_tag(t)[0] == "B"}
        for tag in self.tagset:
            head, kind = split_tag(tag)
            if head == "I" and kind not in kinds:
                raise ValueError(f"{tag} has no matching B-{kind} in the tagset")
        _check_wordpiece_map(self.wordpiece_map, len(self.pieces))

    def to_record(self) -> dict:
        return {
            "pieces": list(self.pieces),
            "tagset": list(self.tagset),
            "scores": [float(x) for x in self.scores.reshape(-1)],
            "wordpiece_map": [list(r) for r in self.wordpiece_map],
        }

    @classmethod
    def from_record(cls, rec: dict) -> "TagLattice":
        pieces = rec["pieces"]
        tagset = rec["tagset"]
        scores = np.asarray(rec["scores"], dtype=float).reshape(len(pieces), len(tagset))
        return cls(pieces, tagset, scores, rec.get("wordpiece_map", ()))


def constrained_viterbi(lattice: TagLattice) -> tuple[list[str], float]:
    """Best valid tag sequence and its score.

    Score ties are broken in favor of the lowest tag index at the latest
    position where candidates differ, which makes decoding deterministic.
    """
    n, t = lattice.scores.shape
    if n == 0:
        return [], 0.0
    tags = lattice.tagset
    allowed = np.zeros((t, t), dtype=bool)
    for i, prev in enumerate(tags):
        for j, cur in enumerate(tags):
            allowed[i, j] = is_allowed_transition(prev, cur)
    start_ok = np.array([is_allowed_start(tag) for tag in tags])

    best = np.full((n, t), -np.inf)
    back = np.zeros((n, t), dtype=int)
    best[0, start_ok] = lattice.scores[0, start_ok]
    for pos in range(1, n):
        candidates = np.where(allowed, best[pos - 1][:, None], -np.inf)
        back[pos] = candidates.argmax(axis=0)  # first max = lowest tag index
        best[pos] = candidates.max(axis=0) + lattice.scores[pos]

    last = int(np.argmax(best[-1]))
    score = float(best[-1, last])
    if not np.isfinite(score):
        raise TagError("no valid sequence (tagset lacks a usable start tag)")
    indices = [last]
    for pos in range(n - 1, 0, -1):
        indices.append(int(back[pos, indices[-1]]))
    indices.reverse()
    decoded = [tags[i] for i in indices]
    validate_sequence(decoded)  # both constraints re-checked on every output
    return decoded, score


def load_lattices(path) -> list[TagLattice]:
    lattices = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            lattices.append(TagLattice.from_record(json.loads(line)))
        except (ValueError, KeyError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return lattices
