"""Locate coordinating conjunctions and their flanking conjuncts.

A coordination is a CC leaf ("and", "or", "but", "nor") together with the
nearest non-punctuation sibling constituent on each side. When a conjunction
joins more than two conjuncts, only the two adjacent ones are kept.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .text import CLAUSE_NEGATORS, CONJUNCTIONS, NEGATIONS, QUANTIFIERS
from .treebank import ParseNode, Sentence, yield_tokens

PUNCT_LABELS = {",", ".", ":"}

_CLAUSE_LABELS = {"S", "SBAR"}
_PROPER_NOUN_LABELS = {"NNP", "NNPS"}


@dataclass
class CoordinationInstance:
    """One conjunction occurrence with its two flanking conjunct spans."""

    conj_word: str
    conj_index: int
    left_conjunct: tuple[int, int]
    right_conjunct: tuple[int, int]
    left_label: str
    right_label: str
    parent_label: str
    negated: bool = False
    in_named_entity: bool = False
    ne_source: str = "none"  # "ner" | "heuristic" | "none"

    def __post_init__(self):
        if self.conj_word not in CONJUNCTIONS:
            raise ValueError(f"unknown conjunction {self.conj_word!r}")
        ls, le = self.left_conjunct
        rs, re = self.right_conjunct
        if not (ls < le and rs < re):
            raise ValueError("conjunct spans must be non-empty")
        if not (le <= self.conj_index < rs):
            raise ValueError("conjunction must sit between its conjuncts")


@dataclass(frozen=True)
class SentenceFeatures:
    conjunction_count: int
    has_quantifier: bool
    has_negation: bool
    conjunction_types: frozenset[str] = field(default_factory=frozenset)


def detect_features(sentence, quantifiers=QUANTIFIERS, negations=NEGATIONS) -> SentenceFeatures:
    """Count conjunction tokens and flag quantifier/negation presence."""
    tokens = sentence.tokens if isinstance(sentence, Sentence) else tuple(sentence)
    lowered = [t.lower() for t in tokens]
    types = frozenset(t for t in lowered if t in CONJUNCTIONS)
    return SentenceFeatures(
        conjunction_count=sum(1 for t in lowered if t in CONJUNCTIONS),
        has_quantifier=any(t in quantifiers for t in lowered),
        has_negation=any(t in negations for t in lowered),
        conjunction_types=types,
    )


def find_coordinations(tree: ParseNode, sentence: Sentence):
    """Return (instances, warnings) for every usable CC leaf in the tree.

    A CC without a non-punctuation sibling on each side is skipped and
    reported as a warning record rather than failing the sentence.
    """
    if tuple(yield_tokens(tree)) != tuple(sentence.tokens):
        raise ValueError(
            f"{sentence.source_id or 'sentence'}: tree yield does not match tokens"
        )
    instances: list[CoordinationInstance] = []
    warnings: list[dict] = []
    _walk(tree, [], sentence, instances, warnings)
    return instances, warnings


def _walk(node, ancestors, sentence, instances, warnings):
    if node.is_leaf:
        return
    for idx, child in enumerate(node.children):
        if (
            child.is_leaf
            and child.base_label == "CC"
            and child.token.lower() in CONJUNCTIONS
        ):
            left = _nearest_constituent(node.children, idx, -1)
            right = _nearest_constituent(node.children, idx, +1)
            if left is None or right is None:
                warnings.append({
                    "source_id": sentence.source_id,
                    "conj_index": child.span[0],
                    "conj_word": child.token.lower(),
                    "reason": "missing-conjunct",
                })
            else:
                instances.append(
                    _build_instance(child, left, right, node, ancestors, sentence)
                )
        if not child.is_leaf:
            _walk(child, ancestors + [node], sentence, instances, warnings)


def _nearest_constituent(children, idx, step):
    j = idx + step
    while 0 <= j < len(children):
        if children[j].label not in PUNCT_LABELS:
            return children[j]
        j += step
    return None


def _build_instance(cc, left, right, parent, ancestors, sentence):
    conj_index = cc.span[0]
    negated = _negated_before(conj_index, parent, ancestors, sentence)
    in_ne, ne_source = _named_entity(left, right, parent, sentence)
    return CoordinationInstance(
        conj_word=cc.token.lower(),
        conj_index=conj_index,
        left_conjunct=left.span,
        right_conjunct=right.span,
        left_label=left.label,
        right_label=right.label,
        parent_label=parent.label,
        negated=negated,
        in_named_entity=in_ne,
        ne_source=ne_source,
    )


def _negated_before(conj_index, parent, ancestors, sentence):
    # Scope is the smallest S/SBAR ancestor; the whole sentence if none.
    scope = None
    for node in [parent] + ancestors[::-1]:
        if node.base_label in _CLAUSE_LABELS:
            scope = node
            break
    start = scope.span[0] if scope is not None else 0
    window = sentence.tokens[start:conj_index]
    return any(t.lower() in CLAUSE_NEGATORS for t in window)


def _named_entity(left, right, parent, sentence):
    if sentence.ner is not None:
        for start, end in _bio_mentions(sentence.ner):
            if start <= left.span[0] and end >= right.span[1]:
                return True, "ner"
        return False, "none"
    # Capitalization fallback, flagged as heuristic in provenance.
    if parent.base_label != "NP":
        return False, "none"
    for span in (left.span, right.span):
        for tok in sentence.tokens[span[0]:span[1]]:
            if tok[:1].isalpha() and not tok[0].isupper():
                return False, "none"
    if (
        _head_category(left) in _PROPER_NOUN_LABELS
        and _head_category(right) in _PROPER_NOUN_LABELS
    ):
        return True, "heuristic"
    return False, "none"


def _head_category(node):
    """Base label of the rightmost non-punctuation leaf."""
    while not node.is_leaf:
        for child in reversed(node.children):
            if child.label not in PUNCT_LABELS:
                node = child
                break
        else:
            node = node.children[-1]
    return node.base_label


def _bio_mentions(tags):
    mentions = []
    start = None
    kind = None
    for i, tag in enumerate(tags):
        if tag.startswith("B-"):
            if start is not None:
                mentions.append((start, i))
            start, kind = i, tag[2:]
        elif tag.startswith("I-"):
            if start is None or tag[2:] != kind:
                # lenient: treat a stray I- as opening a mention
                if start is not None:
                    mentions.append((start, i))
                start, kind = i, tag[2:]
        else:
            if start is not None:
                mentions.append((start, i))
            start, kind = None, None
    if start is not None:
        mentions.append((start, len(tags)))
    return mentions
