"""Create candidate NLI pairs by removing, adding or replacing conjuncts.

Each produced pair differs from its premise by exactly one conjunct edit.
Labels are not assigned here (see labeler); the only filtering applied is
dropping hypotheses that duplicate the premise.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field, replace as dc_replace

from .coordination import CoordinationInstance, detect_features, find_coordinations
from .text import NEGATIONS, QUANTIFIERS, detokenize_with_offsets
from .treebank import ParseNode, Sentence

REMOVE = "remove"
ADD = "add"
REPLACE = "replace"
EITHER_OR_PROBE = "either_or_probe"

OPERATIONS = (REMOVE, ADD, REPLACE, EITHER_OR_PROBE)

LABELS = ("entailment", "neutral", "contradiction")

_NUMBER_RE = re.compile(r"^\d+$|^\d{1,3}(?:,\d{3})+$")
_TERMINALS = {".", "!", "?"}


class PairGenError(ValueError):
    pass


@dataclass
class NliPair:
    premise: str
    hypothesis: str
    operation: str
    conj_word: str
    side: str | None = None  # which conjunct was removed/replaced
    replacement_kind: str | None = None
    label: str | None = None
    label_source: str = "none"  # "heuristic" | "human" | "none"
    source_id: str = ""
    pair_id: str | None = None
    flags: dict = field(default_factory=dict)
    # span metadata for the coordinated sentence (premise or hypothesis),
    # used by the probe rewrite and for highlighting in the annotation UI
    coordination: dict | None = None
    boolean: bool | None = None

    def __post_init__(self):
        if self.premise == self.hypothesis:
            raise PairGenError("hypothesis duplicates the premise")
        if self.operation not in OPERATIONS:
            raise PairGenError(f"unknown operation {self.operation!r}")
        if self.label is not None and self.label_source == "none":
            raise PairGenError("a labeled pair needs a label_source")

    def swapped(self) -> "NliPair":
        """Premise/hypothesis exchanged, label cleared. Applied twice is identity."""
        coord = dict(self.coordination) if self.coordination else None
        if coord is not None:
            coord["target"] = "hypothesis" if coord["target"] == "premise" else "premise"
        return dc_replace(
            self,
            premise=self.hypothesis,
            hypothesis=self.premise,
            label=None,
            label_source="none",
            coordination=coord,
        )

    def to_record(self) -> dict:
        rec = {
            "id": self.pair_id,
            "premise": self.premise,
            "hypothesis": self.hypothesis,
            "operation": self.operation,
            "conj_word": self.conj_word,
            "side": self.side,
            "replacement_kind": self.replacement_kind,
            "label": self.label,
            "label_source": self.label_source,
            "source_id": self.source_id,
            "flags": self.flags,
        }
        if self.coordination is not None:
            rec["coordination"] = self.coordination
        if self.boolean is not None:
            rec["boolean"] = self.boolean
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "NliPair":
        return cls(
            premise=rec["premise"],
            hypothesis=rec["hypothesis"],
            operation=rec.get("operation", REMOVE),
            conj_word=rec.get("conj_word", "and"),
            side=rec.get("side"),
            replacement_kind=rec.get("replacement_kind"),
            label=rec.get("label"),
            label_source=rec.get("label_source", "none"),
            source_id=rec.get("source_id", ""),
            pair_id=rec.get("id"),
            flags=rec.get("flags", {}),
            coordination=rec.get("coordination"),
            boolean=rec.get("boolean"),
        )


@dataclass
class ReplacementLexicon:
    antonyms: dict[str, str] = field(default_factory=dict)
    co_hyponyms: dict[str, list[str]] = field(default_factory=dict)
    name_pool: list[str] = field(default_factory=list)

    def __post_init__(self):
        for word, sub in self.antonyms.items():
            if word == sub:
                raise ValueError(f"antonym maps {word!r} to itself")
        for word, subs in self.co_hyponyms.items():
            if word in subs:
                raise ValueError(f"co-hyponym list for {word!r} contains itself")
        if any(not name for name in self.name_pool):
            raise ValueError("name_pool entries must be non-empty")

    @classmethod
    def from_dict(cls, data: dict) -> "ReplacementLexicon":
        return cls(
            antonyms=dict(data.get("antonyms", {})),
            co_hyponyms={k: list(v) for k, v in data.get("co_hyponyms", {}).items()},
            name_pool=list(data.get("name_pool", [])),
        )


@dataclass
class GenerationConfig:
    seed: int = 0
    quantifiers: frozenset = QUANTIFIERS
    negations: frozenset = NEGATIONS


def _coordination_metadata(tokens, coord: CoordinationInstance, target: str) -> dict:
    _, offsets = detokenize_with_offsets(tokens)
    ls, le = coord.left_conjunct
    rs, re_ = coord.right_conjunct
    return {
        "target": target,
        "tokens": list(tokens),
        "conj_index": coord.conj_index,
        "left_tokens": [ls, le],
        "right_tokens": [rs, re_],
        "left_chars": [offsets[ls][0], offsets[le - 1][1]],
        "right_chars": [offsets[rs][0], offsets[re_ - 1][1]],
        "conj_chars": list(offsets[coord.conj_index]),
    }


def _pair_flags(coord: CoordinationInstance, features=None) -> dict:
    flags = {
        "negated": coord.negated,
        "in_named_entity": coord.in_named_entity,
        "ne_source": coord.ne_source,
    }
    if features is not None:
        flags.update({
            "conjunction_count": features.conjunction_count,
            "has_quantifier": features.has_quantifier,
            "has_negation": features.has_negation,
            "conjunction_types": sorted(features.conjunction_types),
        })
    return flags


def remove_conjunct(sentence: Sentence, coord: CoordinationInstance, side: str,
                    features=None) -> NliPair:
    """Delete one conjunct plus the conjunction; premise stays the original."""
    if side not in ("left", "right"):
        raise PairGenError(f"side must be 'left' or 'right', got {side!r}")
    span = coord.left_conjunct if side == "left" else coord.right_conjunct
    deleted = set(range(span[0], span[1])) | {coord.conj_index}
    kept = [(i, tok) for i, tok in enumerate(sentence.tokens) if i not in deleted]
    kept = _drop_dangling_commas(kept, deleted)
    if not kept:
        raise PairGenError("deletion would empty the sentence")
    premise, _ = detokenize_with_offsets(sentence.tokens)
    hypothesis, _ = detokenize_with_offsets([tok for _, tok in kept])
    return NliPair(
        premise=premise,
        hypothesis=hypothesis,
        operation=REMOVE,
        conj_word=coord.conj_word,
        side=side,
        source_id=sentence.source_id,
        flags=_pair_flags(coord, features),
        coordination=_coordination_metadata(sentence.tokens, coord, "premise"),
    )


def _drop_dangling_commas(kept, deleted):
    """Remove commas left dangling next to the deleted region.

    A kept comma adjacent to a deleted index is dropped when it would start
    the sentence, follow another comma, or directly precede final . ! ?.
    """
    changed = True
    while changed:
        changed = False
        for k, (i, tok) in enumerate(kept):
            if tok != ",":
                continue
            if (i - 1) not in deleted and (i + 1) not in deleted:
                continue
            at_start = k == 0
            after_comma = k > 0 and kept[k - 1][1] == ","
            before_terminal = (
                k + 1 < len(kept)
                and kept[k + 1][1] in _TERMINALS
                and k + 2 == len(kept)
            )
            if at_start or after_comma or before_terminal:
                deleted = deleted | {i}
                kept = kept[:k] + kept[k + 1:]
                changed = True
                break
    return kept


def add_conjunct(pair: NliPair) -> NliPair:
    """Invert a removal: the shortened sentence becomes the premise."""
    if pair.operation != REMOVE:
        raise PairGenError("add_conjunct requires a remove pair")
    out = pair.swapped()
    out.operation = ADD
    return out


def _increment_number(tok: str) -> str:
    value = int(tok.replace(",", "")) + 1
    if "," not in tok:
        return str(value)
    digits = str(value)
    groups = []
    while len(digits) > 3:
        groups.append(digits[-3:])
        digits = digits[:-3]
    groups.append(digits)
    return ",".join(reversed(groups))


def _is_person_name(sentence: Sentence, index: int, lexicon: ReplacementLexicon) -> bool:
    if sentence.ner is not None:
        tag = sentence.ner[index]
        if tag[2:] in ("PER", "PERSON") and tag[:2] in ("B-", "I-"):
            return True
    return sentence.tokens[index] in lexicon.name_pool


def replace_conjunct(sentence: Sentence, coord: CoordinationInstance,
                     lexicon: ReplacementLexicon, rng_seed: int | str,
                     features=None) -> NliPair:
    """Substitute one conjunct token: number+1, resampled name, antonym or co-hyponym.

    Kinds are tried in that priority order; within a kind, the left conjunct
    is scanned before the right, left to right.
    """
    rng = random.Random(f"{rng_seed}")
    candidates = [
        ("left", i) for i in range(*coord.left_conjunct)
    ] + [
        ("right", i) for i in range(*coord.right_conjunct)
    ]

    def pick():
        for side, i in candidates:
            if _NUMBER_RE.match(sentence.tokens[i]):
                return side, i, "number", _increment_number(sentence.tokens[i])
        for side, i in candidates:
            if _is_person_name(sentence, i, lexicon):
                pool = [n for n in lexicon.name_pool if n != sentence.tokens[i]]
                if not pool:
                    raise PairGenError("name_pool too small to resample a name")
                return side, i, "name", pool[rng.randrange(len(pool))]
        for side, i in candidates:
            sub = _lookup_antonym(sentence.tokens[i], lexicon.antonyms)
            if sub is not None:
                return side, i, "antonym", sub
        for side, i in candidates:
            tok = sentence.tokens[i]
            options = lexicon.co_hyponyms.get(tok) or lexicon.co_hyponyms.get(tok.lower())
            if options:
                options = [w for w in options if w != tok]
                if options:
                    return side, i, "co_hyponym", options[rng.randrange(len(options))]
        raise PairGenError("no-replacement: no replaceable token in either conjunct")

    side, index, kind, substitute = pick()
    tokens = list(sentence.tokens)
    tokens[index] = substitute
    premise, _ = detokenize_with_offsets(sentence.tokens)
    hypothesis, _ = detokenize_with_offsets(tokens)
    return NliPair(
        premise=premise,
        hypothesis=hypothesis,
        operation=REPLACE,
        conj_word=coord.conj_word,
        side=side,
        replacement_kind=kind,
        source_id=sentence.source_id,
        flags=_pair_flags(coord, features),
        coordination=_coordination_metadata(sentence.tokens, coord, "premise"),
    )


def _lookup_antonym(tok, antonyms):
    if tok in antonyms:
        return antonyms[tok]
    sub = antonyms.get(tok.lower())
    if sub is not None and tok[:1].isupper():
        return sub[:1].upper() + sub[1:]
    return sub


def either_or_probe(pair: NliPair) -> NliPair:
    """Rewrite an entailed "and"-removal premise as "either ... or ..." (label: neutral)."""
    if pair.operation != REMOVE:
        raise PairGenError("probe requires a remove pair")
    if pair.conj_word != "and":
        raise PairGenError("probe requires an 'and' coordination")
    if pair.label != "entailment":
        raise PairGenError("probe requires an entailment-labeled pair")
    coord = pair.coordination
    if not coord or coord["target"] != "premise":
        raise PairGenError("probe requires premise coordination metadata")
    tokens = list(coord["tokens"])
    left_start = coord["left_tokens"][0]
    conj_index = coord["conj_index"]
    tokens[conj_index] = "or"
    tokens.insert(left_start, "either")
    premise, offsets = detokenize_with_offsets(tokens)
    new_coord = {
        "target": "premise",
        "tokens": tokens,
        "conj_index": conj_index + 1,
        "left_tokens": [coord["left_tokens"][0] + 1, coord["left_tokens"][1] + 1],
        "right_tokens": [coord["right_tokens"][0] + 1, coord["right_tokens"][1] + 1],
    }
    lt, rt = new_coord["left_tokens"], new_coord["right_tokens"]
    new_coord["left_chars"] = [offsets[lt[0]][0], offsets[lt[1] - 1][1]]
    new_coord["right_chars"] = [offsets[rt[0]][0], offsets[rt[1] - 1][1]]
    new_coord["conj_chars"] = list(offsets[new_coord["conj_index"]])
    return dc_replace(
        pair,
        premise=premise,
        operation=EITHER_OR_PROBE,
        label="neutral",
        label_source="heuristic",
        coordination=new_coord,
    )


def generate_pairs(sentence: Sentence, tree: ParseNode,
                   lexicon: ReplacementLexicon | None = None,
                   config: GenerationConfig | None = None):
    """All remove/add/replace pairs for one sentence: (pairs, warnings)."""
    config = config or GenerationConfig()
    lexicon = lexicon or ReplacementLexicon()
    features = detect_features(sentence, config.quantifiers, config.negations)
    instances, warnings = find_coordinations(tree, sentence)
    pairs: list[NliPair] = []
    for inst in instances:
        rng_seed = f"{config.seed}:{sentence.source_id}:{inst.conj_index}"
        for side in ("left", "right"):
            try:
                removed = remove_conjunct(sentence, inst, side, features)
            except PairGenError as exc:
                warnings.append(_warning(sentence, inst, f"remove-{side}", exc))
                continue
            pairs.append(removed)
            pairs.append(add_conjunct(removed))
        try:
            pairs.append(replace_conjunct(sentence, inst, lexicon, rng_seed, features))
        except PairGenError as exc:
            warnings.append(_warning(sentence, inst, "replace", exc))
    for n, pair in enumerate(pairs):
        pair.pair_id = f"{sentence.source_id}#{n}"
    return pairs, warnings


def _warning(sentence, inst, operation, exc):
    return {
        "source_id": sentence.source_id,
        "conj_index": inst.conj_index,
        "conj_word": inst.conj_word,
        "operation": operation,
        "reason": str(exc),
    }


def build_probe_set(pairs, limit: int | None = None) -> list[NliPair]:
    """Either-or probe pairs from labeled "and" removals, in input order."""
    probes = []
    for pair in pairs:
        if pair.operation == REMOVE and pair.conj_word == "and" and pair.label == "entailment":
            try:
                probes.append(either_or_probe(pair))
            except PairGenError:
                continue
            if limit is not None and len(probes) >= limit:
                break
    return probes
