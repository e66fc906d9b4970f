"""Heuristic labeling of generated pairs and balanced training-set assembly.

The base rule is the boolean reading: removing a conjunct entails, adding
one is neutral, replacing one contradicts. On top of that sit three
non-boolean overrides, each individually switchable: coordinated named
entities are neutral under any edit, collective trigger words ("in total,
the flooding and landslides killed ...") turn an "and"-removal into a
contradiction, and negated "or" removals can be read through De Morgan.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .pairgen import ADD, EITHER_OR_PROBE, LABELS, NliPair, REMOVE, REPLACE
from .text import word_tokens

DEFAULT_TRIGGER_WORDS = frozenset({
    "total", "group", "combined", "sum", "overall", "altogether",
    "jointly", "collectively",
})

_BUCKETS = ("and", "or", "but")


@dataclass
class HeuristicConfig:
    trigger_words: frozenset = DEFAULT_TRIGGER_WORDS
    enable_named_entity_rule: bool = True
    enable_trigger_rule: bool = True
    enable_demorgan_rule: bool = False
    or_replace_label: str = "neutral"

    def __post_init__(self):
        if self.enable_trigger_rule and not self.trigger_words:
            raise ValueError("trigger rule enabled with an empty trigger lexicon")
        if self.or_replace_label not in ("neutral", "contradiction"):
            raise ValueError(f"bad or_replace_label {self.or_replace_label!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "HeuristicConfig":
        kwargs = dict(data)
        if "trigger_words" in kwargs:
            kwargs["trigger_words"] = frozenset(kwargs["trigger_words"])
        return cls(**kwargs)


def label_pair(pair: NliPair, config: HeuristicConfig | None = None) -> str:
    """First matching rule wins; see module docstring for the rule stack."""
    config = config or HeuristicConfig()
    if pair.operation == EITHER_OR_PROBE:
        return "neutral"
    if pair.operation not in (REMOVE, ADD, REPLACE):
        raise ValueError(f"unknown operation {pair.operation!r}")
    if config.enable_named_entity_rule and pair.flags.get("in_named_entity"):
        return "neutral"
    if (
        config.enable_trigger_rule
        and pair.conj_word == "and"
        and pair.operation == REMOVE
        and any(tok in config.trigger_words for tok in word_tokens(pair.premise))
    ):
        return "contradiction"
    if (
        config.enable_demorgan_rule
        and pair.flags.get("negated")
        and pair.conj_word in ("or", "nor")
        and pair.operation == REMOVE
    ):
        return "entailment"
    if pair.operation == REMOVE:
        return "entailment"
    if pair.operation == ADD:
        return "neutral"
    if pair.conj_word in ("or", "nor"):
        return config.or_replace_label
    return "contradiction"


def label_pairs(pairs, config: HeuristicConfig | None = None) -> list[NliPair]:
    """Label every unlabeled pair in place; already-labeled pairs are kept."""
    for pair in pairs:
        if pair.label is None:
            pair.label = label_pair(pair, config)
            pair.label_source = "heuristic"
    return list(pairs)


def conjunction_bucket(pair: NliPair) -> str:
    """Reporting bucket for a pair; "nor" counts under "or"."""
    return "or" if pair.conj_word == "nor" else pair.conj_word


def build_adversarial_set(pairs, target_size: int, seed: int = 0,
                          config: HeuristicConfig | None = None):
    """Sample target_size/3 labeled pairs per and/or/but bucket.

    Per-bucket order is a seed-deterministic permutation, so smaller targets
    under the same seed are prefixes of larger ones. Returns (sample, report);
    the label distribution is reported, never rebalanced.
    """
    if target_size <= 0 or target_size % 3:
        raise ValueError("target_size must be a positive multiple of 3")
    per_bucket = target_size // 3
    buckets: dict[str, list[NliPair]] = {b: [] for b in _BUCKETS}
    for pair in pairs:
        if pair.label is None:
            continue
        buckets[conjunction_bucket(pair)].append(pair)
    sample: list[NliPair] = []
    report = {"target_size": target_size, "per_bucket": per_bucket,
              "bucket_sizes": {}, "label_by_conjunction": {}}
    for bucket in _BUCKETS:
        pool = list(buckets[bucket])
        report["bucket_sizes"][bucket] = len(pool)
        if len(pool) < per_bucket:
            raise ValueError(
                f"bucket {bucket!r} has {len(pool)} labeled pairs, "
                f"short {per_bucket - len(pool)} of the requested {per_bucket}"
            )
        random.Random(f"{seed}:{bucket}").shuffle(pool)
        chosen = pool[:per_bucket]
        sample.extend(chosen)
        counts = {label: 0 for label in LABELS}
        for pair in chosen:
            counts[pair.label] += 1
        report["label_by_conjunction"][bucket] = counts
    return sample, report
