"""Iterative adversarial fine-tuning over a pluggable classifier contract.

The schedule mixes a constant adversarial set with a fresh, equally sized
sample of base training data every epoch. A hashed-feature multinomial
classifier is bundled so the schedule can be exercised at desk scale.
"""
from __future__ import annotations

import hashlib
import json
import random
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np

from .pairgen import LABELS
from .text import CONJUNCTIONS, word_tokens


@dataclass(frozen=True)
class Example:
    premise: str
    hypothesis: str
    label: str

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r}")


def load_examples(path) -> list[Example]:
    examples = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        rec = json.loads(line)
        examples.append(Example(rec["premise"], rec["hypothesis"], rec["label"]))
    return examples


def save_examples(examples, path) -> None:
    lines = [
        json.dumps({"premise": e.premise, "hypothesis": e.hypothesis, "label": e.label})
        for e in examples
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


class ClassifierContract(Protocol):
    def fit_batch(self, examples: list[Example]) -> None: ...
    def predict(self, example: Example) -> str: ...
    def snapshot(self) -> bytes: ...
    def restore(self, state: bytes) -> None: ...


@dataclass
class ToyClassifierConfig:
    n_features: int = 1 << 16
    learning_rate: float = 0.1
    epochs: int = 3  # used by standalone fit(); the schedules drive their own passes


class HashedLinearClassifier:
    """Multinomial logistic regression over hashed sparse text features.

    Features: premise-/hypothesis-prefixed unigrams and bigrams, conjunction
    indicators for both sides, a bucketed token-overlap ratio, and the sign
    of the hypothesis-minus-premise length difference.
    """

    def __init__(self, config: ToyClassifierConfig | None = None):
        self.config = config or ToyClassifierConfig()
        n = self.config.n_features
        self.weights = np.zeros((len(LABELS), n))
        self.bias = np.zeros(len(LABELS))

    def _features(self, example: Example) -> dict[int, float]:
        p = word_tokens(example.premise)
        h = word_tokens(example.hypothesis)
        feats: dict[str, float] = {"BIAS": 1.0}
        for prefix, toks in (("P", p), ("H", h)):
            for tok in toks:
                key = f"{prefix}:{tok}"
                feats[key] = feats.get(key, 0.0) + 1.0
            for a, b in zip(toks, toks[1:]):
                key = f"{prefix}:{a}_{b}"
                feats[key] = feats.get(key, 0.0) + 1.0
            for conj in CONJUNCTIONS:
                if conj in toks:
                    feats[f"{prefix}C:{conj}"] = 1.0
        overlap = len(set(h) & set(p)) / max(1, len(set(h)))
        feats[f"OV:{min(4, int(overlap * 5))}"] = 1.0
        diff = len(h) - len(p)
        feats[f"LEN:{'+' if diff > 0 else '-' if diff < 0 else '0'}"] = 1.0
        n = self.config.n_features
        hashed: dict[int, float] = {}
        for key, value in feats.items():
            slot = zlib.crc32(key.encode("utf-8")) % n
            hashed[slot] = hashed.get(slot, 0.0) + value
        return hashed

    def _scores(self, feats: dict[int, float]) -> np.ndarray:
        idx = np.fromiter(feats.keys(), dtype=int)
        val = np.fromiter(feats.values(), dtype=float)
        return self.weights[:, idx] @ val + self.bias

    def fit_batch(self, examples) -> None:
        lr = self.config.learning_rate
        for ex in examples:
            feats = self._features(ex)
            scores = self._scores(feats)
            scores -= scores.max()
            probs = np.exp(scores)
            probs /= probs.sum()
            probs[LABELS.index(ex.label)] -= 1.0
            idx = np.fromiter(feats.keys(), dtype=int)
            val = np.fromiter(feats.values(), dtype=float)
            self.weights[:, idx] -= lr * np.outer(probs, val)
            self.bias -= lr * probs

    def fit(self, examples, epochs: int | None = None, seed: int = 0) -> "HashedLinearClassifier":
        epochs = self.config.epochs if epochs is None else epochs
        pool = list(examples)
        for epoch in range(epochs):
            random.Random(f"{seed}:{epoch}").shuffle(pool)
            self.fit_batch(pool)
        return self

    def predict(self, example: Example) -> str:
        scores = self._scores(self._features(example))
        return LABELS[int(np.argmax(scores))]

    def snapshot(self) -> bytes:
        meta = json.dumps({
            "n_features": self.config.n_features,
            "learning_rate": self.config.learning_rate,
            "epochs": self.config.epochs,
        }).encode("utf-8")
        return (
            len(meta).to_bytes(4, "big") + meta
            + self.weights.tobytes() + self.bias.tobytes()
        )

    def restore(self, state: bytes) -> None:
        meta_len = int.from_bytes(state[:4], "big")
        cfg = json.loads(state[4:4 + meta_len].decode("utf-8"))
        self.config = ToyClassifierConfig(**cfg)
        body = state[4 + meta_len:]
        w_size = len(LABELS) * self.config.n_features * 8
        self.weights = np.frombuffer(body[:w_size], dtype=float).reshape(
            len(LABELS), self.config.n_features).copy()
        self.bias = np.frombuffer(body[w_size:], dtype=float).copy()


def toy_classifier(config: ToyClassifierConfig | None = None) -> HashedLinearClassifier:
    return HashedLinearClassifier(config)


def accuracy(model, examples) -> float:
    if not examples:
        raise ValueError("empty evaluation set")
    return sum(model.predict(ex) == ex.label for ex in examples) / len(examples)


def has_conjunction(example: Example) -> bool:
    toks = word_tokens(example.premise) + word_tokens(example.hypothesis)
    return any(t in CONJUNCTIONS for t in toks)


def strip_premises(examples) -> list[Example]:
    """Blank every premise, for hypothesis-only leakage probes."""
    return [Example("", ex.hypothesis, ex.label) for ex in examples]


def fingerprint(examples) -> str:
    digest = hashlib.sha256()
    for ex in examples:
        digest.update(f"{ex.premise}\t{ex.hypothesis}\t{ex.label}\n".encode("utf-8"))
    return digest.hexdigest()


@dataclass
class TrainSchedule:
    num_epochs: int
    seed: int = 0
    conjunction_filter: bool = True
    k: int | None = None  # filled in from len(adv_train) at run time

    def __post_init__(self):
        if self.num_epochs < 0:
            raise ValueError("num_epochs must be non-negative")


def iaft_train(model, base_train, adv_train, schedule: TrainSchedule,
               eval_sets: dict | None = None):
    """Iterative adversarial fine-tuning; returns (model, run log).

    ``model`` must already be fitted on the base data. Every epoch unions the
    constant adversarial set with a fresh without-replacement sample of k
    base examples (k = len(adv_train)), shuffles, and fits one pass.
    """
    adv_train = list(adv_train)
    if not adv_train:
        raise ValueError("adversarial training set is empty")
    k = len(adv_train)
    if schedule.k is not None and schedule.k != k:
        raise ValueError(f"schedule.k={schedule.k} but len(adv_train)={k}")
    base_pool = list(base_train)
    if schedule.conjunction_filter:
        base_pool = [ex for ex in base_pool if has_conjunction(ex)]
    if k > len(base_pool):
        raise ValueError(
            f"adversarial set size {k} exceeds the {len(base_pool)} "
            "conjunction-bearing base examples available for sampling"
        )
    log = {
        "k": k,
        "seed": schedule.seed,
        "num_epochs": schedule.num_epochs,
        "conjunction_filter": schedule.conjunction_filter,
        "conjunction_filter_rule": "premise or hypothesis contains and/or/but/nor",
        "sampling": "without replacement within an epoch, independent across epochs",
        "base_pool_size": len(base_pool),
        "adv_fingerprint": fingerprint(adv_train),
        "epochs": [],
    }
    for epoch in range(1, schedule.num_epochs + 1):
        rng = random.Random(f"{schedule.seed}:{epoch}")
        sample = rng.sample(base_pool, k)
        pool = adv_train + sample
        rng.shuffle(pool)
        model.fit_batch(pool)
        entry = {
            "epoch": epoch,
            "pool_size": len(pool),
            "adv_fingerprint": log["adv_fingerprint"],
            "sample_fingerprint": fingerprint(sample),
        }
        if eval_sets:
            entry["metrics"] = {
                name: accuracy(model, data) for name, data in eval_sets.items()
            }
        log["epochs"].append(entry)
    return model, log


def aft_train(model, adv_train, epochs: int, seed: int = 0):
    """Plain sequential fine-tuning on the adversarial set alone."""
    adv_train = list(adv_train)
    if not adv_train:
        raise ValueError("adversarial training set is empty")
    if epochs < 0:
        raise ValueError("epochs must be non-negative")
    for epoch in range(epochs):
        pool = list(adv_train)
        random.Random(f"{seed}:{epoch}").shuffle(pool)
        model.fit_batch(pool)
    return model


def hypothesis_only_train(model, train, epochs: int = 3, seed: int = 0):
    """Fit with premises blanked, to measure label leakage from hypotheses."""
    blanked = strip_premises(train)
    if not blanked:
        raise ValueError("empty training set")
    for epoch in range(epochs):
        pool = list(blanked)
        random.Random(f"{seed}:{epoch}").shuffle(pool)
        model.fit_batch(pool)
    return model
