"""Dataset I/O, accuracy breakdowns, Cohen's kappa and the seed-instability
decomposition."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .coordination import detect_features
from .pairgen import LABELS, NliPair
from .text import CONJUNCTIONS, NEGATIONS, QUANTIFIERS, word_tokens

BUCKET_NAMES = ("and", "or", "but", "multiple", "quantifier", "negation",
                "boolean", "non_boolean")


class DatasetError(ValueError):
    pass


@dataclass
class LabeledDataset:
    pairs: list[NliPair]
    split: str = "test"

    def __post_init__(self):
        ids = [p.pair_id for p in self.pairs]
        if any(i is None for i in ids):
            raise DatasetError("every pair in a dataset needs an id")
        if len(set(ids)) != len(ids):
            raise DatasetError("pair ids must be unique")
        for p in self.pairs:
            if p.label is None:
                raise DatasetError(f"pair {p.pair_id} is unlabeled")

    def __len__(self) -> int:
        return len(self.pairs)

    def label_counts(self) -> dict[str, int]:
        counts = {label: 0 for label in LABELS}
        for p in self.pairs:
            counts[p.label] += 1
        return counts


def load_dataset(path, split: str = "test") -> LabeledDataset:
    """Read a JSONL dataset, or premise/hypothesis/label TSV for interoperability."""
    path = Path(path)
    pairs: list[NliPair] = []
    if path.suffix == ".tsv":
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise DatasetError(f"{path.name} line {lineno}: expected 3 tab-separated columns")
            premise, hypothesis, label = cols
            if label not in LABELS:
                raise DatasetError(f"{path.name} line {lineno}: unknown label {label!r}")
            pairs.append(NliPair(
                premise=premise, hypothesis=hypothesis, operation="remove",
                conj_word="and", label=label, label_source="human",
                pair_id=str(lineno),
            ))
        return LabeledDataset(pairs, split=split)
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            pairs.append(NliPair.from_record(rec))
        except (ValueError, KeyError) as exc:
            raise DatasetError(f"{path.name} line {lineno}: {exc}") from exc
    return LabeledDataset(pairs, split=split)


def save_dataset(dataset: LabeledDataset, path) -> None:
    lines = [json.dumps(p.to_record(), ensure_ascii=False) for p in dataset.pairs]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_predictions(path) -> dict[str, str]:
    preds = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            preds[str(rec["id"])] = rec["label"]
        except (ValueError, KeyError) as exc:
            raise DatasetError(f"line {lineno}: {exc}") from exc
    return preds


@dataclass
class BucketStat:
    size: int
    correct: int

    @property
    def accuracy(self) -> float | None:
        return None if self.size == 0 else self.correct / self.size


@dataclass
class EvalReport:
    n: int
    overall_accuracy: float
    confusion: list[list[int]]  # rows gold, cols predicted, label order LABELS
    buckets: dict[str, BucketStat] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "overall_accuracy": self.overall_accuracy,
            "labels": list(LABELS),
            "confusion": self.confusion,
            "buckets": {
                name: {"size": b.size, "correct": b.correct, "accuracy": b.accuracy}
                for name, b in self.buckets.items()
            },
        }

    def to_markdown(self) -> str:
        lines = [
            f"overall accuracy: {self.overall_accuracy:.4f} (n={self.n})",
            "",
            "| bucket | size | accuracy |",
            "|---|---:|---:|",
        ]
        for name in BUCKET_NAMES:
            stat = self.buckets[name]
            acc = "-" if stat.accuracy is None else f"{stat.accuracy:.4f}"
            lines.append(f"| {name} | {stat.size} | {acc} |")
        lines += ["", "confusion (rows gold / cols predicted):",
                  "| | " + " | ".join(LABELS) + " |",
                  "|---|" + "---|" * len(LABELS)]
        for label, row in zip(LABELS, self.confusion):
            lines.append(f"| {label} | " + " | ".join(str(v) for v in row) + " |")
        return "\n".join(lines) + "\n"


def pair_buckets(pair: NliPair, quantifiers=QUANTIFIERS, negations=NEGATIONS) -> set[str]:
    """Overlapping analysis buckets, a pure function of premise text and annotations."""
    tokens = word_tokens(pair.premise)
    buckets = set()
    if "and" in tokens:
        buckets.add("and")
    if "or" in tokens or "nor" in tokens:
        buckets.add("or")
    if "but" in tokens:
        buckets.add("but")
    if sum(1 for t in tokens if t in CONJUNCTIONS) >= 2:
        buckets.add("multiple")
    features = detect_features(tokens, quantifiers, negations)
    if features.has_quantifier:
        buckets.add("quantifier")
    if features.has_negation:
        buckets.add("negation")
    if pair.boolean is True:
        buckets.add("boolean")
    elif pair.boolean is False:
        buckets.add("non_boolean")
    return buckets


def evaluate(predictions: dict[str, str], gold: LabeledDataset,
             quantifiers=QUANTIFIERS, negations=NEGATIONS) -> EvalReport:
    """Accuracy, 3x3 confusion and per-bucket breakdowns over a gold dataset."""
    gold_ids = {p.pair_id for p in gold.pairs}
    missing = gold_ids - set(predictions)
    if missing:
        raise DatasetError(f"missing predictions for {len(missing)} ids, e.g. {sorted(missing)[:3]}")
    unknown = set(predictions) - gold_ids
    if unknown:
        raise DatasetError(f"predictions for unknown ids, e.g. {sorted(unknown)[:3]}")
    index = {label: i for i, label in enumerate(LABELS)}
    confusion = [[0] * len(LABELS) for _ in LABELS]
    bucket_stats = {name: BucketStat(0, 0) for name in BUCKET_NAMES}
    correct_total = 0
    for pair in gold.pairs:
        pred = predictions[pair.pair_id]
        if pred not in index:
            raise DatasetError(f"unknown predicted label {pred!r} for id {pair.pair_id}")
        confusion[index[pair.label]][index[pred]] += 1
        hit = pred == pair.label
        correct_total += hit
        for name in pair_buckets(pair, quantifiers, negations):
            stat = bucket_stats[name]
            stat.size += 1
            stat.correct += hit
    return EvalReport(
        n=len(gold.pairs),
        overall_accuracy=correct_total / len(gold.pairs),
        confusion=confusion,
        buckets=bucket_stats,
    )


def cohen_kappa(labels_a, labels_b) -> float:
    """Chance-corrected agreement between two aligned label sequences."""
    labels_a, labels_b = list(labels_a), list(labels_b)
    if not labels_a:
        raise ValueError("empty label lists")
    if len(labels_a) != len(labels_b):
        raise ValueError(f"length mismatch: {len(labels_a)} vs {len(labels_b)}")
    n = len(labels_a)
    observed = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    classes = set(labels_a) | set(labels_b)
    expected = sum(
        (labels_a.count(c) / n) * (labels_b.count(c) / n) for c in classes
    )
    if expected == 1.0:
        return 1.0
    return (observed - expected) / (1.0 - expected)


def instability_stats(correctness) -> dict[str, float]:
    """Decompose across-seed accuracy variance into independent and covariance parts.

    ``correctness`` is a seeds x examples 0/1 matrix. Per-seed accuracy is the
    row mean; its variance over seeds splits into the mean per-example
    variance (scaled 1/E^2) plus the summed inter-example covariance, which is
    reported signed and un-rooted.
    """
    mat = np.asarray(correctness, dtype=float)
    if mat.ndim != 2 or mat.shape[0] < 2 or mat.shape[1] < 2:
        raise ValueError("need at least 2 seeds and 2 examples")
    n_seeds, n_examples = mat.shape
    per_seed_acc = mat.mean(axis=1)
    total_var = float(per_seed_acc.var())
    col_var = mat.var(axis=0)
    independent_var = float(col_var.sum()) / n_examples**2
    centered = mat - mat.mean(axis=0, keepdims=True)
    cov = centered.T @ centered / n_seeds
    covariance_term = float(cov.sum() - np.trace(cov)) / n_examples**2
    return {
        "mean_acc": float(per_seed_acc.mean()),
        "total_std": total_var ** 0.5,
        "independent_std": independent_var ** 0.5,
        "covariance_term": covariance_term,
        "total_var": total_var,
        "independent_var": independent_var,
    }
