#!/usr/bin/env python3
"""Seed-instability decomposition demo.

Trains the toy classifier under several seeds on the same generated data,
builds the seeds x examples correctness matrix, and prints the variance
decomposition (total / independent / inter-example covariance).

Usage: python3 scripts/instability_demo.py [n_seeds]
"""
from __future__ import annotations

import random
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from coordnli.evalkit import instability_stats  # noqa: E402
from coordnli.training import Example, ToyClassifierConfig, toy_classifier  # noqa: E402

KEYWORDS = ["alpha", "beta", "gamma"]
LABELS = ["entailment", "neutral", "contradiction"]


def make_example(rng, j, noise=0.25):
    kw = rng.choice(KEYWORDS)
    label = LABELS[KEYWORDS.index(kw)]
    if rng.random() < noise:
        label = rng.choice(LABELS)
    return Example(f"the {kw} marker and flag {j}", f"the {kw} holds {j}", label)


def main():
    n_seeds = int(sys.argv[1]) if len(sys.argv) > 1 else 10
    data_rng = random.Random(0)
    train = [make_example(data_rng, j) for j in range(400)]
    test = [make_example(data_rng, 10_000 + j) for j in range(300)]

    correctness = np.zeros((n_seeds, len(test)))
    for s in range(n_seeds):
        model = toy_classifier(ToyClassifierConfig(n_features=1 << 15))
        shuffled = list(train)
        random.Random(s).shuffle(shuffled)
        model.fit(shuffled, epochs=2, seed=s)
        for e, example in enumerate(test):
            correctness[s, e] = model.predict(example) == example.label

    stats = instability_stats(correctness)
    print(f"seeds={n_seeds} examples={len(test)}")
    print(f"mean accuracy      : {stats['mean_acc']:.4f}")
    print(f"total std          : {stats['total_std']:.4f}")
    print(f"independent std    : {stats['independent_std']:.4f}")
    print(f"covariance term    : {stats['covariance_term']:+.6f} (variance scale)")
    identity = stats["total_var"] - stats["independent_var"] - stats["covariance_term"]
    print(f"decomposition check: total - independent - covariance = {identity:.2e}")


if __name__ == "__main__":
    main()
