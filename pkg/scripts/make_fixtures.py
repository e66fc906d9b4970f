#!/usr/bin/env python3
"""Regenerate the bundled dev/test dataset fixtures.

The two JSONL files are synthetic but engineered so their bucket statistics
(and/or/but/multiple/quantifier/negation) and label counts match the
published split statistics the evaluation harness is checked against:

    test: buckets 537/471/135/229/175/101, labels 332/467/201 over 1000
    dev:  buckets 320/293/99/152/131/70,   labels 204/281/138 over 623

Deterministic; run from the repo root: python3 scripts/make_fixtures.py
"""
from __future__ import annotations

import json
import random
from pathlib import Path

NOUNS = [
    "engineer", "violinist", "gardener", "curator", "pilot", "sculptor",
    "chemist", "novelist", "dancer", "referee", "farmer", "singer",
    "teacher", "student", "painter", "archer", "baker", "clerk", "judge",
    "mayor", "sailor", "tailor", "weaver", "scholar", "ranger", "actor",
]
OBJECTS = [
    "bridge", "sonata", "orchard", "gallery", "glider", "statue",
    "reagent", "drama", "waltz", "harvest", "anthem", "lesson", "thesis",
    "mural", "arrow", "loaf", "ledger", "verdict", "parade", "voyage",
    "tapestry", "treatise", "trail", "scene", "ballad", "tunnel",
]
VERBS = [
    "admired", "repaired", "praised", "sketched", "visited", "measured",
    "described", "ignored", "studied", "finished", "observed", "painted",
    "carried", "weighed", "opened", "closed", "sold", "bought", "moved",
    "cleaned",
]

# (profile, count): profiles are the conjunction tokens a premise contains.
TEST_PROFILES = [
    (("and",), 331), (("or",), 348), (("but",), 92),
    (("and", "and"), 86), (("and", "or"), 100), (("and", "but"), 20),
    (("or", "but"), 23),
]
DEV_PROFILES = [
    (("and",), 187), (("or",), 214), (("but",), 70),
    (("and", "and"), 63), (("and", "or"), 60), (("and", "but"), 10),
    (("or", "but"), 19),
]

TEST_LABELS = [("entailment", 332), ("neutral", 467), ("contradiction", 201)]
DEV_LABELS = [("entailment", 204), ("neutral", 281), ("contradiction", 138)]


def clause(rng):
    return f"the {rng.choice(NOUNS)} {rng.choice(VERBS)} the {rng.choice(OBJECTS)}"


def build_split(name, profiles, labels, n_quant, n_neg, seed):
    rng = random.Random(seed)
    profile_list = [p for p, count in profiles for _ in range(count)]
    label_list = [lab for lab, count in labels for _ in range(count)]
    total = len(profile_list)
    assert total == len(label_list)
    rng.shuffle(profile_list)
    rng.shuffle(label_list)
    quant_rows = set(rng.sample(range(total), n_quant))
    neg_rows = set(rng.sample(range(total), n_neg))
    records = []
    for i in range(total):
        profile = profile_list[i]
        clauses = [clause(rng) for _ in range(len(profile) + 1)]
        if i in quant_rows:
            clauses[0] = "every" + clauses[0][len("the"):]
        if i in neg_rows:
            head, _, tail = clauses[0].partition(" ")
            first, _, rest = tail.partition(" ")
            clauses[0] = f"{head} {first} never {rest}"
        premise = clauses[0]
        for conj, extra in zip(profile, clauses[1:]):
            premise += f" {conj} {extra}"
        premise += " ."
        hypothesis = clause(rng) + " ."
        rec = {
            "id": f"{name}-{i:04d}",
            "premise": premise,
            "hypothesis": hypothesis,
            "operation": "remove",
            "conj_word": profile[0],
            "side": "right",
            "replacement_kind": None,
            "label": label_list[i],
            "label_source": "human",
            "source_id": f"{name}-src-{i:04d}",
            "flags": {},
        }
        if i % 7 == 0:
            rec["boolean"] = True
        elif i % 7 == 3:
            rec["boolean"] = False
        records.append(rec)
    return records


def main():
    out_dir = Path(__file__).resolve().parents[1] / "tests" / "data"
    out_dir.mkdir(parents=True, exist_ok=True)
    splits = {
        "conj_test.jsonl": build_split("test", TEST_PROFILES, TEST_LABELS, 175, 101, "fixtures:test"),
        "conj_dev.jsonl": build_split("dev", DEV_PROFILES, DEV_LABELS, 131, 70, "fixtures:dev"),
    }
    for filename, records in splits.items():
        path = out_dir / filename
        with open(path, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
        print(f"wrote {len(records)} records -> {path}")


if __name__ == "__main__":
    main()
