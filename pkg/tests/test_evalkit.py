import numpy as np
import pytest

from coordnli.evalkit import (
    DatasetError,
    LabeledDataset,
    cohen_kappa,
    evaluate,
    instability_stats,
    load_dataset,
    save_dataset,
)
from coordnli.pairgen import NliPair

from .conftest import DATA

# 20-item agreement fixture; expected kappa frozen from an independent
# confusion-matrix calculation (p_o=0.75, p_e=0.3525)
KAPPA_A = ["entailment", "neutral", "neutral", "contradiction", "entailment",
           "entailment", "neutral", "contradiction", "neutral", "entailment",
           "neutral", "neutral", "entailment", "contradiction", "neutral",
           "entailment", "neutral", "entailment", "contradiction", "neutral"]
KAPPA_B = ["entailment", "neutral", "contradiction", "contradiction", "entailment",
           "neutral", "neutral", "contradiction", "neutral", "entailment",
           "neutral", "entailment", "entailment", "neutral", "neutral",
           "entailment", "contradiction", "entailment", "contradiction", "neutral"]
KAPPA_EXPECTED = 0.613899613899614


def _tiny_dataset():
    pairs = [
        NliPair(premise="A and B hold .", hypothesis="A holds .", operation="remove",
                conj_word="and", label="entailment", label_source="heuristic",
                pair_id="p0", boolean=True),
        NliPair(premise="A or B holds .", hypothesis="A and B and C hold .",
                operation="add", conj_word="or", label="neutral",
                label_source="heuristic", pair_id="p1", boolean=False),
        NliPair(premise="every A but not B came .", hypothesis="B came .",
                operation="remove", conj_word="but", label="contradiction",
                label_source="heuristic", pair_id="p2"),
    ]
    return LabeledDataset(pairs, split="dev")


def test_evaluate_perfect_predictions():
    gold = _tiny_dataset()
    preds = {p.pair_id: p.label for p in gold.pairs}
    report = evaluate(preds, gold)
    assert report.overall_accuracy == 1.0
    for stat in report.buckets.values():
        assert stat.accuracy in (None, 1.0)
    assert sum(report.confusion[i][i] for i in range(3)) == report.n


def test_evaluate_bucket_membership():
    gold = _tiny_dataset()
    preds = {p.pair_id: p.label for p in gold.pairs}
    report = evaluate(preds, gold)
    assert report.buckets["and"].size == 1  # premise text only; p1's "and" is in the hypothesis
    assert report.buckets["or"].size == 1
    assert report.buckets["but"].size == 1
    assert report.buckets["multiple"].size == 0
    assert report.buckets["quantifier"].size == 1  # "every"
    assert report.buckets["negation"].size == 1  # "not"
    assert report.buckets["boolean"].size == 1
    assert report.buckets["non_boolean"].size == 1


def test_evaluate_confusion_row_sums_match_gold():
    gold = _tiny_dataset()
    preds = {"p0": "neutral", "p1": "neutral", "p2": "entailment"}
    report = evaluate(preds, gold)
    assert [sum(row) for row in report.confusion] == [1, 1, 1]
    assert report.overall_accuracy == pytest.approx(1 / 3)


def test_evaluate_missing_and_unknown_ids():
    gold = _tiny_dataset()
    with pytest.raises(DatasetError, match="missing"):
        evaluate({"p0": "entailment"}, gold)
    preds = {p.pair_id: p.label for p in gold.pairs}
    preds["ghost"] = "neutral"
    with pytest.raises(DatasetError, match="unknown"):
        evaluate(preds, gold)


def test_conj_test_fixture_reproduces_reported_statistics():
    gold = load_dataset(DATA / "conj_test.jsonl")
    assert len(gold) == 1000
    assert gold.label_counts() == {
        "entailment": 332, "neutral": 467, "contradiction": 201}
    preds = {p.pair_id: p.label for p in gold.pairs}
    report = evaluate(preds, gold)
    sizes = {name: report.buckets[name].size
             for name in ("and", "or", "but", "multiple", "quantifier", "negation")}
    assert sizes == {"and": 537, "or": 471, "but": 135,
                     "multiple": 229, "quantifier": 175, "negation": 101}


def test_majority_neutral_predictor_on_conj_test():
    gold = load_dataset(DATA / "conj_test.jsonl")
    preds = {p.pair_id: "neutral" for p in gold.pairs}
    report = evaluate(preds, gold)
    assert report.overall_accuracy == pytest.approx(0.467)


def test_dev_fixture_label_counts():
    gold = load_dataset(DATA / "conj_dev.jsonl", split="dev")
    assert len(gold) == 623
    assert gold.label_counts() == {
        "entailment": 204, "neutral": 281, "contradiction": 138}


def test_kappa_identity():
    labels = ["entailment", "neutral", "entailment", "contradiction"]
    assert cohen_kappa(labels, labels) == 1.0


def test_kappa_independence_case():
    a = ["entailment", "entailment", "neutral", "neutral"]
    b = ["entailment", "neutral", "entailment", "neutral"]
    assert cohen_kappa(a, b) == pytest.approx(0.0)


def test_kappa_20_item_oracle():
    assert cohen_kappa(KAPPA_A, KAPPA_B) == pytest.approx(KAPPA_EXPECTED, abs=1e-9)


def test_kappa_symmetry():
    assert cohen_kappa(KAPPA_A, KAPPA_B) == pytest.approx(cohen_kappa(KAPPA_B, KAPPA_A))


def test_kappa_errors():
    with pytest.raises(ValueError):
        cohen_kappa([], [])
    with pytest.raises(ValueError):
        cohen_kappa(["entailment"], ["entailment", "neutral"])


def test_instability_constant_matrix():
    stats = instability_stats(np.ones((4, 6)))
    assert stats["total_std"] == 0.0
    assert stats["independent_std"] == 0.0
    assert stats["covariance_term"] == pytest.approx(0.0, abs=1e-12)


def test_instability_decomposition_identity():
    rng = np.random.default_rng(5)
    for _ in range(50):
        mat = rng.integers(0, 2, size=(rng.integers(2, 9), rng.integers(2, 30)))
        stats = instability_stats(mat)
        assert stats["total_var"] == pytest.approx(
            stats["independent_var"] + stats["covariance_term"], abs=1e-12)


def test_instability_independent_columns_covariance_near_zero():
    rng = np.random.default_rng(17)
    terms = []
    for _ in range(1000):
        mat = rng.integers(0, 2, size=(8, 40))
        terms.append(instability_stats(mat)["covariance_term"])
    terms = np.asarray(terms)
    stderr = terms.std(ddof=1) / np.sqrt(len(terms))
    assert abs(terms.mean()) <= 3 * stderr


def test_instability_column_permutation_invariance():
    rng = np.random.default_rng(3)
    mat = rng.integers(0, 2, size=(5, 20))
    base = instability_stats(mat)
    permuted = instability_stats(mat[:, rng.permutation(20)])
    for key in base:
        assert base[key] == pytest.approx(permuted[key], abs=1e-12)


def test_instability_requires_two_by_two():
    with pytest.raises(ValueError):
        instability_stats(np.ones((1, 5)))
    with pytest.raises(ValueError):
        instability_stats(np.ones((5, 1)))


def test_save_load_identity(tmp_path):
    gold = _tiny_dataset()
    path = tmp_path / "out.jsonl"
    save_dataset(gold, path)
    loaded = load_dataset(path, split="dev")
    assert loaded.pairs == gold.pairs
    # byte-stable on a second round trip
    save_dataset(loaded, tmp_path / "again.jsonl")
    assert (tmp_path / "again.jsonl").read_bytes() == path.read_bytes()


def test_malformed_line_names_line_number(tmp_path):
    path = tmp_path / "bad.jsonl"
    rows = ['{"id": "a", "premise": "p %d", "hypothesis": "h", "label": "neutral", '
            '"label_source": "human", "operation": "remove", "conj_word": "and"}' % i
            for i in range(6)]
    rows.append("{ this is not json")
    path.write_text("\n".join(rows) + "\n")
    with pytest.raises(DatasetError, match="line 7"):
        load_dataset(path)


def test_tsv_interoperability(tmp_path):
    path = tmp_path / "released.tsv"
    path.write_text(
        "A and B hold .\tA holds .\tentailment\n"
        "A holds .\tA and B hold .\tneutral\n"
    )
    gold = load_dataset(path)
    assert len(gold) == 2
    assert gold.pairs[0].label == "entailment"
    assert gold.pairs[1].pair_id == "2"


def test_duplicate_ids_rejected():
    pair = _tiny_dataset().pairs[0]
    import dataclasses
    dup = dataclasses.replace(pair)
    with pytest.raises(DatasetError, match="unique"):
        LabeledDataset([pair, dup])
