import json

import numpy as np

from coordnli.cli import main
from coordnli.srl import TagLattice

from .conftest import DATA


def _read_jsonl(path):
    return [json.loads(l) for l in path.read_text().splitlines() if l.strip()]


def test_extract_generate_label_build_adv(tmp_path, capsys):
    pairs_path = tmp_path / "pairs.jsonl"
    labeled_path = tmp_path / "labeled.jsonl"
    extracted = tmp_path / "coords.jsonl"

    assert main(["extract", "--trees", str(DATA / "table1.trees"),
                 "--out", str(extracted)]) == 0
    records = _read_jsonl(extracted)
    assert any(rec["conj_word"] == "and" for rec in records)
    assert all("sentence" in rec for rec in records)

    assert main(["generate", "--trees", str(DATA / "table1.trees"),
                 "--lexicon", str(DATA / "lexicon.json"),
                 "--seed", "3", "--out", str(pairs_path)]) == 0
    first = pairs_path.read_bytes()
    assert main(["generate", "--trees", str(DATA / "table1.trees"),
                 "--lexicon", str(DATA / "lexicon.json"),
                 "--seed", "3", "--out", str(pairs_path)]) == 0
    assert pairs_path.read_bytes() == first  # same seed, byte-identical file

    assert main(["label", "--pairs", str(pairs_path), "--out", str(labeled_path)]) == 0
    labeled = _read_jsonl(labeled_path)
    assert all(rec["label"] for rec in labeled)

    adv_path = tmp_path / "adv.jsonl"
    assert main(["build-adv", "--pairs", str(labeled_path), "--size", "9",
                 "--seed", "1", "--out", str(adv_path),
                 "--report", str(tmp_path / "report.json")]) == 0
    assert len(_read_jsonl(adv_path)) == 9


def test_srl_decode_cli(tmp_path):
    lattice = TagLattice(
        pieces=("play", "##ing", "hard"), tagset=("O", "B-A", "I-A"),
        scores=np.array([[0.0, 2.0, 0.0], [0.0, 0.0, 2.0], [1.0, 0.0, 0.0]]),
        wordpiece_map=((0, 2), (2, 3)))
    src = tmp_path / "lattices.jsonl"
    src.write_text(json.dumps(lattice.to_record()) + "\n")
    out = tmp_path / "decoded.jsonl"
    assert main(["srl-decode", "--lattices", str(src), "--out", str(out)]) == 0
    rec = _read_jsonl(out)[0]
    assert rec["tags"] == ["B-A", "I-A", "O"]
    assert rec["word_tags"] == ["B-A", "O"]


def test_fusion_train_eval_cli(tmp_path, capsys):
    rng = np.random.default_rng(0)
    rows = []
    labels = ("entailment", "neutral", "contradiction")
    for i in range(120):
        lab = int(rng.integers(3))
        c_p = 0.1 * rng.standard_normal(5)
        c_h = 0.1 * rng.standard_normal(5)
        c_p[lab] += 2.0
        c_h[lab] += 2.0
        rows.append({"id": str(i), "c_nli": rng.standard_normal(4).tolist(),
                     "c_p": c_p.tolist(), "c_h": c_h.tolist(), "label": labels[lab]})
    emb = tmp_path / "emb.jsonl"
    emb.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    head = tmp_path / "head.json"
    assert main(["fusion-train", "--embeddings", str(emb), "--steps", "150",
                 "--out", str(head)]) == 0
    capsys.readouterr()
    assert main(["fusion-eval", "--embeddings", str(emb), "--head", str(head)]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["accuracy"] >= 0.9


def test_eval_cli(tmp_path):
    pred_path = tmp_path / "pred.jsonl"
    gold = _read_jsonl(DATA / "conj_dev.jsonl")
    pred_path.write_text("\n".join(
        json.dumps({"id": rec["id"], "label": "neutral"}) for rec in gold) + "\n")
    report_path = tmp_path / "report.json"
    md_path = tmp_path / "report.md"
    assert main(["eval", "--gold", str(DATA / "conj_dev.jsonl"),
                 "--pred", str(pred_path), "--report", str(report_path),
                 "--report-md", str(md_path)]) == 0
    report = json.loads(report_path.read_text())
    assert report["n"] == 623
    assert report["overall_accuracy"] == 281 / 623
    assert "| bucket | size | accuracy |" in md_path.read_text()


def test_train_iaft_cli(tmp_path):
    rows = []
    for i in range(30):
        lab = ("entailment", "neutral", "contradiction")[i % 3]
        rows.append({"premise": f"alpha and beta {i}", "hypothesis": f"alpha {i}", "label": lab})
    base = tmp_path / "base.jsonl"
    base.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    adv = tmp_path / "adv.jsonl"
    adv.write_text("\n".join(json.dumps(r) for r in rows[:10]) + "\n")
    log_path = tmp_path / "log.json"
    assert main(["train-iaft", "--base", str(base), "--adv", str(adv),
                 "--epochs", "2", "--seed", "5", "--log", str(log_path)]) == 0
    log = json.loads(log_path.read_text())
    assert log["k"] == 10
    assert [e["pool_size"] for e in log["epochs"]] == [20, 20]
