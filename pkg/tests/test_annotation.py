import json
import random

import pytest
from fastapi.testclient import TestClient

from coordnli.annotation import SessionStore, create_app
from coordnli.annotation.journal import load_state, read_journal, replay
from coordnli.evalkit import cohen_kappa

from .test_evalkit import KAPPA_A, KAPPA_B


def make_pairs(n, prefix="p"):
    return [
        {
            "id": f"{prefix}{i}",
            "premise": f"the crew fixed the mast and the sail {i} .",
            "hypothesis": f"the crew fixed the mast {i} .",
            "operation": "remove",
            "conj_word": "and",
            "label": "entailment",  # heuristic label: must never reach annotators
            "label_source": "heuristic",
            "coordination": {"target": "premise", "left_chars": [19, 27],
                             "right_chars": [32, 40], "conj_chars": [28, 31]},
        }
        for i in range(n)
    ]


@pytest.fixture()
def client(tmp_path):
    store = SessionStore(tmp_path / "sessions")
    app = create_app(store)
    with TestClient(app) as c:
        c.store = store
        yield c


def create_session(client, n_pairs=10, annotators=("ann-a", "ann-b"), warmup=None,
                   session_id="s1"):
    resp = client.post("/sessions", json={
        "session_id": session_id,
        "annotators": list(annotators),
        "pairs": make_pairs(n_pairs),
        "warmup": warmup or [],
    })
    assert resp.status_code == 200, resp.text
    return resp.json()


def label_all(client, session_id, annotator, verdicts):
    for _ in range(len(verdicts) + 1):
        nxt = client.get(f"/sessions/{session_id}/next",
                         params={"annotator": annotator}).json()
        if nxt["done"] or nxt["round"] != "one":
            return
        pair_id = nxt["pair"]["id"]
        resp = client.post(f"/sessions/{session_id}/labels", json={
            "annotator": annotator, "pair_id": pair_id,
            "verdict": verdicts[pair_id]})
        assert resp.status_code == 200, resp.text


def test_create_session_counts(client):
    body = create_session(client, n_pairs=10)
    assert body["pairs"] == 10
    assert body["pending_round_one"] == 20


def test_create_session_rejects_empty_and_duplicate(client):
    resp = client.post("/sessions", json={"annotators": ["a", "b"], "pairs": []})
    assert resp.status_code == 400
    assert resp.json()["code"] == "no-pairs"
    create_session(client, session_id="dup")
    resp = client.post("/sessions", json={
        "session_id": "dup", "annotators": ["a", "b"], "pairs": make_pairs(1)})
    assert resp.status_code == 409
    assert resp.json()["code"] == "session-exists"


def test_create_session_requires_two_annotators(client):
    resp = client.post("/sessions", json={"annotators": ["solo"], "pairs": make_pairs(2)})
    assert resp.status_code == 400
    assert resp.json()["code"] == "bad-annotators"


def test_next_pair_serves_lowest_index_and_hides_labels(client):
    create_session(client)
    nxt = client.get("/sessions/s1/next", params={"annotator": "ann-a"}).json()
    assert nxt["round"] == "one"
    assert nxt["index"] == 0
    assert nxt["pair"]["id"] == "p0"
    assert "label" not in nxt["pair"]
    assert "label_source" not in nxt["pair"]
    assert "coordination" in nxt["pair"]  # span metadata for highlighting survives


def test_unknown_annotator_and_session(client):
    create_session(client)
    assert client.get("/sessions/s1/next", params={"annotator": "ghost"}).status_code == 404
    assert client.get("/sessions/nope/next", params={"annotator": "ann-a"}).status_code == 404


def test_submit_idempotent_and_conflict(client, tmp_path):
    create_session(client)
    journal = client.store._journal("s1")
    first = client.post("/sessions/s1/labels", json={
        "annotator": "ann-a", "pair_id": "p0", "verdict": "neutral"})
    assert first.status_code == 200
    size = journal.stat().st_size
    again = client.post("/sessions/s1/labels", json={
        "annotator": "ann-a", "pair_id": "p0", "verdict": "neutral"})
    assert again.status_code == 200
    assert again.json()["duplicate"] is True
    assert journal.stat().st_size == size  # identical resubmission appends nothing
    conflict = client.post("/sessions/s1/labels", json={
        "annotator": "ann-a", "pair_id": "p0", "verdict": "entailment"})
    assert conflict.status_code == 409
    assert conflict.json()["code"] == "verdict-conflict"


def test_done_signal_after_all_labeled(client):
    create_session(client, n_pairs=3)
    verdicts = {"p0": "entailment", "p1": "neutral", "p2": "contradiction"}
    label_all(client, "s1", "ann-a", verdicts)
    nxt = client.get("/sessions/s1/next", params={"annotator": "ann-a"}).json()
    assert nxt["done"] is True


def test_report_requires_round_one_complete(client):
    create_session(client, n_pairs=2)
    resp = client.get("/sessions/s1/report")
    assert resp.status_code == 409
    assert resp.json()["code"] == "round-one-incomplete"


def test_round_two_queue_and_resolution_flow(client):
    create_session(client, n_pairs=4)
    verdicts_a = {"p0": "entailment", "p1": "neutral", "p2": "contradiction", "p3": "neutral"}
    verdicts_b = {"p0": "entailment", "p1": "contradiction", "p2": "contradiction", "p3": "neutral"}
    label_all(client, "s1", "ann-a", verdicts_a)
    label_all(client, "s1", "ann-b", verdicts_b)

    report = client.get("/sessions/s1/report").json()
    assert report["disagreed_ids"] == ["p1"]
    assert report["counts"]["agreed"] == 3

    nxt = client.get("/sessions/s1/next", params={"annotator": "ann-a"}).json()
    assert nxt["round"] == "two"
    assert nxt["pair"]["id"] == "p1"
    assert nxt["round_one_labels"] == {"ann-a": "neutral", "ann-b": "contradiction"}

    # labeling is closed in round two
    resp = client.post("/sessions/s1/labels", json={
        "annotator": "ann-a", "pair_id": "p1", "verdict": "neutral"})
    assert resp.status_code == 409
    assert resp.json()["code"] == "out-of-round"

    # close blocked until the disagreement is resolved
    resp = client.post("/sessions/s1/close")
    assert resp.status_code == 409
    assert resp.json()["code"] == "unresolved-disagreements"

    resp = client.post("/sessions/s1/resolutions", json={
        "pair_id": "p1", "action": "label", "label": "contradiction"})
    assert resp.status_code == 200
    nxt = client.get("/sessions/s1/next", params={"annotator": "ann-a"}).json()
    assert nxt["done"] is True

    assert client.post("/sessions/s1/close").status_code == 200
    export = client.get("/sessions/s1/export").json()
    assert {p["id"]: p["label"] for p in export["pairs"]} == {
        "p0": "entailment", "p1": "contradiction", "p2": "contradiction", "p3": "neutral"}
    assert all(p["label_source"] == "human" for p in export["pairs"])


def test_ungrammatical_pairs_excluded_everywhere(client):
    create_session(client, n_pairs=3)
    verdicts_a = {"p0": "ungrammatical", "p1": "neutral", "p2": "entailment"}
    verdicts_b = {"p0": "entailment", "p1": "neutral", "p2": "entailment"}
    label_all(client, "s1", "ann-a", verdicts_a)
    label_all(client, "s1", "ann-b", verdicts_b)
    report = client.get("/sessions/s1/report").json()
    # p0 flagged by one annotator: out of kappa, not a disagreement
    assert report["counts"]["grammatical"] == 2
    assert report["disagreed_ids"] == []
    assert report["kappa"] == 1.0
    client.post("/sessions/s1/close")
    export = client.get("/sessions/s1/export").json()
    assert [p["id"] for p in export["pairs"]] == ["p1", "p2"]
    assert export["report"]["ungrammatical"] == ["p0"]


def test_discard_resolution_goes_to_sidecar(client):
    create_session(client, n_pairs=2)
    label_all(client, "s1", "ann-a", {"p0": "entailment", "p1": "neutral"})
    label_all(client, "s1", "ann-b", {"p0": "entailment", "p1": "entailment"})
    client.post("/sessions/s1/resolutions", json={"pair_id": "p1", "action": "discard"})
    client.post("/sessions/s1/close")
    export = client.get("/sessions/s1/export").json()
    assert [p["id"] for p in export["pairs"]] == ["p0"]
    assert export["report"]["discarded"] == ["p1"]


def test_export_requires_closed(client):
    create_session(client, n_pairs=1)
    resp = client.get("/sessions/s1/export")
    assert resp.status_code == 409
    assert resp.json()["code"] == "not-closed"


def test_agreement_matches_evalkit_oracle_fixture(client):
    n = len(KAPPA_A)
    create_session(client, n_pairs=n)
    label_all(client, "s1", "ann-a", {f"p{i}": KAPPA_A[i] for i in range(n)})
    label_all(client, "s1", "ann-b", {f"p{i}": KAPPA_B[i] for i in range(n)})
    report = client.get("/sessions/s1/report").json()
    assert report["kappa"] == pytest.approx(cohen_kappa(KAPPA_A, KAPPA_B))
    assert report["p_o"] == pytest.approx(0.75)


def test_warmup_locks_round_one(client):
    warmup = [{"premise": "A and B .", "hypothesis": "A .", "label": "entailment",
               "explanation": "removing one conjunct of a boolean 'and' keeps the claim true"}]
    create_session(client, n_pairs=1, warmup=warmup)
    resp = client.get("/sessions/s1/next", params={"annotator": "ann-a"})
    assert resp.status_code == 409
    assert resp.json()["code"] == "warmup-incomplete"
    got = client.get("/sessions/s1/warmup").json()["pairs"]
    assert got == warmup  # gold label + explanation shown verbatim during training
    client.post("/sessions/s1/warmup-ack", json={"annotator": "ann-a"})
    assert client.get("/sessions/s1/next", params={"annotator": "ann-a"}).status_code == 200
    # the other annotator is still locked
    assert client.get("/sessions/s1/next", params={"annotator": "ann-b"}).status_code == 409


def test_empty_warmup_unlocks_immediately(client):
    create_session(client, n_pairs=1)
    assert client.get("/sessions/s1/next", params={"annotator": "ann-a"}).status_code == 200


def _scripted_journal(client):
    create_session(client, n_pairs=5)
    verdicts_a = {"p0": "entailment", "p1": "neutral", "p2": "contradiction",
                  "p3": "ungrammatical", "p4": "neutral"}
    verdicts_b = {"p0": "entailment", "p1": "entailment", "p2": "contradiction",
                  "p3": "neutral", "p4": "contradiction"}
    label_all(client, "s1", "ann-a", verdicts_a)
    label_all(client, "s1", "ann-b", verdicts_b)
    client.post("/sessions/s1/resolutions", json={
        "pair_id": "p1", "action": "label", "label": "neutral"})
    client.post("/sessions/s1/resolutions", json={"pair_id": "p4", "action": "discard"})
    client.post("/sessions/s1/close")
    return client.store._journal("s1")


def test_journal_replay_reconstructs_state(client):
    journal = _scripted_journal(client)
    events = read_journal(journal)
    assert replay(events).as_dict() == load_state(journal).as_dict()
    state = load_state(journal)
    assert state.closed
    assert state.round == "closed"


def test_crash_recovery_at_random_truncation_points(client, tmp_path):
    journal = _scripted_journal(client)
    blob = journal.read_bytes()
    events = read_journal(journal)
    # map each byte offset to the number of complete lines before it
    newlines = [i for i, b in enumerate(blob) if b == 0x0A]
    rng = random.Random(2024)
    points = rng.sample(range(1, len(blob)), 20)
    for point in points:
        truncated = tmp_path / f"trunc-{point}.jsonl"
        truncated.write_bytes(blob[:point])
        complete = sum(1 for nl in newlines if nl < point)
        expected = replay(events[:complete]).as_dict()
        assert load_state(truncated).as_dict() == expected


def test_store_survives_restart(client, tmp_path):
    journal = _scripted_journal(client)
    reopened = SessionStore(journal.parent)
    state = reopened.state("s1")
    assert state.closed
    export = reopened.export("s1")
    assert [p["id"] for p in export["pairs"]] == ["p0", "p1", "p2"]
