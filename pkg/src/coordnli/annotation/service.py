"""HTTP service for the two-round annotation protocol.

Round one: both annotators label every pair independently (labels of the
generated pairs are never sent out). Round two: pairs the annotators
disagreed on are shown with both round-one labels and receive a single
agreed resolution (final label or discard). Export keeps exactly the agreed
and resolved grammatical pairs.
"""
from __future__ import annotations

import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..evalkit import cohen_kappa
from ..pairgen import LABELS
from .journal import (
    SessionError,
    SessionState,
    VERDICTS,
    append_event,
    load_state,
)

_HIDDEN_PAIR_FIELDS = {"label", "label_source", "boolean"}


class SessionStore:
    """Journal-file-backed sessions with a single writer lock per session."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _journal(self, session_id: str) -> Path:
        safe = "".join(c if c.isalnum() or c in "-_" else "_" for c in session_id)
        return self.root / f"{safe}.jsonl"

    def _lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def state(self, session_id: str) -> SessionState:
        path = self._journal(session_id)
        if not path.exists():
            raise SessionError("unknown-session", f"no session {session_id!r}", 404)
        return load_state(path)

    def create(self, pairs, annotators, session_id=None, warmup=None) -> str:
        if not pairs:
            raise SessionError("no-pairs", "a session needs at least one pair")
        if len(annotators) != 2 or len(set(annotators)) != 2:
            raise SessionError("bad-annotators", "exactly two distinct annotators required")
        session_id = session_id or uuid.uuid4().hex[:12]
        with self._lock(session_id):
            path = self._journal(session_id)
            if path.exists():
                raise SessionError("session-exists", f"session {session_id!r} already exists", 409)
            clean_pairs = []
            for i, pair in enumerate(pairs):
                pair = dict(pair)
                pair.setdefault("id", str(i))
                pair["id"] = str(pair["id"])
                clean_pairs.append(pair)
            if len({p["id"] for p in clean_pairs}) != len(clean_pairs):
                raise SessionError("duplicate-pair-ids", "pair ids must be unique")
            append_event(path, {
                "event": "created",
                "session_id": session_id,
                "annotators": list(annotators),
                "pairs": clean_pairs,
                "warmup": list(warmup or []),
            })
        return session_id

    def _require_annotator(self, state: SessionState, annotator: str) -> None:
        if annotator not in state.annotators:
            raise SessionError("unknown-annotator", f"{annotator!r} is not on this session", 404)

    def next_pair(self, session_id: str, annotator: str) -> dict:
        state = self.state(session_id)
        self._require_annotator(state, annotator)
        if not state.warmup_done(annotator):
            raise SessionError("warmup-incomplete", "finish the warm-up examples first", 409)
        if state.round == "one":
            for index, pair in enumerate(state.pairs):
                if (annotator, pair["id"]) not in state.records:
                    return {
                        "done": False,
                        "round": "one",
                        "index": index,
                        "progress": self._progress(state, annotator),
                        "pair": _annotator_view(pair),
                    }
            return {"done": True, "round": "one",
                    "progress": self._progress(state, annotator)}
        if state.round == "two":
            pending = state.unresolved_ids()
            for index, pair in enumerate(state.pairs):
                if pair["id"] in pending:
                    a, b = state.annotators
                    view = _annotator_view(pair)
                    return {
                        "done": False,
                        "round": "two",
                        "index": index,
                        "progress": {"pending": len(pending),
                                     "total": len(state.disagreed_ids())},
                        "pair": view,
                        "round_one_labels": {
                            a: state.records[(a, pair["id"])],
                            b: state.records[(b, pair["id"])],
                        },
                    }
            return {"done": True, "round": "two"}
        return {"done": True, "round": "closed"}

    def _progress(self, state: SessionState, annotator: str) -> dict:
        done = sum(1 for pid in state.pair_ids() if (annotator, pid) in state.records)
        return {"done": done, "total": len(state.pairs)}

    def submit_label(self, session_id: str, annotator: str, pair_id: str, verdict: str) -> dict:
        if verdict not in VERDICTS:
            raise SessionError("bad-verdict", f"verdict must be one of {VERDICTS}")
        with self._lock(session_id):
            state = self.state(session_id)
            self._require_annotator(state, annotator)
            if pair_id not in state.pair_ids():
                raise SessionError("unknown-pair", f"no pair {pair_id!r}", 404)
            if state.round != "one":
                raise SessionError("out-of-round", "labeling is only open in round one", 409)
            existing = state.records.get((annotator, pair_id))
            if existing is not None:
                if existing == verdict:
                    return {"ok": True, "duplicate": True}
                raise SessionError(
                    "verdict-conflict",
                    f"pair {pair_id} already labeled {existing!r} in this round", 409)
            append_event(self._journal(session_id), {
                "event": "label", "annotator": annotator,
                "pair_id": pair_id, "verdict": verdict,
            })
        return {"ok": True, "duplicate": False}

    def warmup(self, session_id: str) -> list[dict]:
        return self.state(session_id).warmup

    def ack_warmup(self, session_id: str, annotator: str) -> dict:
        with self._lock(session_id):
            state = self.state(session_id)
            self._require_annotator(state, annotator)
            if annotator not in state.warmup_acked:
                append_event(self._journal(session_id), {
                    "event": "warmup_ack", "annotator": annotator,
                })
        return {"ok": True}

    def report(self, session_id: str) -> dict:
        state = self.state(session_id)
        if not state.round_one_complete():
            raise SessionError("round-one-incomplete",
                               "agreement is defined once round one is complete", 409)
        a, b = state.annotators
        grammatical = state.grammatical_ids()
        labels_a = [state.records[(a, pid)] for pid in grammatical]
        labels_b = [state.records[(b, pid)] for pid in grammatical]
        observed = (
            sum(x == y for x, y in zip(labels_a, labels_b)) / len(labels_a)
            if labels_a else None
        )
        kappa = cohen_kappa(labels_a, labels_b) if labels_a else None
        return {
            "kappa": kappa,
            "p_o": observed,
            "counts": {
                "pairs": len(state.pairs),
                "grammatical": len(grammatical),
                "ungrammatical": len(state.ungrammatical_ids()),
                "agreed": len(state.agreed_ids()),
                "disagreed": len(state.disagreed_ids()),
                "labels": {
                    a: {lab: labels_a.count(lab) for lab in LABELS},
                    b: {lab: labels_b.count(lab) for lab in LABELS},
                },
            },
            "disagreed_ids": state.disagreed_ids(),
        }

    def resolve(self, session_id: str, pair_id: str, action: str, label=None) -> dict:
        if action not in ("label", "discard"):
            raise SessionError("bad-resolution", "action must be 'label' or 'discard'")
        if action == "label" and label not in LABELS:
            raise SessionError("bad-resolution", f"resolution label must be one of {LABELS}")
        with self._lock(session_id):
            state = self.state(session_id)
            if state.round != "two":
                raise SessionError("out-of-round", "resolutions are only open in round two", 409)
            if pair_id not in state.disagreed_ids():
                raise SessionError("not-disagreed", f"pair {pair_id!r} is not in the disagreement set", 409)
            existing = state.resolutions.get(pair_id)
            new = {"action": action, "label": label if action == "label" else None}
            if existing is not None:
                if existing == new:
                    return {"ok": True, "duplicate": True}
                raise SessionError("resolution-conflict",
                                   f"pair {pair_id} already resolved as {existing}", 409)
            append_event(self._journal(session_id), {
                "event": "resolution", "pair_id": pair_id,
                "action": action, **({"label": label} if action == "label" else {}),
            })
        return {"ok": True, "duplicate": False}

    def close(self, session_id: str) -> dict:
        with self._lock(session_id):
            state = self.state(session_id)
            if state.closed:
                return {"ok": True, "duplicate": True}
            if not state.round_one_complete():
                raise SessionError("round-one-incomplete", "cannot close during round one", 409)
            unresolved = state.unresolved_ids()
            if unresolved:
                raise SessionError(
                    "unresolved-disagreements",
                    f"{len(unresolved)} disagreement(s) lack a resolution: {unresolved[:5]}", 409)
            append_event(self._journal(session_id), {"event": "closed"})
        return {"ok": True, "duplicate": False}

    def export(self, session_id: str) -> dict:
        state = self.state(session_id)
        if not state.closed:
            raise SessionError("not-closed", "export is available once the session is closed", 409)
        a, _ = state.annotators
        by_id = {p["id"]: p for p in state.pairs}
        exported = []
        discarded = []
        for pid in state.pair_ids():
            if pid in state.ungrammatical_ids():
                continue
            if pid in state.agreed_ids():
                final = state.records[(a, pid)]
            elif pid in state.resolutions:
                resolution = state.resolutions[pid]
                if resolution["action"] == "discard":
                    discarded.append(pid)
                    continue
                final = resolution["label"]
            else:
                continue
            record = dict(by_id[pid])
            record["label"] = final
            record["label_source"] = "human"
            exported.append(record)
        return {
            "pairs": exported,
            "report": {
                "exported": len(exported),
                "discarded": discarded,
                "ungrammatical": state.ungrammatical_ids(),
            },
        }


def _annotator_view(pair: dict) -> dict:
    """Pair payload with gold/heuristic labels stripped."""
    return {k: v for k, v in pair.items() if k not in _HIDDEN_PAIR_FIELDS}


def create_app(store: SessionStore, static_dir=None) -> FastAPI:
    app = FastAPI(title="coordnli annotation service")

    @app.exception_handler(SessionError)
    async def _session_error(_request: Request, exc: SessionError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": str(exc)})

    @app.post("/sessions")
    async def create_session(request: Request):
        body = await request.json()
        session_id = store.create(
            pairs=body.get("pairs", []),
            annotators=body.get("annotators", []),
            session_id=body.get("session_id"),
            warmup=body.get("warmup"),
        )
        state = store.state(session_id)
        return {"session_id": session_id, "pairs": len(state.pairs),
                "pending_round_one": len(state.pairs) * 2}

    @app.get("/sessions/{session_id}/next")
    async def next_pair(session_id: str, annotator: str):
        return store.next_pair(session_id, annotator)

    @app.post("/sessions/{session_id}/labels")
    async def submit_label(session_id: str, request: Request):
        body = await request.json()
        return store.submit_label(
            session_id, body.get("annotator", ""),
            str(body.get("pair_id", "")), body.get("verdict", ""))

    @app.get("/sessions/{session_id}/warmup")
    async def warmup(session_id: str):
        return {"pairs": store.warmup(session_id)}

    @app.post("/sessions/{session_id}/warmup-ack")
    async def warmup_ack(session_id: str, request: Request):
        body = await request.json()
        return store.ack_warmup(session_id, body.get("annotator", ""))

    @app.get("/sessions/{session_id}/report")
    async def report(session_id: str):
        return store.report(session_id)

    @app.post("/sessions/{session_id}/resolutions")
    async def resolve(session_id: str, request: Request):
        body = await request.json()
        return store.resolve(
            session_id, str(body.get("pair_id", "")),
            body.get("action", ""), body.get("label"))

    @app.post("/sessions/{session_id}/close")
    async def close(session_id: str):
        return store.close(session_id)

    @app.get("/sessions/{session_id}/export")
    async def export(session_id: str):
        return store.export(session_id)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
