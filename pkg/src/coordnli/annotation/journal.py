"""Append-only session journals and the state derived from replaying them.

State is never stored mutably: every read reconstructs it from the event
log, so a crash can lose at most a torn trailing line, which replay ignores.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..pairgen import LABELS

VERDICTS = LABELS + ("ungrammatical",)


class JournalError(ValueError):
    pass


class SessionError(ValueError):
    def __init__(self, code: str, message: str, status: int = 400):
        super().__init__(message)
        self.code = code
        self.status = status


@dataclass
class SessionState:
    session_id: str = ""
    annotators: tuple[str, str] = ("", "")
    pairs: list[dict] = field(default_factory=list)
    warmup: list[dict] = field(default_factory=list)
    warmup_acked: set = field(default_factory=set)
    records: dict = field(default_factory=dict)  # (annotator, pair_id) -> verdict
    resolutions: dict = field(default_factory=dict)  # pair_id -> {"action", "label"}
    closed: bool = False

    # -- replay ----------------------------------------------------------
    def apply(self, event: dict) -> None:
        kind = event.get("event")
        if kind == "created":
            self.session_id = event["session_id"]
            self.annotators = tuple(event["annotators"])
            self.pairs = list(event["pairs"])
            self.warmup = list(event.get("warmup", []))
        elif kind == "warmup_ack":
            self.warmup_acked.add(event["annotator"])
        elif kind == "label":
            self.records[(event["annotator"], event["pair_id"])] = event["verdict"]
        elif kind == "resolution":
            self.resolutions[event["pair_id"]] = {
                "action": event["action"],
                "label": event.get("label"),
            }
        elif kind == "closed":
            self.closed = True
        else:
            raise JournalError(f"unknown event kind {kind!r}")

    # -- derived views ----------------------------------------------------
    def pair_ids(self) -> list[str]:
        return [p["id"] for p in self.pairs]

    def round_one_complete(self) -> bool:
        return all(
            (annotator, pid) in self.records
            for annotator in self.annotators
            for pid in self.pair_ids()
        )

    @property
    def round(self) -> str:
        if self.closed:
            return "closed"
        return "two" if self.round_one_complete() else "one"

    def ungrammatical_ids(self) -> list[str]:
        out = []
        for pid in self.pair_ids():
            if any(self.records.get((a, pid)) == "ungrammatical" for a in self.annotators):
                out.append(pid)
        return out

    def grammatical_ids(self) -> list[str]:
        bad = set(self.ungrammatical_ids())
        return [pid for pid in self.pair_ids() if pid not in bad]

    def disagreed_ids(self) -> list[str]:
        """Grammatical pairs whose two round-one labels differ."""
        a, b = self.annotators
        out = []
        for pid in self.grammatical_ids():
            va, vb = self.records.get((a, pid)), self.records.get((b, pid))
            if va is not None and vb is not None and va != vb:
                out.append(pid)
        return out

    def agreed_ids(self) -> list[str]:
        a, b = self.annotators
        out = []
        for pid in self.grammatical_ids():
            va, vb = self.records.get((a, pid)), self.records.get((b, pid))
            if va is not None and va == vb:
                out.append(pid)
        return out

    def unresolved_ids(self) -> list[str]:
        return [pid for pid in self.disagreed_ids() if pid not in self.resolutions]

    def warmup_done(self, annotator: str) -> bool:
        return not self.warmup or annotator in self.warmup_acked

    def as_dict(self) -> dict:
        """Canonical snapshot used by the crash-recovery comparison."""
        return {
            "session_id": self.session_id,
            "annotators": list(self.annotators),
            "n_pairs": len(self.pairs),
            "warmup_acked": sorted(self.warmup_acked),
            "records": {f"{a}|{p}": v for (a, p), v in sorted(self.records.items())},
            "resolutions": dict(sorted(self.resolutions.items())),
            "closed": self.closed,
            "round": self.round,
        }


def replay(events) -> SessionState:
    state = SessionState()
    for event in events:
        state.apply(event)
    return state


def read_journal(path) -> list[dict]:
    """Parse journal lines; a torn trailing line (crash artifact) is dropped."""
    raw = Path(path).read_bytes()
    lines = raw.split(b"\n")
    events = []
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            events.append(json.loads(line.decode("utf-8")))
        except (ValueError, UnicodeDecodeError) as exc:
            if i == len(lines) - 1:
                break  # partial tail from an interrupted append
            raise JournalError(f"corrupt journal line {i + 1}: {exc}") from exc
    return events


def load_state(path) -> SessionState:
    return replay(read_journal(path))


def append_event(path, event: dict) -> dict:
    event = dict(event)
    event.setdefault("ts", time.time())
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(event, ensure_ascii=False) + "\n")
        fh.flush()
    return event
