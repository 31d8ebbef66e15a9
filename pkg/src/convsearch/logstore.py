"""Append-only dialogue logging.

One newline-delimited JSON record per event, in daily turn files plus a
session index file. Appends are serialized per session and never rewrite
prior lines, so a crash can at worst lose the final partial line; readers
skip corrupt lines and count them instead of aborting.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import SequencingError, SessionNotFoundError

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass
class TurnRecord:
    session_id: str
    turn_index: int  # contiguous from 1 per session
    user_text: str
    resolved_text: str
    decision: dict
    state_before: dict
    state_after: dict
    component: str
    response_text: str
    suggestion: str | None = None
    latency_ms: float = 0.0
    timestamp_ms: int = 0
    error: str | None = None

    def to_dict(self) -> dict:
        d = {"v": SCHEMA_VERSION, "type": "turn"}
        d.update(vars(self))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TurnRecord":
        fields = {k: v for k, v in d.items() if k not in ("v", "type")}
        return cls(**fields)


@dataclass
class SessionSummary:
    session_id: str
    turn_count: int
    rating: int | None = None
    feedback: str | None = None
    component_turns: dict[str, int] = field(default_factory=dict)
    start_ms: int = 0
    end_ms: int = 0
    seed: int = 0

    def to_dict(self) -> dict:
        return vars(self)


def _day_name(timestamp_ms: int) -> str:
    day = datetime.fromtimestamp(timestamp_ms / 1000, tz=timezone.utc)
    return day.strftime("%Y%m%d")


class LogStore:
    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._last_index: dict[str, int] = {}
        self._sessions: dict[str, dict] = {}
        self._finals: dict[str, dict] = {}
        self._turns: dict[str, list[dict]] = {}  # in-memory mirror of turn files
        self.warning_count = 0
        self._scan_existing()

    @property
    def session_file(self) -> Path:
        return self.directory / "sessions.jsonl"

    def _scan_existing(self):
        for record in self._read_file(self.session_file):
            if record.get("type") == "session_start":
                self._sessions[record["session_id"]] = record
            elif record.get("type") == "session_final":
                self._finals[record["session_id"]] = record
        for record in self._iter_turn_records():
            sid = record["session_id"]
            self._last_index[sid] = max(self._last_index.get(sid, 0), record["turn_index"])
            self._turns.setdefault(sid, []).append(record)
        for records in self._turns.values():
            records.sort(key=lambda r: r["turn_index"])

    def _read_file(self, path: Path):
        if not path.exists():
            return
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    yield json.loads(line)
                except json.JSONDecodeError:
                    self.warning_count += 1
                    log.warning("skipping corrupt log line in %s", path.name)

    def _iter_turn_records(self):
        for path in sorted(self.directory.glob("turns-*.jsonl")):
            yield from self._read_file(path)

    def _append(self, path: Path, record: dict):
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")

    # -- session lifecycle ----------------------------------------------

    def register_session(self, session_id: str, seed: int, created_ms: int | None = None):
        created_ms = created_ms or int(time.time() * 1000)
        record = {
            "v": SCHEMA_VERSION, "type": "session_start",
            "session_id": session_id, "seed": seed, "created_ms": created_ms,
        }
        with self._lock:
            self._sessions[session_id] = record
            self._append(self.session_file, record)

    def session_seed(self, session_id: str) -> int:
        start = self._sessions.get(session_id)
        if start is None:
            raise SessionNotFoundError(session_id)
        return int(start["seed"])

    def append_turn(self, record: TurnRecord):
        with self._lock:
            expected = self._last_index.get(record.session_id, 0) + 1
            if record.turn_index != expected:
                raise SequencingError(
                    f"session {record.session_id}: turn index {record.turn_index}, "
                    f"expected {expected}"
                )
            self._append(
                self.directory / f"turns-{_day_name(record.timestamp_ms)}.jsonl",
                record.to_dict(),
            )
            self._last_index[record.session_id] = record.turn_index
            self._turns.setdefault(record.session_id, []).append(record.to_dict())

    def finalize_session(self, session_id: str, rating: int | None = None,
                         feedback: str | None = None) -> SessionSummary:
        """Compute the summary and persist it; repeat calls are idempotent
        (the first final record wins)."""
        if session_id not in self._sessions:
            raise SessionNotFoundError(session_id)
        with self._lock:
            existing = self._finals.get(session_id)
            if existing is not None:
                rating = existing.get("rating")
                feedback = existing.get("feedback")
        summary = self._compute_summary(session_id, rating, feedback)
        with self._lock:
            if session_id not in self._finals:
                record = {
                    "v": SCHEMA_VERSION, "type": "session_final",
                    "session_id": session_id, "rating": rating, "feedback": feedback,
                    "end_ms": summary.end_ms,
                }
                self._finals[session_id] = record
                self._append(self.session_file, record)
        return summary

    def is_finalized(self, session_id: str) -> bool:
        return session_id in self._finals

    # -- reading ----------------------------------------------------------

    def iter_session_turns(self, session_id: str):
        for record in self._turns.get(session_id, []):
            yield TurnRecord.from_dict(record)

    def _compute_summary(self, session_id: str, rating, feedback) -> SessionSummary:
        start = self._sessions[session_id]
        turns = list(self.iter_session_turns(session_id))
        component_turns: dict[str, int] = {}
        for t in turns:
            component_turns[t.component] = component_turns.get(t.component, 0) + 1
        return SessionSummary(
            session_id=session_id,
            turn_count=len(turns),
            rating=rating,
            feedback=feedback,
            component_turns=component_turns,
            start_ms=start["created_ms"],
            end_ms=max((t.timestamp_ms for t in turns), default=start["created_ms"]),
            seed=start["seed"],
        )

    def load_sessions(self, start_ms: int | None = None,
                      end_ms: int | None = None) -> list[SessionSummary]:
        """Summaries ordered by start timestamp; turn streams come from
        iter_session_turns. Corrupt lines were counted, never fatal."""
        summaries = []
        for session_id, start in self._sessions.items():
            created = start["created_ms"]
            if start_ms is not None and created < start_ms:
                continue
            if end_ms is not None and created >= end_ms:
                continue
            final = self._finals.get(session_id, {})
            summaries.append(self._compute_summary(
                session_id, final.get("rating"), final.get("feedback")
            ))
        summaries.sort(key=lambda s: (s.start_ms, s.session_id))
        return summaries

    def component_sequence(self, session_id: str) -> list[str]:
        return [t.component for t in sorted(
            self.iter_session_turns(session_id), key=lambda t: t.turn_index
        )]

    def user_texts(self, session_id: str) -> list[str]:
        return [t.user_text for t in sorted(
            self.iter_session_turns(session_id), key=lambda t: t.turn_index
        )]

    def session_ids(self) -> list[str]:
        return sorted(
            self._sessions,
            key=lambda sid: (self._sessions[sid]["created_ms"], sid),
        )
