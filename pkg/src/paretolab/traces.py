"""Decision traces and the append-only click-log format.

A trace is the ordered (decision, outcome) sequence of one player or agent
on one problem. The persistent representation is newline-delimited JSON,
one click per line, schema version 1:

    {"v": 1, "session_id": str, "player_id": str, "problem_id": str,
     "mode": int, "click_index": int (1-based), "x": [x1, x2],
     "score": float, "cum_score": float, "ts": float (unix seconds, UTC)}

Corrupt lines are skipped with a logged diagnostic; they never abort a read.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import InputError

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_BUDGET = 20

_REQUIRED_FIELDS = ("v", "session_id", "player_id", "problem_id", "mode",
                    "click_index", "x", "score", "cum_score", "ts")


@dataclass(frozen=True)
class TraceStep:
    x: tuple[float, ...]
    y: float
    t: float


@dataclass(frozen=True)
class Trace:
    """One player/agent solving one problem."""

    player_id: str
    problem_id: str
    mode: int
    steps: tuple[TraceStep, ...]
    budget: int = DEFAULT_BUDGET

    def __post_init__(self) -> None:
        if self.mode not in (1, 2, 3):
            raise InputError(f"mode must be 1, 2 or 3, got {self.mode}")
        if len(self.steps) > self.budget:
            raise InputError(f"{len(self.steps)} steps exceed budget {self.budget}")

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def X(self) -> np.ndarray:
        return np.array([s.x for s in self.steps], dtype=float)

    @property
    def y(self) -> np.ndarray:
        return np.array([s.y for s in self.steps], dtype=float)

    def to_dict(self) -> dict:
        return {
            "player_id": self.player_id,
            "problem_id": self.problem_id,
            "mode": self.mode,
            "budget": self.budget,
            "steps": [{"x": list(s.x), "y": s.y, "t": s.t} for s in self.steps],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Trace":
        steps = tuple(
            TraceStep(x=tuple(float(v) for v in s["x"]), y=float(s["y"]), t=float(s["t"]))
            for s in d["steps"]
        )
        return cls(player_id=str(d["player_id"]), problem_id=str(d["problem_id"]),
                   mode=int(d["mode"]), steps=steps, budget=int(d.get("budget", DEFAULT_BUDGET)))


def click_record(session_id: str, player_id: str, problem_id: str, mode: int,
                 click_index: int, x, score: float, cum_score: float, ts: float) -> dict:
    return {
        "v": SCHEMA_VERSION,
        "session_id": session_id,
        "player_id": player_id,
        "problem_id": problem_id,
        "mode": int(mode),
        "click_index": int(click_index),
        "x": [float(v) for v in x],
        "score": float(score),
        "cum_score": float(cum_score),
        "ts": float(ts),
    }


def append_click_records(path: Path | str, records: Iterable[dict]) -> None:
    """Append records as NDJSON lines, flushed and fsynced before returning."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def iter_click_records(path: Path | str) -> Iterator[dict]:
    """Yield well-formed click records; skip and log corrupt lines."""
    path = Path(path)
    if not path.exists():
        return
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                log.warning("%s:%d: skipping corrupt line (%s)", path, lineno, exc)
                continue
            if not isinstance(rec, dict) or any(k not in rec for k in _REQUIRED_FIELDS):
                log.warning("%s:%d: skipping record with missing fields", path, lineno)
                continue
            yield rec


def traces_from_records(records: Iterable[dict], player: str | None = None,
                        problem: str | None = None, since: float | None = None,
                        budget: int | None = None) -> list[Trace]:
    """Rebuild traces from click records, grouped by (session, problem).

    Records are grouped in log order; within a group, clicks are ordered by
    click_index. Optional filters select by player id, problem id, or a
    minimum timestamp.
    """
    groups: dict[tuple[str, str], list[dict]] = {}
    order: list[tuple[str, str]] = []
    for rec in records:
        if player is not None and rec["player_id"] != player:
            continue
        if problem is not None and rec["problem_id"] != problem:
            continue
        if since is not None and float(rec["ts"]) < since:
            continue
        key = (str(rec["session_id"]), str(rec["problem_id"]))
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(rec)

    traces = []
    for key in order:
        recs = sorted(groups[key], key=lambda r: int(r["click_index"]))
        steps = tuple(
            TraceStep(x=tuple(float(v) for v in r["x"]), y=float(r["score"]), t=float(r["ts"]))
            for r in recs
        )
        first = recs[0]
        cap = budget if budget is not None else max(DEFAULT_BUDGET, len(steps))
        traces.append(Trace(
            player_id=str(first["player_id"]),
            problem_id=str(first["problem_id"]),
            mode=int(first["mode"]),
            steps=steps,
            budget=max(cap, len(steps)),
        ))
    return traces


def trace_to_records(trace: Trace, session_id: str) -> list[dict]:
    """Serialize a trace as click records (used by the simulator)."""
    records = []
    cum = 0.0
    for i, step in enumerate(trace.steps, start=1):
        cum += step.y
        records.append(click_record(
            session_id=session_id, player_id=trace.player_id,
            problem_id=trace.problem_id, mode=trace.mode, click_index=i,
            x=step.x, score=step.y, cum_score=cum, ts=step.t,
        ))
    return records


def read_traces(path: Path | str, player: str | None = None,
                problem: str | None = None, since: float | None = None) -> list[Trace]:
    """Read a click log and reconstruct traces."""
    return traces_from_records(iter_click_records(path), player=player,
                               problem=problem, since=since)
