"""Session service for the data-collection game.

A session walks one player through a sequence of problems (default: all ten,
shuffled with a recorded seed) in one of three modes. Every click is
validated in-domain, scored server-side and appended to the click log
before the response is sent, so a submitted click survives a crash. Session
metadata lives in a sidecar NDJSON file; both files rebuild the in-memory
state on startup.

Mode 1 responses never contain optimum information; mode 2 adds the target
score of the current problem; mode 3 only changes which feedback the client
displays (the stored trace is identical across modes).
"""

from __future__ import annotations

import json
import logging
import os
import random
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from pydantic import BaseModel

from . import testbed
from .errors import InputError
from .traces import (
    DEFAULT_BUDGET,
    Trace,
    append_click_records,
    click_record,
    iter_click_records,
    read_traces,
)

log = logging.getLogger(__name__)


class SessionNotFound(KeyError):
    pass


class SessionStateError(RuntimeError):
    """Click submitted against a finished session or exhausted problem."""


@dataclass
class SessionState:
    session_id: str
    player_id: str
    mode: int
    problem_ids: list[str]
    shuffle_seed: int
    budget: int
    clicks: dict[str, list[dict]] = field(default_factory=dict)

    @property
    def current_index(self) -> int | None:
        for i, pid in enumerate(self.problem_ids):
            if len(self.clicks.get(pid, [])) < self.budget:
                return i
        return None

    @property
    def finished(self) -> bool:
        return self.current_index is None

    def snapshot(self) -> dict:
        idx = self.current_index
        current = None
        if idx is not None:
            pid = self.problem_ids[idx]
            problem = testbed.get_problem(pid)
            events = self.clicks.get(pid, [])
            current = {
                "problem_id": pid,
                "problem_index": idx,
                "lower": list(problem.domain.lower),
                "upper": list(problem.domain.upper),
                "clicks": events,
                "clicks_used": len(events),
                "remaining_shots": self.budget - len(events),
            }
            if self.mode == 2:
                current["target_score"] = problem.best_score
        summary = [
            {
                "problem_id": pid,
                "clicks_used": len(self.clicks.get(pid, [])),
                "best_score": max((c["score"] for c in self.clicks.get(pid, [])), default=None),
            }
            for pid in self.problem_ids
        ]
        return {
            "session_id": self.session_id,
            "player_id": self.player_id,
            "mode": self.mode,
            "budget": self.budget,
            "problem_ids": self.problem_ids,
            "shuffle_seed": self.shuffle_seed,
            "status": "finished" if self.finished else "active",
            "current": current,
            "problems": summary,
        }


class SessionStore:
    """File-backed session state; safe for concurrent use within a process."""

    def __init__(self, data_dir: Path | str, budget: int = DEFAULT_BUDGET):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.clicks_path = self.data_dir / "clicks.ndjson"
        self.sessions_path = self.data_dir / "sessions.ndjson"
        self.budget = budget
        self._lock = threading.Lock()
        self._sessions: dict[str, SessionState] = {}
        self._load()

    def _load(self) -> None:
        if self.sessions_path.exists():
            with open(self.sessions_path, "r", encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rec = json.loads(line)
                        state = SessionState(
                            session_id=rec["session_id"], player_id=rec["player_id"],
                            mode=int(rec["mode"]), problem_ids=list(rec["problem_ids"]),
                            shuffle_seed=int(rec["shuffle_seed"]), budget=int(rec["budget"]),
                        )
                    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                        log.warning("%s:%d: skipping corrupt session record (%s)",
                                    self.sessions_path, lineno, exc)
                        continue
                    self._sessions[state.session_id] = state
        for rec in iter_click_records(self.clicks_path):
            state = self._sessions.get(rec["session_id"])
            if state is None:
                continue
            state.clicks.setdefault(rec["problem_id"], []).append(self._event_from_record(rec))

    @staticmethod
    def _event_from_record(rec: dict) -> dict:
        return {
            "click_index": int(rec["click_index"]),
            "x": [float(v) for v in rec["x"]],
            "score": float(rec["score"]),
            "cum_score": float(rec["cum_score"]),
            "ts": float(rec["ts"]),
        }

    def create_session(self, player_id: str, mode: int,
                       problems: list[str] | None = None,
                       seed: int | None = None) -> dict:
        if mode not in (1, 2, 3):
            raise InputError(f"mode must be 1, 2 or 3, got {mode}")
        if not player_id or not str(player_id).strip():
            raise InputError("player_id must be a nonempty string")
        if problems is None:
            ids = list(testbed.PROBLEM_IDS)
            shuffle_seed = seed if seed is not None else random.SystemRandom().randrange(2**31)
            random.Random(shuffle_seed).shuffle(ids)
        else:
            ids = [str(p) for p in problems]
            for pid in ids:
                testbed.get_problem(pid)  # raises InputError for unknown ids
            if not ids:
                raise InputError("problem list must be nonempty")
            shuffle_seed = seed if seed is not None else 0
        state = SessionState(
            session_id=uuid.uuid4().hex, player_id=str(player_id), mode=mode,
            problem_ids=ids, shuffle_seed=shuffle_seed, budget=self.budget,
        )
        with self._lock:
            self._append_session_record(state)
            self._sessions[state.session_id] = state
        return state.snapshot()

    def _append_session_record(self, state: SessionState) -> None:
        rec = {
            "v": 1, "session_id": state.session_id, "player_id": state.player_id,
            "mode": state.mode, "problem_ids": state.problem_ids,
            "shuffle_seed": state.shuffle_seed, "budget": state.budget,
            "created_ts": time.time(),
        }
        with open(self.sessions_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def get_session(self, session_id: str) -> dict:
        with self._lock:
            state = self._sessions.get(session_id)
            if state is None:
                raise SessionNotFound(session_id)
            return state.snapshot()

    def submit_click(self, session_id: str, x) -> dict:
        """Validate, score, persist (append-before-respond), then respond."""
        x = np.asarray(x, dtype=float).ravel()
        with self._lock:
            state = self._sessions.get(session_id)
            if state is None:
                raise SessionNotFound(session_id)
            idx = state.current_index
            if idx is None:
                raise SessionStateError("session is finished")
            pid = state.problem_ids[idx]
            problem = testbed.get_problem(pid)
            if x.shape != (2,) or not problem.domain.contains(x):
                raise InputError(
                    f"click {x.tolist()} outside domain of {pid}: "
                    f"lower {list(problem.domain.lower)}, upper {list(problem.domain.upper)}"
                )
            score = problem.score(x)
            events = state.clicks.setdefault(pid, [])
            cum = (events[-1]["cum_score"] if events else 0.0) + score
            rec = click_record(
                session_id=state.session_id, player_id=state.player_id,
                problem_id=pid, mode=state.mode, click_index=len(events) + 1,
                x=x, score=score, cum_score=cum, ts=time.time(),
            )
            append_click_records(self.clicks_path, [rec])
            event = self._event_from_record(rec)
            events.append(event)

            remaining = state.budget - len(events)
            new_idx = state.current_index
            response = {
                "session_id": state.session_id,
                "problem_id": pid,
                "click": event,
                "remaining_shots": remaining,
                "problem_done": remaining == 0,
                "status": "finished" if state.finished else "active",
            }
            if remaining == 0 and new_idx is not None:
                response["next_problem_id"] = state.problem_ids[new_idx]
            return response

    def export_traces(self, player: str | None = None, problem: str | None = None,
                      since: float | None = None) -> list[Trace]:
        """Traces rebuilt from the append-only click log (not from memory)."""
        return read_traces(self.clicks_path, player=player, problem=problem, since=since)


# request bodies at module level: local classes would not survive the
# postponed-annotation resolution FastAPI performs on route signatures
class CreateSessionBody(BaseModel):
    player_id: str
    mode: int = 1
    problems: list[str] | None = None
    seed: int | None = None


class ClickBody(BaseModel):
    x1: float
    x2: float


def build_app(store: SessionStore):
    """FastAPI wiring over a SessionStore."""
    from fastapi import FastAPI, HTTPException
    from fastapi.responses import JSONResponse

    app = FastAPI(title="paretolab game service")

    @app.exception_handler(InputError)
    async def _input_error(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        return store.create_session(body.player_id, body.mode,
                                    problems=body.problems, seed=body.seed)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        try:
            return store.get_session(session_id)
        except SessionNotFound:
            raise HTTPException(status_code=404, detail="unknown session")

    @app.post("/sessions/{session_id}/clicks")
    def submit_click(session_id: str, body: ClickBody):
        try:
            return store.submit_click(session_id, [body.x1, body.x2])
        except SessionNotFound:
            raise HTTPException(status_code=404, detail="unknown session")
        except SessionStateError as exc:
            raise HTTPException(status_code=409, detail=str(exc))

    @app.get("/problems")
    def problems():
        # no optimum fields here: mode-1 clients must not see them
        return [
            {"problem_id": p.problem_id, "lower": list(p.domain.lower),
             "upper": list(p.domain.upper)}
            for p in testbed.list_problems()
        ]

    @app.get("/export")
    def export(player: str | None = None, problem: str | None = None):
        traces = store.export_traces(player=player, problem=problem)
        return {"traces": [t.to_dict() for t in traces]}

    return app


def serve(data_dir: Path | str, host: str = "127.0.0.1", port: int = 8000,
          budget: int = DEFAULT_BUDGET, ui_dir: Path | str | None = None) -> None:
    """Run the service until interrupted."""
    import uvicorn

    store = SessionStore(data_dir, budget=budget)
    app = build_app(store)
    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    uvicorn.run(app, host=host, port=port, log_level="info")
