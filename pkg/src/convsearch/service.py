"""FastAPI service wrapping the agent engine.

Plain JSON request/response bodies; one turn per POST. Sessions are
created, spoken to, rated (which finalizes them), and their logs and the
store-wide metrics can be fetched back.
"""

from __future__ import annotations

import threading
import time
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .config import ServiceConfig, load_config
from .engine import AgentEngine
from .errors import SessionFinalizedError, SessionNotFoundError


class CreateSessionResponse(BaseModel):
    session_id: str


class UtteranceRequest(BaseModel):
    text: str = Field(min_length=1, max_length=2000)


class UtteranceResponse(BaseModel):
    session_id: str
    turn_index: int
    text: str
    state_top: str
    state_sub: Optional[str] = None
    component: str
    suggestion: Optional[str] = None
    latency_ms: float


class RatingRequest(BaseModel):
    rating: int = Field(ge=1, le=5)
    feedback: Optional[str] = Field(default=None, max_length=4000)


class RatingResponse(BaseModel):
    session_id: str
    turn_count: int
    rating: Optional[int] = None
    feedback: Optional[str] = None


class TurnOut(BaseModel):
    turn_index: int
    user_text: str
    response_text: str
    component: str
    suggestion: Optional[str] = None


class SessionLogResponse(BaseModel):
    session_id: str
    turns: list[TurnOut]
    rating: Optional[int] = None
    feedback: Optional[str] = None
    finalized: bool


def create_app(config: ServiceConfig | None = None,
               engine: AgentEngine | None = None) -> FastAPI:
    config = config or load_config()
    engine = engine or AgentEngine.from_config(config)
    app = FastAPI(title="conversational search agent", version=__version__)
    app.state.engine = engine

    if config.allow_cors:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
        )

    sweep_lock = threading.Lock()
    last_sweep = {"ms": 0}

    def sweep_expired():
        now_ms = int(time.time() * 1000)
        with sweep_lock:
            if now_ms - last_sweep["ms"] < 30_000:
                return
            last_sweep["ms"] = now_ms
        engine.expire_idle_sessions(now_ms)

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/sessions", response_model=CreateSessionResponse)
    def create_session():
        sweep_expired()
        session = engine.new_session()
        return CreateSessionResponse(session_id=session.id)

    @app.post("/sessions/{session_id}/utterances", response_model=UtteranceResponse)
    def post_utterance(session_id: str, request: UtteranceRequest):
        try:
            result = engine.process_utterance(session_id, request.text)
        except SessionNotFoundError:
            raise HTTPException(status_code=404, detail="unknown session")
        except SessionFinalizedError:
            raise HTTPException(status_code=409, detail="session already finalized")
        return UtteranceResponse(
            session_id=result.session_id,
            turn_index=result.turn_index,
            text=result.text,
            state_top=result.state_top,
            state_sub=result.state_sub,
            component=result.component,
            suggestion=result.suggestion,
            latency_ms=result.latency_ms,
        )

    @app.post("/sessions/{session_id}/rating", response_model=RatingResponse)
    def post_rating(session_id: str, request: RatingRequest):
        try:
            summary = engine.rate_session(session_id, request.rating, request.feedback)
        except SessionNotFoundError:
            raise HTTPException(status_code=404, detail="unknown session")
        except SessionFinalizedError:
            raise HTTPException(status_code=409, detail="session already finalized")
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return RatingResponse(
            session_id=session_id,
            turn_count=summary.turn_count,
            rating=summary.rating,
            feedback=summary.feedback,
        )

    @app.get("/sessions/{session_id}/log", response_model=SessionLogResponse)
    def session_log(session_id: str):
        try:
            raw = engine.session_log(session_id)
        except SessionNotFoundError:
            raise HTTPException(status_code=404, detail="unknown session")
        return SessionLogResponse(
            session_id=session_id,
            turns=[
                TurnOut(
                    turn_index=t["turn_index"],
                    user_text=t["user_text"],
                    response_text=t["response_text"],
                    component=t["component"],
                    suggestion=t.get("suggestion"),
                )
                for t in raw["turns"]
            ],
            rating=raw["rating"],
            feedback=raw["feedback"],
            finalized=raw["finalized"],
        )

    @app.get("/metrics")
    def metrics():
        return engine.metrics_summary()

    return app
