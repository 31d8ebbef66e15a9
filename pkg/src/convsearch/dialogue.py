"""Dialogue state management: 14 top-level states with component sub-states,
a bounded stack of recent states for back-tracking, session variables, and
pronoun resolution against the most recently discussed entity.
"""

from __future__ import annotations

import random
import re
import secrets
import threading
import time
from dataclasses import dataclass, field
from enum import Enum

from .classifiers import SENTIMENT, IntentLabel
from .components import ComponentId
from .entities import IntentDecision
from .errors import SessionNotFoundError
from .topics import TopicId

DEFAULT_STACK_BOUND = 20


class StateTop(str, Enum):
    NewTopic = "NewTopic"
    Greetings = "Greetings"
    InfoRequest = "InfoRequest"
    Movies = "Movies"
    Music = "Music"
    News = "News"
    Wiki = "Wiki"
    Weather = "Weather"
    Joke = "Joke"
    LiveQA = "LiveQA"
    Opinion = "Opinion"
    Food = "Food"
    SmallTalk = "SmallTalk"
    Suggestion = "Suggestion"


@dataclass(frozen=True)
class DialogueStateId:
    top: str
    sub: str | None = None


# Label -> component; sentiment is handled by small-talk outside sub-states.
LABEL_COMPONENTS: dict[IntentLabel, ComponentId] = {
    IntentLabel.Positive: ComponentId.SmallTalk,
    IntentLabel.Negative: ComponentId.SmallTalk,
    IntentLabel.SmallTalk: ComponentId.SmallTalk,
    IntentLabel.News: ComponentId.News,
    IntentLabel.Wiki: ComponentId.Wiki,
    IntentLabel.Weather: ComponentId.Weather,
    IntentLabel.Joke: ComponentId.Joke,
    IntentLabel.LiveQA: ComponentId.LiveQA,
    IntentLabel.Movies: ComponentId.Movies,
    IntentLabel.Music: ComponentId.Music,
    IntentLabel.Opinion: ComponentId.Opinion,
    IntentLabel.Food: ComponentId.Food,
    IntentLabel.Transition: ComponentId.Transition,
    IntentLabel.Unrecognized: ComponentId.Unrecognized,
}

# Component -> top state it owns. Unrecognized keeps the current state (a
# repetition request should not lose the user's place); transition operates
# in the Suggestion state. Greetings/InfoRequest arrive via response hints.
COMPONENT_STATES: dict[ComponentId, StateTop | None] = {
    ComponentId.SmallTalk: StateTop.SmallTalk,
    ComponentId.News: StateTop.News,
    ComponentId.Wiki: StateTop.Wiki,
    ComponentId.Weather: StateTop.Weather,
    ComponentId.Joke: StateTop.Joke,
    ComponentId.LiveQA: StateTop.LiveQA,
    ComponentId.Movies: StateTop.Movies,
    ComponentId.Music: StateTop.Music,
    ComponentId.Opinion: StateTop.Opinion,
    ComponentId.Food: StateTop.Food,
    ComponentId.Transition: StateTop.Suggestion,
    ComponentId.Unrecognized: None,
}

STATE_COMPONENTS: dict[str, ComponentId] = {
    StateTop.SmallTalk.value: ComponentId.SmallTalk,
    StateTop.Greetings.value: ComponentId.SmallTalk,
    StateTop.News.value: ComponentId.News,
    StateTop.Wiki.value: ComponentId.Wiki,
    StateTop.Weather.value: ComponentId.Weather,
    StateTop.Joke.value: ComponentId.Joke,
    StateTop.LiveQA.value: ComponentId.LiveQA,
    StateTop.InfoRequest.value: ComponentId.LiveQA,
    StateTop.Movies.value: ComponentId.Movies,
    StateTop.Music.value: ComponentId.Music,
    StateTop.Opinion.value: ComponentId.Opinion,
    StateTop.Food.value: ComponentId.Food,
    StateTop.Suggestion.value: ComponentId.Transition,
}


@dataclass
class Session:
    id: str
    seed: int
    state: DialogueStateId = field(default_factory=lambda: DialogueStateId(StateTop.NewTopic.value))
    state_stack: list[DialogueStateId] = field(default_factory=list)
    cache_vars: dict = field(default_factory=dict)
    context_vars: list[tuple[str, str]] = field(default_factory=list)
    refusal_count: int = 0
    offered_topics: set[TopicId] = field(default_factory=set)
    discussed_topics: set[TopicId] = field(default_factory=set)
    rating: int | None = None
    feedback: str | None = None
    turn_count: int = 0
    pending_suggestion: object | None = None
    last_suggestion_turn: int | None = None
    created_ms: int = field(default_factory=lambda: int(time.time() * 1000))
    last_activity_ms: int = field(default_factory=lambda: int(time.time() * 1000))
    finalized: bool = False
    stack_bound: int = DEFAULT_STACK_BOUND

    def __post_init__(self):
        self.rng = random.Random(self.seed)

    def push_state(self, state: DialogueStateId):
        self.state_stack.append(state)
        if len(self.state_stack) > self.stack_bound:  # drop the oldest
            del self.state_stack[0]


def new_session(seed: int, session_id: str | None = None,
                stack_bound: int = DEFAULT_STACK_BOUND) -> Session:
    return Session(
        id=session_id or secrets.token_urlsafe(16),
        seed=seed,
        stack_bound=stack_bound,
    )


_PRONOUN_RE = re.compile(r"\b(he|she|him|her|it|they|them)\b", re.IGNORECASE)
LAST_ENTITY_KEY = "last_entity"


def resolve_coreference(session: Session, text: str) -> str:
    """Replace third-person pronouns with the most recent entity surface."""
    surface = session.cache_vars.get(LAST_ENTITY_KEY)
    if not surface:
        return text
    return _PRONOUN_RE.sub(str(surface), text)


def set_cache(session: Session, key: str, value) -> None:
    session.cache_vars[key] = value


def get_cache(session: Session, key: str):
    return session.cache_vars.get(key)


@dataclass
class RoutingResult:
    component: ComponentId
    resolved_text: str
    reason: str  # classifier | predefined_state | suggestion_redirect


def update_and_route(session: Session, decision: IntentDecision, resolved_text: str,
                     switch_confidence: float = 0.6) -> RoutingResult:
    """Pick the component for this turn; a pure function of (state, decision).

    Inside an active component sub-state the component keeps control unless
    the decision names a different component with an entity override or high
    confidence; sentiment and unrecognized labels never grab control.
    """
    if session.state.top == StateTop.Suggestion.value and session.pending_suggestion is not None:
        return RoutingResult(ComponentId.Transition, resolved_text, "suggestion_redirect")

    target = LABEL_COMPONENTS.get(decision.final_label, ComponentId.Unrecognized)
    owner = STATE_COMPONENTS.get(session.state.top)
    if session.state.sub and owner is not None and owner != ComponentId.Unrecognized:
        sticky = (
            target == owner
            or decision.final_label in SENTIMENT
            or decision.final_label == IntentLabel.Unrecognized
            or not (decision.overridden or max(decision.general_scores, default=0.0) >= switch_confidence)
        )
        if sticky:
            return RoutingResult(owner, resolved_text, "predefined_state")
    return RoutingResult(target, resolved_text, "classifier")


def apply_state_change(session: Session, component: ComponentId,
                       new_top: str | None, new_sub: str | None):
    """Commit the post-turn state; pushes the old state on any top change."""
    if new_top is None:
        new_top = session.state.top if COMPONENT_STATES[component] is None \
            else COMPONENT_STATES[component].value
    if new_top != session.state.top:
        session.push_state(session.state)
    session.state = DialogueStateId(new_top, new_sub)


def backtrack(session: Session) -> DialogueStateId:
    """Pop the most recent prior state; falls back to NewTopic when empty."""
    if session.state_stack:
        prior = session.state_stack.pop()
    else:
        prior = DialogueStateId(StateTop.NewTopic.value)
    session.state = prior
    return prior


class SessionStore:
    """In-memory session registry with per-session serialization."""

    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def add(self, session: Session):
        with self._registry_lock:
            self._sessions[session.id] = session
            self._locks[session.id] = threading.Lock()

    def get(self, session_id: str) -> Session:
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise SessionNotFoundError(session_id)
        return session

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            lock = self._locks.get(session_id)
        if lock is None:
            raise SessionNotFoundError(session_id)
        return lock

    def remove(self, session_id: str):
        with self._registry_lock:
            self._sessions.pop(session_id, None)
            self._locks.pop(session_id, None)

    def all_sessions(self) -> list[Session]:
        with self._registry_lock:
            return list(self._sessions.values())
