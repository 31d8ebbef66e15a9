"""Uniform interface for the twelve retrieval components.

Components are pure functions of a ComponentRequest (a read-only view of
the session plus the routed decision): all session mutation flows back
through ComponentResponse.cache_updates / sub_state, never directly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping, Protocol

from ..entities import IntentDecision
from ..topics import TopicId


class ComponentId(str, Enum):
    SmallTalk = "smalltalk"
    News = "news"
    Wiki = "wiki"
    Weather = "weather"
    Joke = "joke"
    LiveQA = "liveqa"
    Movies = "movies"
    Music = "music"
    Opinion = "opinion"
    Food = "food"
    Transition = "transition"
    Unrecognized = "unrecognized"


@dataclass
class ComponentRequest:
    resolved_text: str
    tokens: list[str]
    decision: IntentDecision
    state_top: str
    sub_state: str | None
    cache: Mapping
    context: tuple[tuple[str, str], ...]
    rng: random.Random
    turn_index: int
    requested_topic: str | None = None  # set when a suggestion was accepted

    @classmethod
    def build(cls, resolved_text, tokens, decision, session, requested_topic=None):
        return cls(
            resolved_text=resolved_text,
            tokens=tokens,
            decision=decision,
            state_top=session.state.top,
            sub_state=session.state.sub,
            cache=MappingProxyType(session.cache_vars),
            context=tuple(session.context_vars),
            rng=session.rng,
            turn_index=session.turn_count + 1,
            requested_topic=requested_topic,
        )


@dataclass
class FollowupOffer:
    prompt: str
    route: ComponentId

    def __post_init__(self):
        if not self.prompt.rstrip().endswith("?"):
            raise ValueError("followup prompt must end with a question")


@dataclass
class ComponentResponse:
    text: str
    followup_offer: FollowupOffer | None = None
    cache_updates: dict = field(default_factory=dict)
    sub_state: str | None = None
    served_topic: TopicId | None = None
    state_hint: str | None = None  # refine the top state (Greetings, InfoRequest)

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("component response text must be non-empty")


class Component(Protocol):
    def respond(self, req: ComponentRequest) -> ComponentResponse: ...
