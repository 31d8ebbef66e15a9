"""Proactive conversation transitions: hot topic recommendations from
entities, topics reminders after repeated refusals, Suggestion-state
dispositions, and final response composition.
"""

from __future__ import annotations

from dataclasses import dataclass

from .classifiers import IntentLabel
from .dialogue import Session
from .entities import EntityMention, IntentDecision
from .topics import TOPIC_ORDER, EntityTopicMap, TopicId

DEFAULT_REMINDER_THRESHOLD = 2
DEFAULT_SUGGESTION_GAP = 2
DEFAULT_MAX_RESPONSE_CHARS = 800

# Spoken topic names inside suggestion prompts.
_TOPIC_PHRASES = {TopicId.Space: "Cosmos and outer space"}


def topic_phrase(topic: TopicId) -> str:
    return _TOPIC_PHRASES.get(topic, topic.value.lower())


@dataclass
class Suggestion:
    topic: TopicId
    prompt: str
    origin: str  # entity_related | random | reminder


def make_suggestion(topic: TopicId, origin: str) -> Suggestion:
    prompt = f"I have something interesting about {topic_phrase(topic)}, would you like to hear about it?"
    return Suggestion(topic, prompt, origin)


def recommend_topic(session: Session, last_entity: EntityMention | None,
                    topic_map: EntityTopicMap) -> Suggestion | None:
    """Entity-related topic when possible, else a session-seeded random one.

    The chosen topic is marked as offered; a topic is never suggested twice
    in one session, and None is returned once all twelve were offered.
    """
    topic = None
    origin = "random"
    if last_entity is not None and last_entity.description:
        mapped = topic_map.topic_for_description(last_entity.description)
        if mapped is not None and mapped not in session.offered_topics:
            topic, origin = mapped, "entity_related"
    if topic is None:
        unoffered = [t for t in TOPIC_ORDER if t not in session.offered_topics]
        if not unoffered:
            return None
        topic = session.rng.choice(unoffered)
        origin = "random"
    session.offered_topics.add(topic)
    return make_suggestion(topic, origin)


def register_refusal(session: Session,
                     threshold: int = DEFAULT_REMINDER_THRESHOLD) -> str:
    """Count a refusal; at the threshold return "reminder" and reset the count."""
    session.refusal_count += 1
    if session.refusal_count >= threshold:
        session.refusal_count = 0
        return "reminder"
    return "continue"


def build_reminder(session: Session) -> str:
    """List the not-yet-discussed topics in fixed order, ending with a choice."""
    remaining = [t.value for t in TOPIC_ORDER if t not in session.discussed_topics]
    if not remaining:
        return "We have been through all my topics. Is there anything you would like to revisit?"
    listing = ", ".join(remaining)
    return f"Here are the topics I can talk about: {listing}. Which one would you like?"


def handle_suggestion_state(session: Session,
                            decision: IntentDecision) -> tuple[str, object]:
    """Disposition of an utterance while a suggestion is pending.

    Positive accepts the pending topic, Negative refuses, and any other
    label redirects to that label's component. Exactly one disposition
    applies to each of the 14 labels.
    """
    pending: Suggestion | None = session.pending_suggestion  # type: ignore[assignment]
    label = decision.final_label
    if pending is not None and label == IntentLabel.Positive:
        return "accept", pending.topic
    if pending is not None and label == IntentLabel.Negative:
        return "refuse", None
    return "redirect", label


def compose_response(component_text: str, suggestion: Suggestion | None,
                     max_chars: int = DEFAULT_MAX_RESPONSE_CHARS) -> str:
    """Component text plus an optional suggestion prompt, length-capped.

    Overlong component text is truncated at a sentence boundary before the
    prompt is appended, so a present suggestion always ends the response
    with exactly one trailing question.
    """
    if suggestion is None:
        if len(component_text) <= max_chars:
            return component_text
        return _truncate_at_sentence(component_text, max_chars)
    budget = max_chars - len(suggestion.prompt) - 1
    text = component_text
    if len(text) > budget:
        text = _truncate_at_sentence(text, budget)
    return f"{text} {suggestion.prompt}"


def _truncate_at_sentence(text: str, budget: int) -> str:
    cut = text[: max(budget, 0)]
    boundary = max(cut.rfind("."), cut.rfind("!"), cut.rfind("?"))
    if boundary > 0:
        return cut[: boundary + 1]
    return cut.rstrip()
