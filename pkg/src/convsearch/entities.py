"""Second-level (entity) classification.

Detect entity mentions via greedy longest gazetteer match, resolve a type
description through a knowledge client, and map the description to a topic
profile by term-weight cosine similarity. When the override condition
holds, the entity-derived label replaces the general classifier's label.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .classifiers import ClassifierModel, IntentLabel, predict
from .errors import DimensionError
from .textfeat import Featurizer, fit_term_weights, tokenize, weigh
from .topics import TopicId

log = logging.getLogger(__name__)

# General labels that yield to an entity-derived label even at high confidence.
OVERRIDABLE_LABELS = frozenset(
    {IntentLabel.Transition, IntentLabel.Unrecognized, IntentLabel.SmallTalk, IntentLabel.Wiki}
)

# Profile labels are their own namespace (Movie vs the Movies intent; bare
# topic names route to News with the topic's feed tag).
_PROFILE_INTENTS: dict[str, IntentLabel] = {
    "Music": IntentLabel.Music,
    "Movie": IntentLabel.Movies,
    "Movies": IntentLabel.Movies,
    "News": IntentLabel.News,
    "Wiki": IntentLabel.Wiki,
    "Weather": IntentLabel.Weather,
    "Food": IntentLabel.Food,
    "Joke": IntentLabel.Joke,
}


def profile_route(profile_label: str) -> tuple[IntentLabel, TopicId | None] | None:
    """Routing intent (and topic tag, for bare topic labels) for a profile label."""
    if profile_label in _PROFILE_INTENTS:
        return _PROFILE_INTENTS[profile_label], None
    try:
        topic = TopicId(profile_label)
    except ValueError:
        return None
    return IntentLabel.News, topic


@dataclass
class EntityMention:
    surface: str
    span: tuple[int, int]  # [start, end) token indices
    description: str = ""
    source: str = "gazetteer"


class KnowledgeClient(Protocol):
    def lookup(self, surface: str) -> tuple[str, float] | None: ...


class Gazetteer:
    """Offline surface -> description store; the default knowledge client."""

    def __init__(self, entries: dict[str, str]):
        self.entries = {k.lower(): v for k, v in entries.items()}
        self._by_length: dict[int, set[str]] = {}
        self.max_words = 1
        for surface in self.entries:
            n = len(surface.split())
            self.max_words = max(self.max_words, n)
            self._by_length.setdefault(n, set()).add(surface)

    @classmethod
    def load(cls, path: str) -> "Gazetteer":
        entries: dict[str, str] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                surface, _, description = line.partition("\t")
                entries[surface.strip()] = description.strip()
        return cls(entries)

    def lookup(self, surface: str) -> tuple[str, float] | None:
        description = self.entries.get(surface.lower())
        if description:
            return description, 1.0
        return None

    def contains(self, words: list[str]) -> bool:
        return " ".join(words) in self.entries


class RemoteKnowledgeClient:
    """HTTP knowledge endpoint with bounded timeout and silent gazetteer fallback."""

    def __init__(self, url: str, fallback: Gazetteer, timeout: float = 2.0):
        self.url = url
        self.fallback = fallback
        self.timeout = timeout

    def lookup(self, surface: str) -> tuple[str, float] | None:
        import httpx

        try:
            resp = httpx.get(self.url, params={"q": surface}, timeout=self.timeout)
            resp.raise_for_status()
            payload = resp.json()
            description = payload.get("description")
            if description:
                return str(description), float(payload.get("confidence", 1.0))
        except Exception:
            log.debug("knowledge endpoint failed for %r; using gazetteer", surface)
        return self.fallback.lookup(surface)


def detect_entities(tokens: list[str], gazetteer: Gazetteer) -> list[EntityMention]:
    """Greedy longest-match, left to right, non-overlapping, case-insensitive."""
    mentions: list[EntityMention] = []
    i = 0
    n = len(tokens)
    while i < n:
        matched = None
        for width in range(min(gazetteer.max_words, n - i), 0, -1):
            candidate = " ".join(tokens[i : i + width])
            if candidate in gazetteer.entries:
                matched = EntityMention(
                    surface=candidate,
                    span=(i, i + width),
                    description=gazetteer.entries[candidate],
                )
                break
        if matched:
            mentions.append(matched)
            i = matched.span[1]
        else:
            i += 1
    return mentions


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DimensionError(f"cosine: lengths {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


@dataclass
class TopicProfile:
    label: str
    profile_text: str


def load_profiles(path: str) -> list[TopicProfile]:
    profiles: list[TopicProfile] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            label, _, text = line.partition("\t")
            profiles.append(TopicProfile(label.strip(), text.strip()))
    return profiles


def classify_entity(description: str, profiles: list[TopicProfile],
                    threshold: float) -> str | None:
    """Most similar profile by term-weight cosine, or None below threshold.

    Term weights are fit locally over the profile texts plus the description;
    ties break toward the earlier profile.
    """
    if not profiles:
        return None
    docs = [tokenize(p.profile_text) for p in profiles]
    query = tokenize(description)
    model = fit_term_weights(docs + [query] if query else docs)
    qv = weigh(model, query)
    best_idx, best_sim = -1, -1.0
    for i, doc in enumerate(docs):
        sim = cosine(qv, weigh(model, doc))
        if sim > best_sim:  # ties keep the earlier profile
            best_idx, best_sim = i, sim
    if best_idx < 0 or best_sim <= 0 or best_sim < threshold:
        return None
    return profiles[best_idx].label


@dataclass
class IntentDecision:
    general_label: IntentLabel
    general_scores: list[float]
    entity: EntityMention | None
    final_label: IntentLabel
    overridden: bool
    profile_label: str | None = None
    topic_hint: TopicId | None = None
    mentions: list[EntityMention] = field(default_factory=list)
    entity_error: str | None = None

    def to_dict(self) -> dict:
        return {
            "general_label": self.general_label.value,
            "final_label": self.final_label.value,
            "overridden": self.overridden,
            "top_score": max(self.general_scores) if self.general_scores else 0.0,
            "entity": self.entity.surface if self.entity else None,
            "profile_label": self.profile_label,
            "topic_hint": self.topic_hint.value if self.topic_hint else None,
        }


@dataclass
class HierarchicalConfig:
    similarity_threshold: float = 0.3
    override_confidence: float = 0.5


def hierarchical_classify(text: str, featurizer: Featurizer, general_model: ClassifierModel,
                          knowledge: KnowledgeClient, gazetteer: Gazetteer,
                          profiles: list[TopicProfile],
                          config: HierarchicalConfig | None = None) -> IntentDecision:
    """General classifier first; a resolved entity may override the label.

    Override applies when the general label is transitional/vague
    (Transition, Unrecognized, SmallTalk, Wiki) or under-confident. A failing
    knowledge client never fails the decision; the error is recorded.
    """
    config = config or HierarchicalConfig()
    tokens = tokenize(text)
    general_label, scores = predict(general_model, featurizer.featurize(text))
    decision = IntentDecision(
        general_label=general_label,
        general_scores=[float(s) for s in scores],
        entity=None,
        final_label=general_label,
        overridden=False,
    )

    mentions = detect_entities(tokens, gazetteer)
    decision.mentions = mentions
    if not mentions:
        return decision

    first = mentions[0]
    try:
        resolved = knowledge.lookup(first.surface)
    except Exception as exc:  # a knowledge failure must not fail the turn
        decision.entity_error = str(exc)
        return decision
    if resolved is None:
        return decision
    first.description, _ = resolved
    decision.entity = first

    eligible = (
        general_label in OVERRIDABLE_LABELS
        or float(max(scores)) < config.override_confidence
    )
    if not eligible:
        return decision

    profile_label = classify_entity(first.description, profiles, config.similarity_threshold)
    if profile_label is None:
        return decision
    route = profile_route(profile_label)
    if route is None:
        return decision
    final_label, topic = route
    decision.profile_label = profile_label
    decision.topic_hint = topic
    decision.final_label = final_label
    decision.overridden = final_label != general_label
    return decision
