"""The twelve recommendation topics and the entity-description keyword map."""

from __future__ import annotations

from enum import Enum

from .errors import ConfigurationError
from .textfeat import tokenize


class TopicId(str, Enum):
    Basketball = "Basketball"
    Hockey = "Hockey"
    Soccer = "Soccer"
    Animal = "Animal"
    Football = "Football"
    Science = "Science"
    Baseball = "Baseball"
    Space = "Space"
    Health = "Health"
    Technology = "Technology"
    Celebrity = "Celebrity"
    Travel = "Travel"


TOPIC_ORDER: list[TopicId] = list(TopicId)

# News-feed tag serving each topic's content.
def topic_feed_tag(topic: TopicId) -> str:
    return topic.value.lower()


class EntityTopicMap:
    """Keyword associations from entity descriptions to recommendation topics."""

    def __init__(self, keyword_topics: dict[str, TopicId]):
        self.keyword_topics = keyword_topics

    @classmethod
    def load(cls, path: str) -> "EntityTopicMap":
        """One association per line: comma-separated keywords, tab, topic."""
        mapping: dict[str, TopicId] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                keywords, _, topic = line.partition("\t")
                if not topic:
                    raise ConfigurationError(f"{path}: bad map line: {line!r}")
                try:
                    topic_id = TopicId(topic.strip())
                except ValueError as exc:
                    raise ConfigurationError(f"{path}: unknown topic {topic!r}") from exc
                for kw in keywords.split(","):
                    kw = kw.strip().lower()
                    if kw:
                        mapping[kw] = topic_id
        missing = [t.value for t in TOPIC_ORDER if t not in set(mapping.values())]
        if missing:
            raise ConfigurationError(f"{path}: unreachable topics: {', '.join(missing)}")
        return cls(mapping)

    def topic_for_description(self, description: str) -> TopicId | None:
        """First keyword hit in token order wins."""
        for token in tokenize(description):
            topic = self.keyword_topics.get(token)
            if topic is not None:
                return topic
        return None
