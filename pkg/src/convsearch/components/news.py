"""News serving from ingested syndication feeds (RSS 2.0 and Atom).

Items are served newest-first per requested topic tag with a per-session
served-set so follow-ups never repeat an item.
"""

from __future__ import annotations

import email.utils
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime, timezone

from ..errors import IngestError
from ..topics import TopicId
from . import ComponentId, ComponentRequest, ComponentResponse, FollowupOffer

# Spoken lead-ins per topic tag; anything else gets the generic phrasing.
LEAD_PHRASES = {
    "space": "Here is the latest headline for science fans about outer space.",
    "celebrity": "Here is the latest headline about celebrities.",
}

TOPIC_ALIASES = {
    "cosmos": "space",
    "celebrities": "celebrity",
    "tech": "technology",
    "sports": "football",
    "medicine": "health",
}


@dataclass
class NewsItem:
    title: str
    summary: str
    source: str
    published: datetime
    topic: str = ""

    @property
    def key(self) -> str:
        return f"{self.source}|{self.title}"


def _parse_timestamp(text: str | None) -> datetime | None:
    if not text:
        return None
    text = text.strip()
    try:
        ts = email.utils.parsedate_to_datetime(text)
    except (TypeError, ValueError):
        ts = None
    if ts is None:
        try:
            ts = datetime.fromisoformat(text.replace("Z", "+00:00"))
        except ValueError:
            return None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _strip_ns(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def ingest_feed(raw: str | bytes) -> list[NewsItem]:
    """Parse one feed document into items, newest first.

    Entries without a title are dropped. Malformed XML raises IngestError
    with the byte offset of the failure; nothing is partially ingested.
    """
    if isinstance(raw, str):
        raw = raw.encode("utf-8")
    try:
        root = ET.fromstring(raw)
    except ET.ParseError as exc:
        line, column = exc.position
        offset = sum(len(l) + 1 for l in raw.split(b"\n")[: line - 1]) + column
        raise IngestError(f"unparseable feed document: {exc}", offset=offset) from exc

    kind = _strip_ns(root.tag)
    items: list[NewsItem] = []
    if kind == "rss":
        channel = root.find("channel")
        if channel is None:
            raise IngestError("rss document without a channel element")
        source = (channel.findtext("title") or "unknown").strip()
        for item in channel.findall("item"):
            title = (item.findtext("title") or "").strip()
            if not title:
                continue
            ts = _parse_timestamp(item.findtext("pubDate")) or datetime.now(timezone.utc)
            items.append(NewsItem(
                title=title,
                summary=(item.findtext("description") or "").strip(),
                source=source,
                published=ts,
                topic=(item.findtext("category") or "").strip().lower(),
            ))
    elif kind == "feed":
        children = {_strip_ns(c.tag): c for c in root}
        source = (children["title"].text or "unknown").strip() if "title" in children else "unknown"
        for entry in root:
            if _strip_ns(entry.tag) != "entry":
                continue
            fields = {_strip_ns(c.tag): c for c in entry}
            title = (fields["title"].text or "").strip() if "title" in fields else ""
            if not title:
                continue
            ts = None
            for stamp in ("updated", "published"):
                if stamp in fields:
                    ts = _parse_timestamp(fields[stamp].text)
                    if ts:
                        break
            category = fields["category"].get("term", "") if "category" in fields else ""
            items.append(NewsItem(
                title=title,
                summary=(fields["summary"].text or "").strip() if "summary" in fields else "",
                source=source,
                published=ts or datetime.now(timezone.utc),
                topic=category.strip().lower(),
            ))
    else:
        raise IngestError(f"unsupported feed root element <{kind}>")

    items.sort(key=lambda i: i.published, reverse=True)
    return items


class NewsStore:
    """Immutable snapshot of ingested items; refresh swaps the whole list."""

    def __init__(self, items: list[NewsItem] | None = None):
        self.items: list[NewsItem] = sorted(
            items or [], key=lambda i: i.published, reverse=True
        )

    def ingest(self, raw: str | bytes) -> int:
        new_items = ingest_feed(raw)  # raises before any mutation
        self.items = sorted(self.items + new_items, key=lambda i: i.published, reverse=True)
        return len(new_items)

    def replace(self, items: list[NewsItem]):
        self.items = sorted(items, key=lambda i: i.published, reverse=True)

    def matching(self, topic: str | None) -> list[NewsItem]:
        if not topic:
            return self.items
        return [i for i in self.items if i.topic == topic]


class News:
    def __init__(self, store: NewsStore):
        self.store = store

    def _requested_topic(self, req: ComponentRequest) -> str | None:
        if req.requested_topic:
            return req.requested_topic
        known = {i.topic for i in self.store.items if i.topic}
        for token in req.tokens:
            token = TOPIC_ALIASES.get(token, token)
            if token in known:
                return token
        if req.sub_state == "offering_more":
            cached = req.cache.get("news.topic")
            return str(cached) if cached else None
        return None

    def respond(self, req: ComponentRequest) -> ComponentResponse:
        from ..classifiers import IntentLabel

        if not self.store.items:
            return ComponentResponse(
                text="I do not have any news at the moment. We could talk about something else."
            )
        if (req.sub_state == "offering_more"
                and req.decision.final_label == IntentLabel.Negative
                and not req.requested_topic):
            return ComponentResponse(text="OK, no problem.", sub_state=None)
        topic = self._requested_topic(req)
        served = set(req.cache.get("news.served", []))
        candidates = [i for i in self.store.matching(topic) if i.key not in served]
        if not candidates:
            where = f" about {topic}" if topic else ""
            return ComponentResponse(
                text=(f"That is all the news I have{where} for now. "
                      "We could try another topic."),
                sub_state=None,
            )
        item = candidates[0]
        lead = LEAD_PHRASES.get(
            item.topic, f"Here is the latest headline about {item.topic}." if item.topic
            else "Here is the latest headline."
        )
        offer = FollowupOffer(prompt="Would you like another one?", route=ComponentId.News)
        summary = f" {item.summary}" if item.summary else ""
        try:
            served_topic = TopicId(item.topic.capitalize()) if item.topic else None
        except ValueError:
            served_topic = None
        return ComponentResponse(
            text=f"{lead} {item.title}.{summary} {offer.prompt}",
            followup_offer=offer,
            cache_updates={
                "news.served": sorted(served | {item.key}),
                "news.topic": topic or "",
            },
            sub_state="offering_more",
            served_topic=served_topic,
        )
