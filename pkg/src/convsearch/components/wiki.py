"""Encyclopedia summaries behind a pluggable client (offline fixture by default)."""

from __future__ import annotations

import logging
from typing import Protocol

from ..textfeat import tokenize
from . import ComponentRequest, ComponentResponse

log = logging.getLogger(__name__)

FALLBACK = ("Sorry, I am having trouble looking that up right now. "
            "We could talk about something else.")
NOT_FOUND = ("I could not find a good summary for that. "
             "Maybe ask me about something else?")

_QUESTION_PREFIXES = [
    ["who", "is"], ["who", "was"], ["what", "is"], ["what", "are"],
    ["tell", "me", "about"], ["tell", "me", "more", "about"],
    ["what", "do", "you", "know", "about"],
]


class WikiClient(Protocol):
    def summary(self, query: str) -> str | None: ...


class FixtureWikiClient:
    """Offline summaries: surface TAB summary, one per line."""

    def __init__(self, summaries: dict[str, str]):
        self.summaries = {k.lower(): v for k, v in summaries.items()}

    @classmethod
    def load(cls, path: str) -> "FixtureWikiClient":
        summaries = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                surface, _, summary = line.partition("\t")
                summaries[surface.strip()] = summary.strip()
        return cls(summaries)

    def summary(self, query: str) -> str | None:
        query = query.lower()
        if query in self.summaries:
            return self.summaries[query]
        tokens = tokenize(query)
        best = None
        for surface, text in sorted(self.summaries.items()):
            st = surface.split()
            for i in range(len(tokens) - len(st) + 1):
                if tokens[i : i + len(st)] == st:
                    if best is None or len(st) > len(best[0].split()):
                        best = (surface, text)
                    break
        return best[1] if best else None


def extract_query(req: ComponentRequest) -> str:
    if req.decision.entity is not None:
        return req.decision.entity.surface
    tokens = list(req.tokens)
    for prefix in sorted(_QUESTION_PREFIXES, key=len, reverse=True):
        if tokens[: len(prefix)] == prefix:
            tokens = tokens[len(prefix):]
            break
    return " ".join(tokens)


class Wiki:
    def __init__(self, client: WikiClient):
        self.client = client

    def respond(self, req: ComponentRequest) -> ComponentResponse:
        query = extract_query(req)
        try:
            summary = self.client.summary(query) if query else None
        except Exception as exc:
            log.warning("wiki client failed for %r: %s", query, exc)
            return ComponentResponse(text=FALLBACK)
        if not summary:
            return ComponentResponse(text=NOT_FOUND)
        return ComponentResponse(text=f"Here is what I got from Wikipedia. {summary}")
