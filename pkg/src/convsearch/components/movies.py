"""Movie lookups with the detail-field engagement loop.

First hit on a title offers related current releases and more details;
subsequent turns serve one requested field at a time from a shrinking
remaining-fields cache until the user declines.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..classifiers import IntentLabel
from ..textfeat import tokenize
from . import ComponentId, ComponentRequest, ComponentResponse, FollowupOffer

FIELD_ORDER = ["plot", "star", "producer", "rating", "director", "genre", "writer"]

NOT_FOUND = ("Sorry, I could not find information about that movie. "
             "You could give me another title, or we can switch topics.")


@dataclass
class MovieRecord:
    title: str
    fields: dict[str, str]
    current: bool = False  # current release vs catalog title


def _join_names(names: list[str]) -> str:
    if len(names) <= 1:
        return "".join(names)
    return ", ".join(names[:-1]) + ", and " + names[-1]


def _join_fields(names: list[str]) -> str:
    if len(names) <= 1:
        return "".join(names)
    return ", ".join(names[:-1]) + " and " + names[-1]


class Movies:
    def __init__(self, records: list[MovieRecord]):
        self.records = records
        self.by_title = {r.title.lower(): r for r in records}

    @classmethod
    def load(cls, path: str) -> "Movies":
        """Record per line: title TAB field=value;field=value... [;current]"""
        records = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                title, _, rest = line.partition("\t")
                fields: dict[str, str] = {}
                current = False
                for pair in rest.split(";"):
                    pair = pair.strip()
                    if pair == "current":
                        current = True
                    elif pair:
                        key, _, value = pair.partition("=")
                        fields[key.strip()] = value.strip()
                records.append(MovieRecord(title.strip(), fields, current))
        return cls(records)

    def find_title(self, tokens: list[str]) -> MovieRecord | None:
        """Exact title token-sequence match first, then longest contained title."""
        text = " ".join(tokens)
        if text in self.by_title:
            return self.by_title[text]
        best: MovieRecord | None = None
        for record in self.records:
            title_tokens = tokenize(record.title)
            width = len(title_tokens)
            for i in range(len(tokens) - width + 1):
                if tokens[i : i + width] == title_tokens:
                    if best is None or width > len(tokenize(best.title)):
                        best = record
                    break
        return best

    def related_current(self, record: MovieRecord) -> list[MovieRecord]:
        genre = record.fields.get("genre")
        return [
            r for r in self.records
            if r.current and r.title != record.title and r.fields.get("genre") == genre
        ]

    def available_fields(self, record: MovieRecord) -> list[str]:
        return [f for f in FIELD_ORDER if f in record.fields]

    def respond(self, req: ComponentRequest) -> ComponentResponse:
        if req.state_top == "Movies" and req.sub_state:
            return self._continue_loop(req)
        return self._open(req)

    def _open(self, req: ComponentRequest) -> ComponentResponse:
        record = self.find_title(req.tokens)
        if record is None:
            if any(t in ("movie", "movies", "film", "films") for t in req.tokens):
                return self._recent_list()
            return ComponentResponse(text=NOT_FOUND)

        mention = record.title.lower()
        related = self.related_current(record)
        parts = []
        if related:
            genre = record.fields.get("genre", "")
            parts.append(
                f"Here are some other recent {genre} movies like the {mention}. "
                f"{_join_names([r.title for r in related])}."
            )
        offer = FollowupOffer(
            prompt=f"I have more details about the movie {record.title}. Would you like to know about that?",
            route=ComponentId.Movies,
        )
        parts.append(offer.prompt)
        return ComponentResponse(
            text=" ".join(parts),
            followup_offer=offer,
            cache_updates={
                "movie.title": record.title,
                "movie.remaining_fields": self.available_fields(record),
            },
            sub_state="offered_details",
        )

    def _continue_loop(self, req: ComponentRequest) -> ComponentResponse:
        label = req.decision.final_label
        if req.sub_state == "offered_details":
            if label == IntentLabel.Negative:
                return self._offer_recent()
            title = req.cache.get("movie.title", "")
            remaining = list(req.cache.get("movie.remaining_fields", []))
            return ComponentResponse(
                text=(f"I have the following information about {title} on "
                      f"{_join_fields(remaining)}. Which information are you interested in?"),
                sub_state="awaiting_field_choice",
            )
        if req.sub_state == "awaiting_field_choice":
            return self._serve_field(req)
        if req.sub_state == "offered_recent":
            if label == IntentLabel.Negative:
                return ComponentResponse(text="OK, no problem.", sub_state=None)
            return self._recent_list()
        return self._open(req)

    def _serve_field(self, req: ComponentRequest) -> ComponentResponse:
        title = req.cache.get("movie.title", "")
        record = self.by_title.get(str(title).lower())
        remaining = list(req.cache.get("movie.remaining_fields", []))
        choice = next((f for f in remaining if f in req.tokens), None)
        if choice is None or record is None:
            if req.decision.final_label == IntentLabel.Negative:
                return self._offer_recent()
            return ComponentResponse(
                text=(f"I still have {_join_fields(remaining)} information about {title}. "
                      "Which would you like?"),
                sub_state="awaiting_field_choice",
            )
        remaining = [f for f in remaining if f != choice]
        served = f"Here is the {choice} information, {record.fields[choice]}."
        if remaining:
            return ComponentResponse(
                text=(f"{served} I still have {_join_fields(remaining)} information. "
                      "What information would you like?"),
                cache_updates={"movie.remaining_fields": remaining},
                sub_state="awaiting_field_choice",
            )
        return ComponentResponse(
            text=f"{served} That is everything I have about {record.title}.",
            cache_updates={"movie.remaining_fields": remaining},
            sub_state=None,
        )

    def _offer_recent(self) -> ComponentResponse:
        offer = FollowupOffer(
            prompt="OK, I still have information about the most recent movies. Would you like to hear about that?",
            route=ComponentId.Movies,
        )
        return ComponentResponse(text=offer.prompt, followup_offer=offer, sub_state="offered_recent")

    def _recent_list(self) -> ComponentResponse:
        current = [r.title for r in self.records if r.current]
        if not current:
            return ComponentResponse(text=NOT_FOUND)
        return ComponentResponse(
            text=(f"Some of the most recent movies are {_join_names(current)}. "
                  "Give me a title and I can tell you more."),
            sub_state=None,
        )
