"""Small-talk from wildcard templates (greetings, chit-chat, simple facts)."""

from __future__ import annotations

from dataclasses import dataclass

from ..textfeat import WILDCARD, match_wildcard, tokenize
from . import ComponentRequest, ComponentResponse

FALLBACK = "I am not sure what to say to that, but I am happy to chat. What would you like to talk about?"


@dataclass
class Template:
    pattern: list[str]
    response: str
    category: str = "chat"

    @property
    def wildcards(self) -> int:
        return self.pattern.count(WILDCARD)


class SmallTalk:
    def __init__(self, templates: list[Template]):
        self.templates = templates

    @classmethod
    def load(cls, path: str) -> "SmallTalk":
        """Template file: pattern TAB response [TAB category], one per line."""
        templates = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                pattern, response = parts[0], parts[1]
                category = parts[2] if len(parts) > 2 else "chat"
                templates.append(Template(pattern.split(), response, category))
        return cls(templates)

    def match(self, tokens: list[str]) -> tuple[Template, list[str]] | None:
        """First match by priority: exact, then fewest wildcards, then file order."""
        best: tuple[int, int, Template, list[str]] | None = None
        for order, template in enumerate(self.templates):
            captured = match_wildcard(template.pattern, tokens)
            if captured is None:
                continue
            key = (template.wildcards, order)
            if best is None or key < (best[0], best[1]):
                best = (template.wildcards, order, template, captured)
        if best is None:
            return None
        return best[2], best[3]

    def respond(self, req: ComponentRequest) -> ComponentResponse:
        hit = self.match(tokenize(req.resolved_text))
        if hit is None:
            return ComponentResponse(text=FALLBACK)
        template, captured = hit
        text = template.response.replace(WILDCARD, " ".join(captured)) if captured else template.response
        hint = "Greetings" if template.category == "greeting" else None
        return ComponentResponse(text=text, state_hint=hint)
