"""Question answering over a fixed QA-pair corpus by term-weight cosine."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..textfeat import fit_term_weights, tokenize, weigh
from . import ComponentRequest, ComponentResponse

FALLBACK = ("I am not sure about that one. We could talk about the news, movies, "
            "music, the weather, or I could tell you a joke instead.")

_QUESTION_WORDS = {"how", "what", "why", "when", "where", "who", "which", "can", "do", "does", "is", "are"}


@dataclass
class QaPair:
    question: str
    answer: str
    category: str = ""


class LiveQa:
    def __init__(self, pairs: list[QaPair], threshold: float = 0.2):
        self.pairs = pairs
        self.threshold = threshold
        docs = [tokenize(p.question) for p in pairs]
        self.model = fit_term_weights(docs) if docs else None
        self.question_matrix = (
            np.stack([weigh(self.model, d) for d in docs]) if docs else None
        )

    @classmethod
    def load(cls, path: str, threshold: float = 0.2) -> "LiveQa":
        """QA file: question TAB answer [TAB category], one per line."""
        pairs = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                pairs.append(QaPair(parts[0], parts[1], parts[2] if len(parts) > 2 else ""))
        return cls(pairs, threshold)

    def best_match(self, text: str) -> tuple[int, float] | None:
        """Index and similarity of the most similar stored question (lowest index wins ties)."""
        if not self.pairs:
            return None
        qv = weigh(self.model, tokenize(text))
        sims = self.question_matrix @ qv
        idx = int(np.argmax(sims))
        return idx, float(sims[idx])

    def respond(self, req: ComponentRequest) -> ComponentResponse:
        hit = self.best_match(req.resolved_text)
        if hit is None or hit[1] < self.threshold:
            return ComponentResponse(text=FALLBACK)
        hint = "InfoRequest" if req.tokens and req.tokens[0] in _QUESTION_WORDS else None
        return ComponentResponse(text=self.pairs[hit[0]].answer, state_hint=hint)
