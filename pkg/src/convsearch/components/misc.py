"""Opinion deflection and the unrecognized-input repetition request."""

from __future__ import annotations

from . import ComponentRequest, ComponentResponse

OPINION_DEFLECTION = (
    "I would rather keep my opinions to myself on topics like that. "
    "I can tell you the latest news, or we could talk about movies or music instead."
)

REPETITION_REQUESTS = [
    "Sorry, I did not catch that. Could you say it again?",
    "I am having trouble understanding. Could you rephrase that?",
    "Apologies, I still did not get that. Could you try it with different words?",
]


class Opinion:
    """Always declines to take a stance; identical text for every input."""

    def respond(self, req: ComponentRequest) -> ComponentResponse:
        return ComponentResponse(text=OPINION_DEFLECTION)


class Unrecognized:
    """Rotates three repetition-request phrasings so repeats are not verbatim."""

    def respond(self, req: ComponentRequest) -> ComponentResponse:
        count = int(req.cache.get("unrecognized.count", 0))
        text = REPETITION_REQUESTS[count % len(REPETITION_REQUESTS)]
        return ComponentResponse(
            text=text,
            cache_updates={"unrecognized.count": count + 1},
        )
