"""Session-seeded random jokes with no repeats until the pool is exhausted."""

from __future__ import annotations

from . import ComponentId, ComponentRequest, ComponentResponse, FollowupOffer


class Jokes:
    def __init__(self, jokes: list[str]):
        self.jokes = jokes

    @classmethod
    def load(cls, path: str) -> "Jokes":
        with open(path, encoding="utf-8") as fh:
            jokes = [line.strip() for line in fh if line.strip() and not line.startswith("#")]
        return cls(jokes)

    def respond(self, req: ComponentRequest) -> ComponentResponse:
        if not self.jokes:
            return ComponentResponse(text="I seem to be out of jokes today. Let's try another topic.")
        served = list(req.cache.get("joke.served", []))
        unserved = [i for i in range(len(self.jokes)) if i not in served]
        notice = ""
        if not unserved:  # wrap around with a notice
            notice = "You have heard all my jokes, so here is one more time around. "
            served = []
            unserved = list(range(len(self.jokes)))
        pick = req.rng.choice(unserved)
        offer = FollowupOffer(prompt="Would you like another one?", route=ComponentId.Joke)
        return ComponentResponse(
            text=f"{notice}{self.jokes[pick]} {offer.prompt}",
            followup_offer=offer,
            cache_updates={"joke.served": served + [pick]},
            sub_state="offering_more",
        )
