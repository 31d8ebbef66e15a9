"""Music charts and artist lookups from a fixture store (no field loop)."""

from __future__ import annotations

from dataclasses import dataclass

from ..textfeat import tokenize
from . import ComponentRequest, ComponentResponse

NOT_FOUND = ("I could not find that artist. I can list some songs people are "
             "listening to right now if you like.")


@dataclass
class ChartEntry:
    rank: int
    title: str
    artist: str
    genre: str = ""


class Music:
    def __init__(self, chart: list[ChartEntry], artists: dict[str, str], top_n: int = 5):
        self.chart = sorted(chart, key=lambda e: e.rank)
        self.artists = {k.lower(): v for k, v in artists.items()}
        self.top_n = top_n

    @classmethod
    def load(cls, path: str) -> "Music":
        """Store file with two record kinds:
        chart TAB rank TAB title TAB artist [TAB genre]
        artist TAB name TAB blurb
        """
        chart: list[ChartEntry] = []
        artists: dict[str, str] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if parts[0] == "chart":
                    chart.append(ChartEntry(
                        rank=int(parts[1]), title=parts[2], artist=parts[3],
                        genre=parts[4].lower() if len(parts) > 4 else "",
                    ))
                elif parts[0] == "artist":
                    artists[parts[1]] = parts[2]
        return cls(chart, artists)

    def find_artist(self, tokens: list[str]) -> str | None:
        best = None
        for name in sorted(self.artists):
            nt = name.split()
            for i in range(len(tokens) - len(nt) + 1):
                if tokens[i : i + len(nt)] == nt:
                    if best is None or len(nt) > len(best.split()):
                        best = name
                    break
        return best

    def _chart_text(self, genre: str | None) -> str:
        entries = [e for e in self.chart if e.genre == genre] if genre else self.chart
        entries = entries[: self.top_n]
        listing = "; ".join(f"{e.title} by {e.artist}" for e in entries)
        what = f"recent {genre} songs" if genre else "songs people are listening to right now"
        return f"Here are some {what}: {listing}."

    def respond(self, req: ComponentRequest) -> ComponentResponse:
        artist = self.find_artist(req.tokens)
        if artist:
            return ComponentResponse(text=self.artists[artist])
        genres = {e.genre for e in self.chart if e.genre}
        requested = next((t for t in req.tokens if t in genres), None)
        if not self.chart:
            return ComponentResponse(text=NOT_FOUND)
        return ComponentResponse(text=self._chart_text(requested))
