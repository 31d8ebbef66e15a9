"""City weather behind a pluggable client, with a city-name gazetteer."""

from __future__ import annotations

import logging
from typing import Protocol

from . import ComponentRequest, ComponentResponse

log = logging.getLogger(__name__)

FALLBACK = ("Sorry, I am having trouble reaching the weather service right now. "
            "We could talk about something else.")


class WeatherClient(Protocol):
    def current(self, city: str) -> tuple[float, str] | None: ...


class FixtureWeatherClient:
    """Offline readings: city TAB temperature TAB conditions."""

    def __init__(self, readings: dict[str, tuple[float, str]]):
        self.readings = {k.lower(): v for k, v in readings.items()}

    @classmethod
    def load(cls, path: str) -> "FixtureWeatherClient":
        readings = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                city, temp, conditions = line.split("\t")
                readings[city.strip()] = (float(temp), conditions.strip())
        return cls(readings)

    def current(self, city: str) -> tuple[float, str] | None:
        return self.readings.get(city.lower())


def load_cities(path: str) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.strip().lower() for line in fh if line.strip() and not line.startswith("#")]


class Weather:
    def __init__(self, client: WeatherClient, cities: list[str]):
        self.client = client
        self.max_words = max((len(c.split()) for c in cities), default=1)
        self.cities = set(cities)

    def extract_city(self, tokens: list[str]) -> str | None:
        """Longest city-name match anywhere in the utterance."""
        for width in range(min(self.max_words, len(tokens)), 0, -1):
            for i in range(len(tokens) - width + 1):
                candidate = " ".join(tokens[i : i + width])
                if candidate in self.cities:
                    return candidate
        return None

    def respond(self, req: ComponentRequest) -> ComponentResponse:
        city = self.extract_city(req.tokens)
        if city is None:
            if req.sub_state == "awaiting_city":
                return ComponentResponse(
                    text="Sorry, I do not have weather information for that city.",
                    sub_state=None,
                )
            return ComponentResponse(
                text="Which city would you like the weather for?",
                sub_state="awaiting_city",
            )
        try:
            reading = self.client.current(city)
        except Exception as exc:
            log.warning("weather client failed for %r: %s", city, exc)
            return ComponentResponse(text=FALLBACK, sub_state=None)
        if reading is None:
            return ComponentResponse(
                text=f"Sorry, I do not have weather information for {city.title()}.",
                sub_state=None,
            )
        temp, conditions = reading
        return ComponentResponse(
            text=(f"Right now in {city.title()} it is {temp:g} degrees Fahrenheit "
                  f"with {conditions}."),
            sub_state=None,
        )
