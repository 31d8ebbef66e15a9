"""Service configuration: defaults ship with the package, a JSON config
file overrides them, and CONVSEARCH_* environment variables override both.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path

from .errors import ConfigurationError


def packaged_data_dir() -> Path:
    return Path(str(resources.files("convsearch").joinpath("data")))


@dataclass
class ServiceConfig:
    master_seed: int = 10
    similarity_threshold: float = 0.3
    override_confidence: float = 0.5
    switch_confidence: float = 0.6
    liveqa_threshold: float = 0.2
    reminder_threshold: int = 2
    suggestion_gap_turns: int = 2
    max_response_chars: int = 800
    stack_bound: int = 20
    session_idle_seconds: float = 1800.0
    host: str = "127.0.0.1"
    port: int = 8000
    allow_cors: bool = False
    log_dir: str = "logs"
    model_path: str = ""
    data_dir: str = ""  # empty -> packaged fixture data
    knowledge_endpoint: str = ""
    knowledge_timeout_seconds: float = 2.0
    feed_refresh_seconds: float = 0.0  # 0 disables refresh (offline fixtures)
    train_per_class: int = 40
    train_rounds: int = 40
    train_depth: int = 3
    train_lr: float = 0.2
    train_seed: int = 7
    fixture_files: dict = field(default_factory=lambda: {
        "embeddings": "embeddings.txt",
        "patterns": "patterns.tsv",
        "gazetteer": "gazetteer.tsv",
        "profiles": "profiles.tsv",
        "entity_topics": "entity_topics.tsv",
        "smalltalk": "smalltalk.tsv",
        "movies": "movies.tsv",
        "recipes": "recipes.tsv",
        "qa": "qa.tsv",
        "jokes": "jokes.txt",
        "music": "music.tsv",
        "wiki": "wiki.tsv",
        "weather": "weather.tsv",
        "cities": "cities.txt",
        "feeds": "feeds",
    })

    def resolved_data_dir(self) -> Path:
        return Path(self.data_dir) if self.data_dir else packaged_data_dir()

    def fixture_path(self, name: str) -> Path:
        return self.resolved_data_dir() / self.fixture_files[name]

    def validate(self):
        for name in self.fixture_files:
            path = self.fixture_path(name)
            if not path.exists():
                raise ConfigurationError(f"missing fixture {name}: {path}")
        for threshold in ("similarity_threshold", "override_confidence",
                          "switch_confidence", "liveqa_threshold"):
            value = getattr(self, threshold)
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"{threshold} must be in [0, 1], got {value}")
        if self.reminder_threshold < 1 or self.suggestion_gap_turns < 0:
            raise ConfigurationError("reminder/suggestion thresholds out of range")
        return self


_ENV_PREFIX = "CONVSEARCH_"


def _coerce(raw: str, kind: type):
    if kind is bool:
        return raw.lower() in ("1", "true", "yes", "on")
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    if kind is dict:
        return json.loads(raw)
    return raw


def load_config(path: str | Path | None = None,
                overrides: dict | None = None) -> ServiceConfig:
    """Defaults plus optional JSON file plus environment overrides."""
    values: dict = {}
    default_file = packaged_data_dir() / "config.json"
    if default_file.exists():
        values.update(json.loads(default_file.read_text()))
    if path is not None:
        file_path = Path(path)
        if not file_path.exists():
            raise ConfigurationError(f"config file not found: {file_path}")
        values.update(json.loads(file_path.read_text()))
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})

    config_fields = {f.name: f.type for f in fields(ServiceConfig)}
    unknown = set(values) - set(config_fields)
    if unknown:
        raise ConfigurationError(f"unknown config keys: {', '.join(sorted(unknown))}")

    for f in fields(ServiceConfig):
        env = os.environ.get(_ENV_PREFIX + f.name.upper())
        if env is not None:
            kind = type(getattr(ServiceConfig(), f.name))
            values[f.name] = _coerce(env, kind)
    return ServiceConfig(**values)
