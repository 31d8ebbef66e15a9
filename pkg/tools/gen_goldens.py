#!/usr/bin/env python3
"""Regenerate the golden transcript files under tests/golden/.

Run after changing fixtures, templates, or the training corpus:
python3 tools/gen_goldens.py
"""

import tempfile
from pathlib import Path

from convsearch.config import load_config
from convsearch.engine import AgentEngine, train_general_model
from convsearch.logstore import LogStore

GOLDEN_DIR = Path(__file__).resolve().parent.parent / "tests" / "golden"

MOVIES_SEED = 101
MOVIES_TURNS = [
    "Let's talk about Wonder Woman.",
    "Yes please.",
    "Tell me about the rating.",
    "Director information.",
    "None of them.",
    "No thanks, tell me some recent jazz music instead.",
]

PROACTIVITY_SEED = 202
PROACTIVITY_TURNS = [
    "I'm doing great. Let's talk about Mars",
    "Sure, tell me about that.",
    "Who is Jim Bridenstine?",
    "I love celebrity news. Tell me something about it",
]


def render(engine: AgentEngine, seed: int, turns: list[str]) -> str:
    session = engine.new_session(seed=seed)
    lines = []
    for text in turns:
        response = engine.process_utterance(session.id, text)
        lines.append(f"U: {text}")
        lines.append(f"A: {response.text}")
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    config = load_config()
    featurizer, model = train_general_model(config)
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    for name, seed, turns in [
        ("movies_transcript.txt", MOVIES_SEED, MOVIES_TURNS),
        ("proactivity_transcript.txt", PROACTIVITY_SEED, PROACTIVITY_TURNS),
    ]:
        engine = AgentEngine(config, featurizer, model,
                             LogStore(tempfile.mkdtemp()))
        (GOLDEN_DIR / name).write_text(render(engine, seed, turns))
        print(f"wrote {GOLDEN_DIR / name}")
