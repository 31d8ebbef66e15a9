#!/usr/bin/env python3
"""Regenerate the checked-in embedding fixture table.

Collects every token that can appear in the synthetic corpus or the fixture
data files and writes a seeded 50-dimension embedding per token. Run from
the repo root: python3 tools/gen_embeddings.py
"""

from pathlib import Path

from convsearch import synthetic
from convsearch.textfeat import tokenize

DATA = Path(__file__).resolve().parent.parent / "src" / "convsearch" / "data"


def collect_tokens() -> set[str]:
    tokens: set[str] = set()
    for templates in synthetic.TEMPLATES.values():
        for template in templates:
            tokens.update(t for t in tokenize(template) if t != "x")
    for fillers in synthetic.FILLERS.values():
        for filler in fillers:
            tokens.update(tokenize(filler))
    for name in ("gazetteer.tsv", "profiles.tsv", "smalltalk.tsv", "movies.tsv",
                 "recipes.tsv", "qa.tsv", "music.tsv", "wiki.tsv", "weather.tsv",
                 "cities.txt", "jokes.txt", "entity_topics.tsv"):
        for line in (DATA / name).read_text().splitlines():
            if not line.startswith("#"):
                tokens.update(tokenize(line))
    return tokens


if __name__ == "__main__":
    tokens = collect_tokens()
    out = DATA / "embeddings.txt"
    synthetic.write_embedding_fixture(str(out), tokens, dim=50, seed=3)
    print(f"wrote {len(tokens)} embeddings to {out}")
