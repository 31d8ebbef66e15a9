"""Utterance featurization: lexical term weights, embedding averages,
and syntactic wildcard patterns, concatenated into one vector.

The three blocks are computed independently and concatenated in fixed
order lexical | semantic | syntactic, so classifier feature widths are
stable for a given set of fitted/loaded models.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

# Lowercased words, keeping intra-word apostrophes ("let's" stays whole).
_TOKEN_RE = re.compile(r"[a-z0-9]+(?:'[a-z0-9]+)*")

WILDCARD = "X"


def tokenize(text: str) -> list[str]:
    """Lowercase and split on whitespace/punctuation except intra-word apostrophes."""
    return _TOKEN_RE.findall(text.lower())


@dataclass
class Utterance:
    text: str
    timestamp: int = 0
    turn_index: int = 0

    def tokens(self) -> list[str]:
        return tokenize(self.text)


@dataclass
class TermWeightModel:
    """tf * idf weights with idf(t) = ln((1+N)/(1+df(t))) + 1, L2-normalized output."""

    vocabulary: dict[str, int]
    doc_frequency: dict[str, int]
    doc_count: int

    def idf(self, term: str) -> float:
        df = self.doc_frequency.get(term)
        if df is None:
            return 0.0
        return math.log((1 + self.doc_count) / (1 + df)) + 1.0

    @property
    def width(self) -> int:
        return len(self.vocabulary)


def fit_term_weights(corpus: list[list[str]]) -> TermWeightModel:
    """Fit vocabulary and document frequencies over a tokenized corpus."""
    if not corpus:
        raise ConfigurationError("term-weight fit requires a non-empty corpus")
    doc_frequency: dict[str, int] = {}
    for doc in corpus:
        for term in set(doc):
            doc_frequency[term] = doc_frequency.get(term, 0) + 1
    vocabulary = {term: i for i, term in enumerate(sorted(doc_frequency))}
    return TermWeightModel(vocabulary, doc_frequency, len(corpus))


def weigh(model: TermWeightModel, tokens: list[str]) -> np.ndarray:
    """Dense tf-idf vector over the model vocabulary, L2-normalized (or all-zero)."""
    vec = np.zeros(model.width)
    for token in tokens:
        col = model.vocabulary.get(token)
        if col is not None:
            vec[col] += model.idf(token)
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec /= norm
    return vec


@dataclass
class EmbeddingTable:
    dimension: int
    vectors: dict[str, np.ndarray]

    @classmethod
    def load(cls, path: str) -> "EmbeddingTable":
        """Read a plain-text table: token followed by D space-separated decimals."""
        vectors: dict[str, np.ndarray] = {}
        dimension = 0
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                parts = line.split()
                if not parts:
                    continue
                token, values = parts[0], parts[1:]
                vec = np.array([float(v) for v in values])
                if dimension == 0:
                    dimension = len(vec)
                elif len(vec) != dimension:
                    raise ConfigurationError(
                        f"{path}:{lineno}: embedding width {len(vec)} != {dimension}"
                    )
                vectors[token] = vec
        if dimension == 0:
            raise ConfigurationError(f"{path}: empty embedding table")
        return cls(dimension, vectors)


def embed_average(table: EmbeddingTable, tokens: list[str]) -> np.ndarray:
    """Arithmetic mean of in-vocabulary token vectors; zero vector when none."""
    hits = [table.vectors[t] for t in tokens if t in table.vectors]
    if not hits:
        return np.zeros(table.dimension)
    return np.mean(hits, axis=0)


@dataclass
class PatternRule:
    """Wildcard template: literal tokens plus at most one multi-token wildcard."""

    id: str
    template: list[str]
    flag_index: int

    def __post_init__(self):
        if self.template.count(WILDCARD) > 1:
            raise ConfigurationError(f"rule {self.id}: more than one wildcard")


def match_wildcard(template: list[str], tokens: list[str]) -> list[str] | None:
    """Match the full token list against the template.

    Returns the tokens absorbed by the wildcard (empty list for literal-only
    templates) or None; the wildcard must absorb at least one token.
    """
    if WILDCARD not in template:
        return [] if tokens == template else None
    at = template.index(WILDCARD)
    head, tail = template[:at], template[at + 1 :]
    captured = len(tokens) - len(head) - len(tail)
    if captured < 1:
        return None
    if tokens[: len(head)] != head:
        return None
    if tail and tokens[-len(tail) :] != tail:
        return None
    return tokens[len(head) : len(head) + captured]


def load_pattern_rules(path: str) -> list[PatternRule]:
    """Read the rule config: one rule per line, id TAB template."""
    rules: list[PatternRule] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rule_id, _, template = line.partition("\t")
            if not template:
                raise ConfigurationError(f"{path}: bad rule line: {line!r}")
            rules.append(PatternRule(rule_id.strip(), template.split(), len(rules)))
    return rules


def match_patterns(rules: list[PatternRule], tokens: list[str]) -> np.ndarray:
    flags = np.zeros(len(rules))
    for rule in rules:
        if match_wildcard(rule.template, tokens) is not None:
            flags[rule.flag_index] = 1.0
    return flags


@dataclass
class FeatureVector:
    lexical: np.ndarray
    semantic: np.ndarray
    syntactic: np.ndarray

    def concat(self) -> np.ndarray:
        return np.concatenate([self.lexical, self.semantic, self.syntactic])

    @property
    def width(self) -> int:
        return len(self.lexical) + len(self.semantic) + len(self.syntactic)


@dataclass
class Featurizer:
    """Bundle of the three sub-models; immutable after construction."""

    term_weights: TermWeightModel
    embeddings: EmbeddingTable
    rules: list[PatternRule] = field(default_factory=list)

    @property
    def width(self) -> int:
        return self.term_weights.width + self.embeddings.dimension + len(self.rules)

    def featurize(self, utterance: Utterance | str) -> FeatureVector:
        text = utterance.text if isinstance(utterance, Utterance) else utterance
        tokens = tokenize(text)
        return FeatureVector(
            lexical=weigh(self.term_weights, tokens),
            semantic=embed_average(self.embeddings, tokens),
            syntactic=match_patterns(self.rules, tokens),
        )
