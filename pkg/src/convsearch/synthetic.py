"""Seeded synthetic utterance corpora.

The original labeled interaction data is not distributable, so training
and evaluation datasets are generated from per-class utterance templates
with slot fillers. Everything is seeded for reproducibility; the labeled
dataset file format (label TAB text) round-trips through write/load.
"""

from __future__ import annotations

import random

from .classifiers import LABEL_ORDER, IntentLabel
from .errors import ConfigurationError

TEMPLATES: dict[IntentLabel, list[str]] = {
    IntentLabel.Positive: [
        "yes", "yes please", "sure", "sure tell me about that", "sounds good",
        "yes i would love that", "absolutely", "of course", "yeah", "okay",
        "okay sure", "that would be great", "go ahead", "yes tell me more",
        "i would like that", "please do", "yes that sounds interesting",
    ],
    IntentLabel.Negative: [
        "no", "no thanks", "nope", "none of them", "not really",
        "no thank you", "i do not think so", "not interested", "nah",
        "no i am good", "not now", "never mind", "no not that",
        "i would rather not", "skip that",
    ],
    IntentLabel.SmallTalk: [
        "hello", "hi", "hi there", "hey", "how are you", "how are you doing",
        "good morning", "good evening", "what is your name", "who are you",
        "nice to meet you", "i am doing great", "i'm doing great",
        "i am {feeling}", "thank you", "you are funny", "how is your day going",
        "goodbye", "bye", "see you later",
    ],
    IntentLabel.News: [
        "what is the news about {topic}", "tell me the latest news",
        "any news about {topic}", "what is happening in the world",
        "give me some breaking news", "news please", "what is new in {topic}",
        "tell me about the latest {topic} news", "i want to hear the news",
        "any breaking news today", "{topic} news please",
        "what is the latest on {topic}", "{topic}", "about {topic}",
        "the {topic} headlines", "i love celebrity news",
        "tell me something about celebrity news",
    ],
    IntentLabel.Wiki: [
        "who is {person}", "who was {person}", "what is {thing}",
        "tell me about {thing}", "what do you know about {thing}",
        "give me some information about {thing}",
        "what can you tell me about {thing}", "look up {thing}",
        "search for {thing}", "tell me more about {thing}", "who is {person} anyway",
    ],
    IntentLabel.Weather: [
        "what is the weather in {city}", "what's the weather in {city}",
        "how is the weather in {city}", "is it raining in {city}",
        "what is the temperature in {city}", "do i need an umbrella in {city}",
        "weather in {city} please", "how cold is it in {city}",
        "will it snow in {city}", "is it sunny in {city}", "weather forecast please",
    ],
    IntentLabel.Joke: [
        "tell me a joke", "make me laugh", "tell me something funny",
        "another joke please", "do you know any jokes", "say something funny",
        "i need a laugh", "got any good jokes", "joke please", "cheer me up",
        "one more joke",
    ],
    IntentLabel.LiveQA: [
        "how to cook {food}", "how do i fix a flat tire", "why is the sky blue",
        "how far is the moon", "how many planets are in the solar system",
        "what is the capital of {country}", "how do i tie a tie",
        "how to learn {skill}", "what is the tallest mountain in the world",
        "how does a plane fly", "how to {task}", "how do you boil an egg",
    ],
    IntentLabel.Movies: [
        "who directed {movie}", "recommend a movie", "what movies are playing",
        "tell me about the rating", "{field} information", "what about the {field}",
        "tell me the {field}", "who starred in {movie}",
        "what is the plot of {movie}", "i want to talk about movies",
        "any good movies out now", "movie recommendations please",
        "what is the rating of {movie}", "tell me about the {field} of the movie",
        "director information",
    ],
    IntentLabel.Music: [
        "play some {genre} music", "tell me some recent {genre} music",
        "tell me some recent {genre} songs",
        "no thanks tell me some recent {genre} music instead",
        "tell me about nice recent {genre} songs",
        "what are the top songs right now", "who sings {song}",
        "tell me about the artist {artist}", "i love {genre} music",
        "what is on the charts", "music news please",
        "recommend some {genre} songs", "tell me about music",
    ],
    IntentLabel.Opinion: [
        "what do you think of {opinion_thing}", "what do you think about {opinion_thing}",
        "do you like {opinion_thing}", "what is your opinion on {opinion_thing}",
        "what are your thoughts on {opinion_thing}", "do you believe in {opinion_thing}",
        "who do you think will win the election", "which one do you prefer",
    ],
    IntentLabel.Food: [
        "find me a recipe for {dish}", "how do i make {dish}",
        "i want to cook {dish}", "what are the ingredients of {dish}",
        "give me a recipe for {dish}", "what is a good recipe for dinner",
        "how do you make {dish}", "recipe for {dish} please",
        "what should i cook tonight", "show me the directions for {dish}",
        "what is the nutrition of {dish}",
    ],
    IntentLabel.Transition: [
        "let's talk about {mention}", "let's talk about something else",
        "can we change the topic", "talk about {mention}", "let's discuss {mention}",
        "i want to talk about something different", "switch topics please",
        "next topic", "let's move on", "change the subject",
        "let's talk about {mention} instead",
    ],
    IntentLabel.Unrecognized: [],  # generated gibberish
}

FILLERS: dict[str, list[str]] = {
    "feeling": ["great", "happy", "tired", "bored", "curious"],
    "topic": ["sports", "politics", "technology", "science", "space", "health",
              "business", "celebrity", "basketball", "football", "travel"],
    "person": ["einstein", "newton", "cleopatra", "shakespeare", "lincoln",
               "mozart", "gandhi", "napoleon", "darwin", "jim bridenstine"],
    "thing": ["gravity", "photosynthesis", "volcanoes", "democracy",
              "the roman empire", "glaciers", "pyramids", "electricity"],
    "city": ["boston", "seattle", "chicago", "miami", "denver", "london"],
    "country": ["france", "japan", "brazil", "canada"],
    "food": ["rice", "pasta", "chicken", "salmon", "quinoa"],
    "skill": ["guitar", "chess", "spanish", "photography"],
    "task": ["meditate", "whistle", "juggle", "paint a wall", "change a lightbulb"],
    "movie": ["wonder woman", "the matrix", "casablanca", "inception", "titanic"],
    "field": ["plot", "star", "producer", "rating", "director", "genre", "writer"],
    "genre": ["jazz", "pop", "rock", "country", "hip hop"],
    "song": ["shape the night", "blue midnight", "paper suns"],
    "artist": ["bruno mars", "drake", "taylor swift", "adele"],
    "opinion_thing": ["the president", "pineapple pizza", "cats", "winter",
                      "social media", "modern art"],
    "dish": ["pancakes", "tomato soup", "fried rice", "lasagna", "tacos", "brownies"],
    "mention": ["wonder woman", "bruno mars", "drake", "mars", "apple",
                "donald trump", "the matrix", "taylor swift", "microsoft",
                "baseball", "your day"],
}

# Gold routing label for entity-bearing evaluation utterances: what the
# second-level classifier should conclude from the entity's description.
ENTITY_GOLD: dict[str, IntentLabel] = {
    "drake": IntentLabel.Music,
    "bruno mars": IntentLabel.Music,
    "taylor swift": IntentLabel.Music,
    "beyonce": IntentLabel.Music,
    "adele": IntentLabel.Music,
    "eminem": IntentLabel.Music,
    "wonder woman": IntentLabel.Movies,
    "the matrix": IntentLabel.Movies,
    "iron man": IntentLabel.Movies,
    "batman": IntentLabel.Movies,
    "apple": IntentLabel.News,
    "microsoft": IntentLabel.News,
    "google": IntentLabel.News,
    "tesla": IntentLabel.News,
    "donald trump": IntentLabel.News,
    "barack obama": IntentLabel.News,
    "mars": IntentLabel.Wiki,
}

ENTITY_EVAL_TEMPLATES = [
    "let's talk about {e}", "talk about {e}", "i want to hear about {e}",
    "tell me about {e}", "what about {e}", "can we discuss {e}", "{e}",
]


def _fill(template: str, rng: random.Random) -> str:
    out = template
    while "{" in out:
        start = out.index("{")
        end = out.index("}", start)
        slot = out[start + 1 : end]
        out = out[:start] + rng.choice(FILLERS[slot]) + out[end + 1 :]
    return out


def _gibberish(rng: random.Random) -> str:
    consonants = "bcdfghjklmnpqrstvwz"
    vowels = "aeiou"
    words = []
    for _ in range(rng.randint(1, 3)):
        word = "".join(
            rng.choice(consonants) + rng.choice(vowels)
            for _ in range(rng.randint(2, 4))
        )
        words.append(word)
    return " ".join(words)


def generate_corpus(per_class: int = 50, seed: int = 7) -> list[tuple[str, IntentLabel]]:
    """Templated utterances, per_class examples for each of the 14 classes."""
    rng = random.Random(seed)
    pairs: list[tuple[str, IntentLabel]] = []
    for label in LABEL_ORDER:
        templates = TEMPLATES[label]
        for i in range(per_class):
            if label == IntentLabel.Unrecognized:
                text = _gibberish(rng)
            else:
                text = _fill(templates[i % len(templates)], rng)
            pairs.append((text, label))
    return pairs


def generate_entity_eval(n: int = 1000, entity_fraction: float = 0.35,
                         seed: int = 11) -> list[tuple[str, IntentLabel, bool]]:
    """Evaluation set mixing plain class utterances with entity-bearing ones.

    Entity-bearing items are transition-style phrasings whose gold label is
    the entity's description-derived routing label (ENTITY_GOLD).
    """
    rng = random.Random(seed)
    items: list[tuple[str, IntentLabel, bool]] = []
    entities = sorted(ENTITY_GOLD)
    plain_labels = [l for l in LABEL_ORDER if l != IntentLabel.Unrecognized]
    for _ in range(n):
        if rng.random() < entity_fraction:
            surface = rng.choice(entities)
            template = rng.choice(ENTITY_EVAL_TEMPLATES)
            items.append((template.format(e=surface), ENTITY_GOLD[surface], True))
        else:
            label = rng.choice(plain_labels)
            template = rng.choice(TEMPLATES[label])
            items.append((_fill(template, rng), label, False))
    return items


# --- labeled dataset files ---------------------------------------------------

def write_dataset(path: str, pairs: list[tuple[str, IntentLabel]]):
    with open(path, "w", encoding="utf-8") as fh:
        for text, label in pairs:
            fh.write(f"{label.value}\t{text}\n")


def load_dataset(path: str) -> list[tuple[str, IntentLabel]]:
    """Read label TAB text lines; malformed lines fail with their line number."""
    pairs: list[tuple[str, IntentLabel]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            label_text, sep, utterance = line.partition("\t")
            if not sep or not utterance.strip():
                raise ConfigurationError(f"{path}:{lineno}: expected label TAB text")
            try:
                label = IntentLabel(label_text)
            except ValueError as exc:
                raise ConfigurationError(
                    f"{path}:{lineno}: unknown label {label_text!r}"
                ) from exc
            pairs.append((utterance, label))
    return pairs


def write_embedding_fixture(path: str, tokens: set[str], dim: int = 50, seed: int = 3):
    """Seeded random embedding table covering the given tokens."""
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8") as fh:
        for token in sorted(tokens):
            values = " ".join(f"{rng.gauss(0, 0.3):.4f}" for _ in range(dim))
            fh.write(f"{token} {values}\n")
