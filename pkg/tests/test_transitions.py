import pytest

from convsearch.classifiers import IntentLabel
from convsearch.config import load_config
from convsearch.dialogue import DialogueStateId, new_session
from convsearch.entities import EntityMention, IntentDecision
from convsearch.topics import TOPIC_ORDER, EntityTopicMap, TopicId
from convsearch.transitions import (Suggestion, build_reminder, compose_response,
                                    handle_suggestion_state, make_suggestion,
                                    recommend_topic, register_refusal)


@pytest.fixture(scope="module")
def topic_map():
    return EntityTopicMap.load(str(load_config().fixture_path("entity_topics")))


def _decision(label):
    return IntentDecision(label, [1.0], None, label, False)


def test_topic_inventory():
    assert len(TOPIC_ORDER) == 12
    assert {t.value for t in TOPIC_ORDER} == {
        "Basketball", "Hockey", "Soccer", "Animal", "Football", "Science",
        "Baseball", "Space", "Health", "Technology", "Celebrity", "Travel",
    }


def test_every_topic_reachable_from_map(topic_map):
    assert set(topic_map.keyword_topics.values()) == set(TOPIC_ORDER)


# -- recommend_topic ------------------------------------------------------------------

def test_entity_related_recommendation(topic_map):
    s = new_session(seed=5)
    bruno = EntityMention("bruno mars", (0, 2), "American singer-songwriter")
    suggestion = recommend_topic(s, bruno, topic_map)
    assert suggestion.topic == TopicId.Celebrity
    assert suggestion.origin == "entity_related"
    assert TopicId.Celebrity in s.offered_topics


def test_planet_entity_maps_to_space(topic_map):
    s = new_session(seed=5)
    mars = EntityMention("mars", (0, 1), "Fourth planet from the Sun in the Solar System")
    suggestion = recommend_topic(s, mars, topic_map)
    assert suggestion.topic == TopicId.Space
    assert "space" in suggestion.prompt.lower()
    assert suggestion.prompt.endswith("?")


def test_random_recommendation_is_seeded(topic_map):
    picks_a = [recommend_topic(new_session(seed=42), None, topic_map).topic
               for _ in range(3)]
    assert len(set(picks_a)) == 1  # same seed, same pick
    s = new_session(seed=42)
    first = recommend_topic(s, None, topic_map)
    second = recommend_topic(s, None, topic_map)
    assert first.topic != second.topic  # never re-suggests an offered topic


def test_exhaustion_returns_none(topic_map):
    s = new_session(seed=5)
    s.offered_topics = set(TOPIC_ORDER)
    assert recommend_topic(s, None, topic_map) is None


def test_no_topic_suggested_twice(topic_map):
    s = new_session(seed=9)
    seen = []
    while True:
        suggestion = recommend_topic(s, None, topic_map)
        if suggestion is None:
            break
        seen.append(suggestion.topic)
    assert len(seen) == 12
    assert len(set(seen)) == 12


def test_offered_entity_topic_falls_back_to_random(topic_map):
    s = new_session(seed=5)
    s.offered_topics = {TopicId.Celebrity}
    bruno = EntityMention("bruno mars", (0, 2), "American singer-songwriter")
    suggestion = recommend_topic(s, bruno, topic_map)
    assert suggestion.origin == "random"
    assert suggestion.topic != TopicId.Celebrity


# -- refusals & reminder ------------------------------------------------------------

def test_refusal_counting_and_reminder_reset():
    s = new_session(seed=5)
    assert register_refusal(s, threshold=2) == "continue"
    assert s.refusal_count == 1
    assert register_refusal(s, threshold=2) == "reminder"
    assert s.refusal_count == 0


def test_reminder_lists_undiscussed_topics():
    s = new_session(seed=5)
    text = build_reminder(s)
    for topic in TOPIC_ORDER:
        assert topic.value in text
    assert text.endswith("?")
    s.discussed_topics.add(TopicId.Space)
    text = build_reminder(s)
    assert "Space" not in text
    assert sum(text.count(t.value) for t in TOPIC_ORDER) == 11


# -- suggestion-state dispositions ------------------------------------------------------

def test_dispositions_partition_all_labels():
    s = new_session(seed=5)
    s.state = DialogueStateId("Suggestion")
    s.pending_suggestion = make_suggestion(TopicId.Space, "random")
    outcomes = {}
    for label in IntentLabel:
        disposition, payload = handle_suggestion_state(s, _decision(label))
        outcomes[label] = disposition
        assert disposition in ("accept", "refuse", "redirect")
        if disposition == "accept":
            assert payload == TopicId.Space
    assert outcomes[IntentLabel.Positive] == "accept"
    assert outcomes[IntentLabel.Negative] == "refuse"
    redirects = [l for l, d in outcomes.items() if d == "redirect"]
    assert len(redirects) == 12


def test_no_pending_suggestion_redirects():
    s = new_session(seed=5)
    s.state = DialogueStateId("Suggestion")
    s.pending_suggestion = None
    disposition, payload = handle_suggestion_state(s, _decision(IntentLabel.Positive))
    assert disposition == "redirect"
    assert payload == IntentLabel.Positive


# -- compose_response ---------------------------------------------------------------

def test_compose_appends_prompt():
    suggestion = make_suggestion(TopicId.Celebrity, "random")
    out = compose_response("Hi, how are you?", suggestion)
    assert out.startswith("Hi, how are you?")
    assert out.endswith(suggestion.prompt)


def test_compose_identity_without_suggestion():
    assert compose_response("Just text.", None) == "Just text."


def test_compose_truncates_at_sentence_boundary():
    suggestion = make_suggestion(TopicId.Travel, "random")
    long_text = ("This is sentence one. " * 50).strip()
    out = compose_response(long_text, suggestion, max_chars=200)
    assert len(out) <= 200
    assert out.endswith(suggestion.prompt)
    prefix = out[: -len(suggestion.prompt)].rstrip()
    assert prefix.endswith(".")
    assert long_text.startswith(prefix[:20])


def test_compose_single_trailing_question():
    suggestion = make_suggestion(TopicId.Health, "random")
    out = compose_response("Did you know? Bodies are neat.", suggestion)
    assert out.endswith("?")
    assert out.rstrip("?").count("?") == out.count("?") - 1


def test_suggestion_prompt_names_topic():
    for topic in TOPIC_ORDER:
        suggestion = make_suggestion(topic, "random")
        assert topic.value.lower() in suggestion.prompt.lower()
        assert suggestion.prompt.endswith("?")
