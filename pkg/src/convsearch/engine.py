"""Per-turn orchestration: classify, manage state, retrieve, transition,
compose, log. One engine serves many concurrent sessions; fixtures and
models are immutable and shared.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from pathlib import Path

from . import classifiers, synthetic, transitions
from .classifiers import ClassifierModel, IntentLabel
from .components import (ComponentId, ComponentRequest, ComponentResponse)
from .components.food import Food
from .components.joke import Jokes
from .components.liveqa import LiveQa
from .components.misc import Opinion, Unrecognized
from .components.movies import Movies
from .components.music import Music
from .components.news import News, NewsStore
from .components.smalltalk import SmallTalk
from .components.weather import FixtureWeatherClient, Weather, load_cities
from .components.wiki import FixtureWikiClient, Wiki
from .config import ServiceConfig
from .dialogue import (LAST_ENTITY_KEY, DialogueStateId, RoutingResult, Session,
                       SessionStore, StateTop, apply_state_change, backtrack,
                       new_session, resolve_coreference, update_and_route)
from .entities import (Gazetteer, HierarchicalConfig, IntentDecision,
                       RemoteKnowledgeClient, hierarchical_classify, load_profiles)
from .errors import SessionFinalizedError
from .logstore import LogStore, SessionSummary, TurnRecord
from .textfeat import EmbeddingTable, Featurizer, fit_term_weights, load_pattern_rules, tokenize
from .topics import EntityTopicMap, TopicId, topic_feed_tag
from .transitions import Suggestion, compose_response, make_suggestion, recommend_topic

log = logging.getLogger(__name__)


@dataclass
class AgentResponse:
    session_id: str
    turn_index: int
    text: str
    state_top: str
    state_sub: str | None
    component: str
    suggestion: str | None
    latency_ms: float
    log_error: str | None = None


def build_featurizer(config: ServiceConfig, corpus_tokens: list[list[str]]) -> Featurizer:
    return Featurizer(
        term_weights=fit_term_weights(corpus_tokens),
        embeddings=EmbeddingTable.load(str(config.fixture_path("embeddings"))),
        rules=load_pattern_rules(str(config.fixture_path("patterns"))),
    )


def train_general_model(config: ServiceConfig,
                        pairs: list[tuple[str, IntentLabel]] | None = None
                        ) -> tuple[Featurizer, ClassifierModel]:
    """Fit the featurizer and GBDT general classifier on a labeled corpus
    (synthetic by default)."""
    pairs = pairs or synthetic.generate_corpus(config.train_per_class, config.train_seed)
    corpus_tokens = [tokenize(text) for text, _ in pairs]
    featurizer = build_featurizer(config, corpus_tokens)
    examples = [
        (featurizer.featurize(text).concat(), label, text) for text, label in pairs
    ]
    dataset = classifiers.LabeledDataset(examples)
    model = classifiers.train_gbdt(
        dataset, rounds=config.train_rounds, depth=config.train_depth, lr=config.train_lr
    )
    return featurizer, model


def save_bundle(path: str | Path, featurizer: Featurizer, model: ClassifierModel):
    """Persist the fitted term weights together with the classifier."""
    import json

    bundle = {
        "schema_version": 1,
        "term_weights": {
            "vocabulary": featurizer.term_weights.vocabulary,
            "doc_frequency": featurizer.term_weights.doc_frequency,
            "doc_count": featurizer.term_weights.doc_count,
        },
        "model": classifiers.model_to_dict(model),
    }
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(bundle))


def load_bundle(path: str | Path, config: ServiceConfig) -> tuple[Featurizer, ClassifierModel]:
    import json

    from .errors import ConfigurationError
    from .textfeat import TermWeightModel

    bundle = json.loads(Path(path).read_text())
    if bundle.get("schema_version") != 1:
        raise ConfigurationError(f"unsupported model bundle schema in {path}")
    tw = bundle["term_weights"]
    featurizer = Featurizer(
        term_weights=TermWeightModel(tw["vocabulary"], tw["doc_frequency"], tw["doc_count"]),
        embeddings=EmbeddingTable.load(str(config.fixture_path("embeddings"))),
        rules=load_pattern_rules(str(config.fixture_path("patterns"))),
    )
    return featurizer, classifiers.model_from_dict(bundle["model"])


class AgentEngine:
    def __init__(self, config: ServiceConfig, featurizer: Featurizer,
                 model: ClassifierModel, log_store: LogStore):
        self.config = config
        self.featurizer = featurizer
        self.model = model
        self.log_store = log_store
        self.sessions = SessionStore()
        self._session_counter = 0

        self.gazetteer = Gazetteer.load(str(config.fixture_path("gazetteer")))
        self.profiles = load_profiles(str(config.fixture_path("profiles")))
        self.topic_map = EntityTopicMap.load(str(config.fixture_path("entity_topics")))
        if config.knowledge_endpoint:
            self.knowledge = RemoteKnowledgeClient(
                config.knowledge_endpoint, self.gazetteer, config.knowledge_timeout_seconds
            )
        else:
            self.knowledge = self.gazetteer
        self.hier_config = HierarchicalConfig(
            similarity_threshold=config.similarity_threshold,
            override_confidence=config.override_confidence,
        )

        self.news_store = NewsStore()
        self._last_feed_ingest = time.monotonic()
        self._ingest_feed_dir()

        self.components = {
            ComponentId.SmallTalk: SmallTalk.load(str(config.fixture_path("smalltalk"))),
            ComponentId.News: News(self.news_store),
            ComponentId.Wiki: Wiki(FixtureWikiClient.load(str(config.fixture_path("wiki")))),
            ComponentId.Weather: Weather(
                FixtureWeatherClient.load(str(config.fixture_path("weather"))),
                load_cities(str(config.fixture_path("cities"))),
            ),
            ComponentId.Joke: Jokes.load(str(config.fixture_path("jokes"))),
            ComponentId.LiveQA: LiveQa.load(str(config.fixture_path("qa")), config.liveqa_threshold),
            ComponentId.Movies: Movies.load(str(config.fixture_path("movies"))),
            ComponentId.Music: Music.load(str(config.fixture_path("music"))),
            ComponentId.Opinion: Opinion(),
            ComponentId.Food: Food.load(str(config.fixture_path("recipes"))),
            ComponentId.Unrecognized: Unrecognized(),
        }

    def _ingest_feed_dir(self):
        items = []
        from .components.news import ingest_feed

        for feed in sorted(Path(self.config.fixture_path("feeds")).glob("*.xml")):
            items.extend(ingest_feed(feed.read_bytes()))
        self.news_store.replace(items)

    def maybe_refresh_feeds(self):
        """Re-ingest the feeds directory when the configured interval elapsed."""
        interval = self.config.feed_refresh_seconds
        if interval <= 0:
            return
        now = time.monotonic()
        if now - self._last_feed_ingest >= interval:
            self._last_feed_ingest = now
            try:
                self._ingest_feed_dir()
            except Exception as exc:  # keep serving the previous snapshot
                log.warning("feed refresh failed: %s", exc)

    @classmethod
    def from_config(cls, config: ServiceConfig, log_store: LogStore | None = None) -> "AgentEngine":
        config.validate()
        if config.model_path and Path(config.model_path).exists():
            featurizer, model = load_bundle(config.model_path, config)
        else:
            featurizer, model = train_general_model(config)
            if config.model_path:
                save_bundle(config.model_path, featurizer, model)
        return cls(config, featurizer, model, log_store or LogStore(config.log_dir))

    # -- session lifecycle --------------------------------------------------

    def _derive_seed(self, counter: int) -> int:
        return (self.config.master_seed * 2654435761 + counter * 40503) % (2**32)

    def new_session(self, seed: int | None = None, session_id: str | None = None) -> Session:
        if seed is None:
            seed = self._derive_seed(self._session_counter)
        self._session_counter += 1
        session = new_session(seed, session_id, stack_bound=self.config.stack_bound)
        self.sessions.add(session)
        self.log_store.register_session(session.id, seed, session.created_ms)
        return session

    def expire_idle_sessions(self, now_ms: int | None = None):
        """Finalize (unrated) sessions idle past the configured limit."""
        now_ms = now_ms or int(time.time() * 1000)
        limit = self.config.session_idle_seconds * 1000
        for session in self.sessions.all_sessions():
            if session.finalized:
                continue
            if now_ms - session.last_activity_ms > limit:
                session.finalized = True
                self.log_store.finalize_session(session.id)

    def rate_session(self, session_id: str, rating: int | None,
                     feedback: str | None = None) -> SessionSummary:
        session = self.sessions.get(session_id)
        with self.sessions.lock(session_id):
            if session.finalized:
                raise SessionFinalizedError(session_id)
            if rating is not None and not 1 <= rating <= 5:
                raise ValueError("rating must be between 1 and 5")
            session.rating = rating
            session.feedback = feedback
            session.finalized = True
            return self.log_store.finalize_session(session_id, rating, feedback)

    # -- the turn pipeline ----------------------------------------------------

    def process_utterance(self, session_id: str, text: str) -> AgentResponse:
        session = self.sessions.get(session_id)
        with self.sessions.lock(session_id):
            if session.finalized:
                raise SessionFinalizedError(session_id)
            return self._process_locked(session, text)

    def _process_locked(self, session: Session, text: str) -> AgentResponse:
        started = time.perf_counter()
        timestamp_ms = int(time.time() * 1000)
        state_before = session.state

        decision = hierarchical_classify(
            text, self.featurizer, self.model, self.knowledge,
            self.gazetteer, self.profiles, self.hier_config,
        )
        resolved = resolve_coreference(session, text)
        session.context_vars.append(("user", text))

        routing = update_and_route(session, decision, resolved, self.config.switch_confidence)
        routing = self._reminder_choice(session, routing, resolved)
        component, response, suggestion, turn_error = self._respond(
            session, routing, decision, resolved
        )

        # Commit state, cache, and per-session bookkeeping.
        if suggestion is not None:
            apply_state_change(session, ComponentId.Transition, StateTop.Suggestion.value, None)
            session.pending_suggestion = suggestion
            session.last_suggestion_turn = session.turn_count + 1
        else:
            apply_state_change(session, component, response.state_hint, response.sub_state)
        session.cache_vars.update(response.cache_updates)
        if decision.mentions:
            session.cache_vars[LAST_ENTITY_KEY] = decision.mentions[0].surface.title()
        if response.served_topic is not None:
            session.discussed_topics.add(response.served_topic)
            session.offered_topics.add(response.served_topic)
        if component != ComponentId.Transition or decision.final_label == IntentLabel.Positive:
            session.refusal_count = 0

        final_text = compose_response(response.text, suggestion, self.config.max_response_chars)
        session.context_vars.append(("system", final_text))
        session.turn_count += 1
        session.last_activity_ms = timestamp_ms
        latency_ms = (time.perf_counter() - started) * 1000

        record = TurnRecord(
            session_id=session.id,
            turn_index=session.turn_count,
            user_text=text,
            resolved_text=resolved,
            decision=decision.to_dict(),
            state_before={"top": state_before.top, "sub": state_before.sub},
            state_after={"top": session.state.top, "sub": session.state.sub},
            component=component.value,
            response_text=final_text,
            suggestion=suggestion.topic.value if suggestion else None,
            latency_ms=latency_ms,
            timestamp_ms=timestamp_ms,
            error=turn_error,
        )
        log_error = None
        try:
            self.log_store.append_turn(record)
        except Exception as exc:  # the turn is still answered
            log.error("failed to log turn for %s: %s", session.id, exc)
            log_error = str(exc)

        return AgentResponse(
            session_id=session.id,
            turn_index=session.turn_count,
            text=final_text,
            state_top=session.state.top,
            state_sub=session.state.sub,
            component=component.value,
            suggestion=suggestion.topic.value if suggestion else None,
            latency_ms=latency_ms,
            log_error=log_error,
        )

    def _reminder_choice(self, session: Session, routing: RoutingResult,
                         resolved: str) -> RoutingResult:
        """In the Suggestion state a named topic is an explicit choice: it
        beats both the classifier and any pending suggestion."""
        if session.state.top != StateTop.Suggestion.value:
            return routing
        tokens = set(tokenize(resolved))
        for topic in TopicId:
            if topic.value.lower() in tokens:
                session.pending_suggestion = None
                session.refusal_count = 0
                return RoutingResult(ComponentId.News, resolved, "predefined_state")
        return routing

    def _respond(self, session: Session, routing: RoutingResult,
                 decision: IntentDecision, resolved: str
                 ) -> tuple[ComponentId, ComponentResponse, Suggestion | None, str | None]:
        """Run the routed component (or transition flow); returns the component
        that actually answered, its response, an optional appended suggestion,
        and an error flag."""
        if routing.component == ComponentId.Transition:
            return self._transition_flow(session, routing, decision, resolved)
        if routing.component == ComponentId.News:
            self.maybe_refresh_feeds()

        request = ComponentRequest.build(
            resolved, tokenize(resolved), decision, session,
            requested_topic=topic_feed_tag(decision.topic_hint) if decision.topic_hint else None,
        )
        try:
            response = self.components[routing.component].respond(request)
            turn_error = None
        except Exception as exc:  # component failure degrades, never aborts
            log.exception("component %s failed", routing.component.value)
            response = ComponentResponse(
                text="Sorry, something went wrong on my end. Could we try another topic?"
            )
            turn_error = f"{routing.component.value}: {exc}"

        suggestion = None
        if self._suggestion_allowed(session, routing.component, response):
            suggestion = recommend_topic(session, decision.entity, self.topic_map)
        return routing.component, response, suggestion, turn_error

    def _suggestion_allowed(self, session: Session, component: ComponentId,
                            response: ComponentResponse) -> bool:
        if component in (ComponentId.Unrecognized, ComponentId.Transition):
            return False
        if response.followup_offer is not None or response.sub_state is not None:
            return False
        if session.last_suggestion_turn is None:
            return True
        return (session.turn_count + 1) - session.last_suggestion_turn >= self.config.suggestion_gap_turns

    def _transition_flow(self, session: Session, routing: RoutingResult,
                         decision: IntentDecision, resolved: str
                         ) -> tuple[ComponentId, ComponentResponse, Suggestion | None, str | None]:
        """Suggestion-state dispositions and Transition-labeled utterances."""
        if session.state.top == StateTop.Suggestion.value and session.pending_suggestion is not None:
            disposition, payload = transitions.handle_suggestion_state(session, decision)
            if disposition == "accept":
                topic: TopicId = payload  # type: ignore[assignment]
                session.pending_suggestion = None
                session.refusal_count = 0
                session.discussed_topics.add(topic)
                news_request = ComponentRequest.build(
                    resolved, tokenize(resolved), decision, session,
                    requested_topic=topic_feed_tag(topic),
                )
                response = self.components[ComponentId.News].respond(news_request)
                return ComponentId.News, response, None, None
            if disposition == "refuse":
                outcome = transitions.register_refusal(session, self.config.reminder_threshold)
                if outcome == "reminder":
                    session.pending_suggestion = None
                    reminder = ComponentResponse(text=transitions.build_reminder(session))
                    return ComponentId.Transition, reminder, None, None
                follow_up = recommend_topic(session, None, self.topic_map)
                if follow_up is None:
                    session.pending_suggestion = None
                    backtrack(session)
                    response = ComponentResponse(
                        text="OK, no problem. What would you like to talk about?",
                        state_hint=session.state.top,
                    )
                    return ComponentId.Transition, response, None, None
                session.pending_suggestion = follow_up
                session.last_suggestion_turn = session.turn_count + 1
                response = ComponentResponse(text=f"OK, no problem. {follow_up.prompt}")
                return ComponentId.Transition, response, None, None
            # redirect: run the label's component through the normal path
            session.pending_suggestion = None
            session.refusal_count = 0
            label: IntentLabel = payload  # type: ignore[assignment]
            from .dialogue import LABEL_COMPONENTS

            target = LABEL_COMPONENTS.get(label, ComponentId.Unrecognized)
            redirected = RoutingResult(target, resolved, "suggestion_redirect")
            return self._respond(session, redirected, decision, resolved)

        # A Transition-labeled utterance outside the Suggestion state: offer a topic.
        suggestion = recommend_topic(session, decision.entity, self.topic_map)
        if suggestion is None:
            reminder = ComponentResponse(text=transitions.build_reminder(session))
            return ComponentId.Transition, reminder, None, None
        session.pending_suggestion = suggestion
        session.last_suggestion_turn = session.turn_count + 1
        response = ComponentResponse(text=f"Sure, let's find something new. {suggestion.prompt}")
        return ComponentId.Transition, response, None, None

    # -- reading / metrics ---------------------------------------------------

    def session_log(self, session_id: str) -> dict:
        self.sessions.get(session_id)  # raises for unknown ids
        turns = [t.to_dict() for t in self.log_store.iter_session_turns(session_id)]
        session = self.sessions.get(session_id)
        return {
            "session_id": session_id,
            "turns": turns,
            "rating": session.rating,
            "feedback": session.feedback,
            "finalized": session.finalized,
        }

    def metrics_summary(self) -> dict:
        from . import analytics

        summaries = self.log_store.load_sessions()
        sequences = [self.log_store.component_sequence(s.session_id) for s in summaries]
        engagement = analytics.engagement_depth(sequences)
        ratings = [s.rating for s in summaries if s.rating is not None]
        return {
            "sessions": len(summaries),
            "turns": sum(s.turn_count for s in summaries),
            "mean_rating": sum(ratings) / len(ratings) if ratings else None,
            "rated_sessions": len(ratings),
            "component_turns": _merge_counts(s.component_turns for s in summaries),
            "engagement": engagement.to_dict(),
            "log_warnings": self.log_store.warning_count,
        }


def _merge_counts(dicts) -> dict[str, int]:
    merged: dict[str, int] = {}
    for d in dicts:
        for key, count in d.items():
            merged[key] = merged.get(key, 0) + count
    return merged


# -- replay ----------------------------------------------------------------

@dataclass
class ReplayDiff:
    turn_index: int
    logged: str
    replayed: str


def replay_session(engine: AgentEngine, source: LogStore, session_id: str) -> list[ReplayDiff]:
    """Re-run a logged session's user turns on a fresh engine; returns the
    response-text differences (empty for a faithful replay)."""
    seed = source.session_seed(session_id)
    texts = source.user_texts(session_id)
    logged = [t.response_text for t in source.iter_session_turns(session_id)]
    session = engine.new_session(seed=seed, session_id=f"replay-{session_id}")
    diffs = []
    for i, text in enumerate(texts):
        response = engine.process_utterance(session.id, text)
        if i < len(logged) and response.text != logged[i]:
            diffs.append(ReplayDiff(i + 1, logged[i], response.text))
    return diffs
