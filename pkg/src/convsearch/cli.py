"""Operator and developer command line.

Verbs: chat (terminal REPL, in-process or against a served instance),
train/eval (general classifier), analyze (log analytics), replay
(determinism check), ingest (feed files), serve (run the API).

Exit codes: 0 success, 1 usage, 2 data error, 3 replay divergence.
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from . import classifiers, synthetic
from .classifiers import (LABEL_GROUPS, IntentLabel, LabeledDataset, cross_validate,
                          predict)
from .config import load_config
from .engine import (AgentEngine, load_bundle, replay_session, save_bundle,
                     train_general_model)
from .errors import ConfigurationError, ConvSearchError, IngestError
from .logstore import LogStore
from .textfeat import tokenize

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DIVERGENCE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="convsearch")
    parser.add_argument("--config", help="JSON config file (defaults ship in-package)")
    sub = parser.add_subparsers(dest="command", required=True)

    chat = sub.add_parser("chat", help="interactive terminal chat")
    chat.add_argument("--url", help="base URL of a running service (thin-client mode)")
    chat.add_argument("--model", help="model bundle path (in-process mode)")

    train = sub.add_parser("train", help="train the general intent classifier")
    train.add_argument("--dataset", help="labeled file: label TAB text per line")
    train.add_argument("--out", required=True, help="model bundle output path")
    train.add_argument("--per-class", type=int, help="synthetic examples per class")
    train.add_argument("--rounds", type=int)
    train.add_argument("--depth", type=int)
    train.add_argument("--lr", type=float)
    train.add_argument("--seed", type=int)

    evalp = sub.add_parser("eval", help="cross-validated per-class evaluation")
    evalp.add_argument("--dataset", help="labeled file (default: synthetic corpus)")
    evalp.add_argument("--per-class", type=int, help="synthetic examples per class")
    evalp.add_argument("--folds", type=int, default=2)
    evalp.add_argument("--learner", choices=["nb", "maxent", "gbdt", "all"], default="gbdt")
    evalp.add_argument("--rounds", type=int)
    evalp.add_argument("--hierarchical", action="store_true",
                       help="also report before/after entity-classifier accuracy")
    evalp.add_argument("--report", help="write machine-readable JSON report here")

    analyze = sub.add_parser("analyze", help="engagement/proactivity/rating reports")
    analyze.add_argument("--logs", required=True, help="log directory")
    analyze.add_argument("--split-date", help="YYYY-MM-DD before/after split")
    analyze.add_argument("--component", help="engagement component filter")
    analyze.add_argument("--report", help="write machine-readable JSON report here")

    replay = sub.add_parser("replay", help="re-run logged sessions and diff responses")
    replay.add_argument("--logs", required=True, help="log directory")
    replay.add_argument("--session", help="session id (default: all sessions)")
    replay.add_argument("--model", help="model bundle path (must match the logging run)")

    ingest = sub.add_parser("ingest", help="validate and install feed files")
    ingest.add_argument("files", nargs="+", help="RSS/Atom XML files")
    ingest.add_argument("--dest", help="feeds directory to copy validated files into")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)
    serve.add_argument("--model", help="model bundle path")
    serve.add_argument("--log-dir")
    serve.add_argument("--cors", action="store_true", help="allow any origin")

    return parser


def _load_engine(args, model_path: str | None = None) -> AgentEngine:
    config = load_config(args.config)
    if model_path:
        config.model_path = model_path
    return AgentEngine.from_config(config)


def _featurized_dataset(config, pairs) -> tuple:
    from .engine import build_featurizer

    corpus_tokens = [tokenize(text) for text, _ in pairs]
    featurizer = build_featurizer(config, corpus_tokens)
    examples = [(featurizer.featurize(t).concat(), lbl, t) for t, lbl in pairs]
    return featurizer, LabeledDataset(examples)


# -- chat ---------------------------------------------------------------------

def cmd_chat(args) -> int:
    if args.url:
        return _chat_http(args.url.rstrip("/"))
    engine = _load_engine(args, args.model)
    session = engine.new_session()
    print("Connected. Type 'exit' to end the conversation.")
    rated = False
    while True:
        try:
            line = input("User: ").strip()
        except EOFError:
            line = "exit"
        if line.lower() in ("exit", "quit", ":q"):
            rating = _prompt_rating()
            engine.rate_session(session.id, rating)
            rated = True
            break
        if not line:
            continue
        response = engine.process_utterance(session.id, line)
        print(f"Agent: {response.text}")
    if rated:
        print("Session saved. Goodbye.")
    return EXIT_OK


def _prompt_rating() -> int | None:
    while True:
        try:
            raw = input("Rate this conversation 1-5 (or press enter to skip): ").strip()
        except EOFError:
            return None
        if not raw:
            return None
        if raw.isdigit() and 1 <= int(raw) <= 5:
            return int(raw)
        print("Please enter a number from 1 to 5, or leave empty to skip.")


def _chat_http(base: str) -> int:
    import httpx

    client = httpx.Client(base_url=base, timeout=30.0)
    session_id = client.post("/sessions").json()["session_id"]
    print("Connected. Type 'exit' to end the conversation.")
    while True:
        try:
            line = input("User: ").strip()
        except EOFError:
            line = "exit"
        if line.lower() in ("exit", "quit", ":q"):
            rating = _prompt_rating()
            if rating is not None:
                client.post(f"/sessions/{session_id}/rating", json={"rating": rating})
            break
        if not line:
            continue
        resp = client.post(f"/sessions/{session_id}/utterances", json={"text": line})
        resp.raise_for_status()
        print(f"Agent: {resp.json()['text']}")
    print("Session saved. Goodbye.")
    return EXIT_OK


# -- train / eval --------------------------------------------------------------

def _dataset_pairs(args, config):
    if getattr(args, "dataset", None):
        return synthetic.load_dataset(args.dataset)
    per_class = getattr(args, "per_class", None) or config.train_per_class
    seed = getattr(args, "seed", None) or config.train_seed
    return synthetic.generate_corpus(per_class, seed)


def cmd_train(args) -> int:
    config = load_config(args.config)
    if args.rounds:
        config.train_rounds = args.rounds
    if args.depth:
        config.train_depth = args.depth
    if args.lr:
        config.train_lr = args.lr
    pairs = _dataset_pairs(args, config)
    featurizer, model = train_general_model(config, pairs)
    save_bundle(args.out, featurizer, model)
    print(f"trained GBDT on {len(pairs)} examples "
          f"(rounds={config.train_rounds}, depth={config.train_depth}, "
          f"lr={config.train_lr}); bundle written to {args.out}")
    return EXIT_OK


def _print_table4(reports: dict[str, classifiers.EvalReport]):
    learners = list(reports)
    print(f"\nPer-class results ({reports[learners[0]].header};"
          f" {reports[learners[0]].fold_count}-fold CV, pooled)")
    header = f"{'Class':22s}" + "".join(f"{l + ' ACC':>12s}{l + ' F1':>10s}" for l in learners)
    print(header)
    print("-" * len(header))
    for group_name, labels in LABEL_GROUPS.items():
        for label in labels:
            row = f"{label.value + ' (' + group_name + ')':22s}"
            for learner in learners:
                m = reports[learner].per_label[label]
                row += f"{m.accuracy:12.3f}{m.f1:10.3f}"
            print(row)
        print("-" * len(header))
    macro = f"{'macro-F1':22s}"
    for learner in learners:
        macro += f"{'':12s}{reports[learner].macro_f1:10.3f}"
    print(macro)


def cmd_eval(args) -> int:
    config = load_config(args.config)
    if args.rounds:
        config.train_rounds = args.rounds
    pairs = _dataset_pairs(args, config)
    _, dataset = _featurized_dataset(config, pairs)

    trainers = {
        "NB": lambda d: classifiers.train_naive_bayes(d, alpha=1.0),
        "ME": lambda d: classifiers.train_maxent(d, l2=1e-4, epochs=200, lr=0.5),
        "GBDT": lambda d: classifiers.train_gbdt(
            d, rounds=config.train_rounds, depth=config.train_depth, lr=config.train_lr
        ),
    }
    wanted = {"nb": ["NB"], "maxent": ["ME"], "gbdt": ["GBDT"],
              "all": ["NB", "ME", "GBDT"]}[args.learner]
    reports = {name: cross_validate(dataset, args.folds, trainers[name]) for name in wanted}
    _print_table4(reports)

    payload = {name: r.to_dict() for name, r in reports.items()}
    if args.hierarchical:
        payload["hierarchical"] = _hierarchical_eval(config)
        print("\nHierarchical classification (entity-bearing evaluation set):")
        h = payload["hierarchical"]
        print(f"  before (general only): accuracy {h['before_accuracy']:.3f}")
        print(f"  after  (with entities): accuracy {h['after_accuracy']:.3f}")
    if args.report:
        Path(args.report).write_text(json.dumps(payload, sort_keys=True, indent=2))
        print(f"\nreport written to {args.report}")
    return EXIT_OK


def _hierarchical_eval(config) -> dict:
    """Before/after accuracy of the entity second level on a synthetic set."""
    from .entities import Gazetteer, HierarchicalConfig, hierarchical_classify, load_profiles

    if config.model_path and Path(config.model_path).exists():
        featurizer, model = load_bundle(config.model_path, config)
    else:
        featurizer, model = train_general_model(config)
    gazetteer = Gazetteer.load(str(config.fixture_path("gazetteer")))
    profiles = load_profiles(str(config.fixture_path("profiles")))
    hier = HierarchicalConfig(config.similarity_threshold, config.override_confidence)

    items = synthetic.generate_entity_eval(1000, 0.35, seed=11)
    before = after = before_e = after_e = entities = 0
    for text, gold, entity_bearing in items:
        decision = hierarchical_classify(text, featurizer, model, gazetteer,
                                         gazetteer, profiles, hier)
        before += decision.general_label == gold
        after += decision.final_label == gold
        if entity_bearing:
            entities += 1
            before_e += decision.general_label == gold
            after_e += decision.final_label == gold
    n = len(items)
    return {
        "total": n,
        "entity_bearing": entities,
        "before_accuracy": before / n,
        "after_accuracy": after / n,
        "before_entity_accuracy": before_e / entities,
        "after_entity_accuracy": after_e / entities,
    }


# -- analyze / replay / ingest ---------------------------------------------------

def _parse_split(date_text: str) -> int:
    day = datetime.strptime(date_text, "%Y-%m-%d").replace(tzinfo=timezone.utc)
    return int(day.timestamp() * 1000)


def cmd_analyze(args) -> int:
    from . import analytics

    store = LogStore(args.logs)
    summaries = store.load_sessions()
    if not summaries:
        print("no sessions found")
        return EXIT_DATA
    sequences = {s.session_id: store.component_sequence(s.session_id) for s in summaries}
    payload: dict = {"sessions": len(summaries),
                     "log_warnings": store.warning_count}

    engagement = analytics.engagement_depth(list(sequences.values()))
    payload["engagement"] = engagement.to_dict()
    print("Engagement (average consecutive turns per component):")
    for component, stats in sorted(engagement.per_component.items()):
        print(f"  {component:14s} avg {stats.average:6.3f} over {stats.run_count} runs")

    series = analytics.rating_series(summaries)
    payload["rating_series"] = [
        {"date": d, "mean": m, "count": c} for d, m, c in series
    ]
    if series:
        print("\nDaily mean ratings:")
        for day, mean, count in series:
            print(f"  {day}  {mean:.3f}  (n={count})")

    if args.split_date:
        split_ms = _parse_split(args.split_date)
        report = analytics.proactivity_report(summaries, split_ms)
        payload["proactivity"] = report.to_dict()
        print(f"\nProactivity split at {args.split_date}:")
        print(f"  turns  {report.before.mean_turns:.3f} -> {report.after.mean_turns:.3f} "
              f"({report.turns_change * 100:+.1f}%, p={report.turns_test.p:.2e})")
        if report.rating_change is not None:
            print(f"  rating {report.before.mean_rating:.3f} -> {report.after.mean_rating:.3f} "
                  f"({report.rating_change * 100:+.1f}%, p={report.rating_test.p:.2e})")
        if args.component:
            before_seq = [sequences[s.session_id] for s in summaries if s.start_ms < split_ms]
            after_seq = [sequences[s.session_id] for s in summaries if s.start_ms >= split_ms]
            comparison = analytics.engagement_comparison(before_seq, after_seq, args.component)
            payload["engagement_comparison"] = comparison.to_dict()
            print(f"  {args.component} engagement {comparison.before_average:.3f} -> "
                  f"{comparison.after_average:.3f} ({comparison.change * 100:+.1f}%, "
                  f"p={comparison.test.p:.2e})")

    if args.report:
        Path(args.report).write_text(json.dumps(payload, sort_keys=True, indent=2))
        print(f"\nreport written to {args.report}")
    return EXIT_OK


def cmd_replay(args) -> int:
    source = LogStore(args.logs)
    session_ids = [args.session] if args.session else source.session_ids()
    if not session_ids:
        print("no sessions to replay")
        return EXIT_DATA
    config = load_config(args.config)
    if args.model:
        config.model_path = args.model
    with tempfile.TemporaryDirectory() as tmp:
        engine = AgentEngine.from_config(config, log_store=LogStore(tmp))
        for session_id in session_ids:
            diffs = replay_session(engine, source, session_id)
            if diffs:
                first = diffs[0]
                print(f"DIVERGED {session_id} at turn {first.turn_index}:")
                print(f"  logged:   {first.logged}")
                print(f"  replayed: {first.replayed}")
                return EXIT_DIVERGENCE
            print(f"ok {session_id}")
    print(f"replayed {len(session_ids)} session(s), no divergence")
    return EXIT_OK


def cmd_ingest(args) -> int:
    from .components.news import ingest_feed

    total = 0
    parsed = []
    for name in args.files:
        path = Path(name)
        if not path.exists():
            print(f"error: no such file: {path}", file=sys.stderr)
            return EXIT_DATA
        items = ingest_feed(path.read_bytes())  # IngestError -> data error
        parsed.append(path)
        total += len(items)
        print(f"{path}: {len(items)} items")
    if args.dest:
        dest = Path(args.dest)
        dest.mkdir(parents=True, exist_ok=True)
        for path in parsed:
            (dest / path.name).write_bytes(path.read_bytes())
        print(f"installed {len(parsed)} feed file(s) into {dest}")
    print(f"{total} items total")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = load_config(args.config)
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    if args.model:
        config.model_path = args.model
    if args.log_dir:
        config.log_dir = args.log_dir
    if args.cors:
        config.allow_cors = True
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return EXIT_OK


_COMMANDS = {
    "chat": cmd_chat,
    "train": cmd_train,
    "eval": cmd_eval,
    "analyze": cmd_analyze,
    "replay": cmd_replay,
    "ingest": cmd_ingest,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except IngestError as exc:
        offset = f" (byte offset {exc.offset})" if exc.offset is not None else ""
        print(f"error: {exc}{offset}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigurationError, ConvSearchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
