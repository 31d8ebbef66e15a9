import json

import pytest

from convsearch.cli import EXIT_DATA, EXIT_DIVERGENCE, EXIT_OK, main
from convsearch.logstore import LogStore


def test_train_writes_bundle(tmp_path, config_file):
    out = tmp_path / "model.json"
    code = main(["--config", config_file, "train", "--out", str(out),
                 "--per-class", "6", "--rounds", "4", "--seed", "5"])
    assert code == EXIT_OK
    bundle = json.loads(out.read_text())
    assert bundle["model"]["kind"] == "GBDT"
    assert "term_weights" in bundle


def test_train_rejects_malformed_dataset(tmp_path, config_file, capsys):
    bad = tmp_path / "data.tsv"
    bad.write_text("SmallTalk\thello\nnot-a-valid-line\n")
    code = main(["--config", config_file, "train", "--dataset", str(bad),
                 "--out", str(tmp_path / "m.json")])
    assert code == EXIT_DATA
    assert ":2:" in capsys.readouterr().err  # names the offending line


def test_eval_prints_grouped_table(config_file, capsys, tmp_path):
    report = tmp_path / "report.json"
    code = main(["--config", config_file, "eval", "--per-class", "8",
                 "--rounds", "5", "--learner", "gbdt", "--folds", "2",
                 "--report", str(report)])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "one-vs-rest" in out  # accuracy definition in the header
    for row in ["Positive (S)", "Negative (S)", "SmallTalk (IR)", "Food (IR)",
                "Transition (T)", "Unrecognized (T)"]:
        assert row in out
    payload = json.loads(report.read_text())
    assert "GBDT" in payload


def test_chat_scripted_movie_transcript(config_file, capsys, monkeypatch):
    lines = iter([
        "Let's talk about Wonder Woman.",
        "Yes please.",
        "Tell me about the rating.",
        "Director information.",
        "exit",
        "4",
    ])
    monkeypatch.setattr("builtins.input", lambda prompt="": next(lines))
    assert main(["--config", config_file, "chat"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "8.4" in out
    assert "Patty Jenkins" in out


def test_chat_immediate_exit_logs_zero_turn_session(config_file, capsys, monkeypatch):
    lines = iter(["exit", ""])  # exit immediately, skip the rating
    monkeypatch.setattr("builtins.input", lambda prompt="": next(lines))
    assert main(["--config", config_file, "chat"]) == EXIT_OK
    log_dir = json.loads(open(config_file).read())["log_dir"]
    store = LogStore(log_dir)
    summaries = store.load_sessions()
    assert any(s.turn_count == 0 for s in summaries)


def test_chat_rating_prompt_accepts_only_valid(config_file, capsys, monkeypatch):
    lines = iter(["exit", "9", "abc", "5"])
    monkeypatch.setattr("builtins.input", lambda prompt="": next(lines))
    assert main(["--config", config_file, "chat"]) == EXIT_OK
    assert "1 to 5" in capsys.readouterr().out


def test_ingest_ok_and_malformed(tmp_path, config_file, capsys):
    good = tmp_path / "ok.xml"
    good.write_text("""<?xml version="1.0"?><rss version="2.0"><channel>
<title>T</title><item><title>One</title><pubDate>Mon, 01 Jan 2024 00:00:00 GMT</pubDate>
</item></channel></rss>""")
    dest = tmp_path / "feeds"
    assert main(["--config", config_file, "ingest", str(good),
                 "--dest", str(dest)]) == EXIT_OK
    assert (dest / "ok.xml").exists()

    bad = tmp_path / "bad.xml"
    bad.write_text("<rss><channel><item>")
    assert main(["--config", config_file, "ingest", str(bad)]) == EXIT_DATA
    assert "byte offset" in capsys.readouterr().err


def _exact_mean_sample(mean, n):
    total = round(mean * n)
    base = total // n
    extra = total - base * n
    return [base + 1] * extra + [base] * (n - extra)


def _write_session(store, sid, created_ms, news_run):
    from convsearch.logstore import TurnRecord

    store.register_session(sid, seed=1, created_ms=created_ms)
    components = ["news"] * news_run + ["smalltalk"]
    for i, component in enumerate(components, start=1):
        store.append_turn(TurnRecord(
            session_id=sid, turn_index=i, user_text="u", resolved_text="u",
            decision={}, state_before={}, state_after={}, component=component,
            response_text="r", timestamp_ms=created_ms + i,
        ))
    store.finalize_session(sid, rating=3)


def test_analyze_reports_effects(tmp_path, capsys):
    # News engagement constructed to jump 1.830 -> 2.745 (+50.0%) at the split.
    store = LogStore(tmp_path / "logs")
    split_ms = 1_700_006_400_000  # 2023-11-15 UTC
    day = 86_400_000
    for i, run in enumerate(_exact_mean_sample(1.830, 200)):
        _write_session(store, f"b{i:03d}", split_ms - day, run)
    for i, run in enumerate(_exact_mean_sample(2.745, 200)):
        _write_session(store, f"a{i:03d}", split_ms + day, run)

    report = tmp_path / "report.json"
    code = main(["analyze", "--logs", str(tmp_path / "logs"),
                 "--split-date", "2023-11-15", "--component", "news",
                 "--report", str(report)])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "+50.0%" in out
    payload = json.loads(report.read_text())
    comparison = payload["engagement_comparison"]
    assert comparison["change"] * 100 == pytest.approx(50.0, abs=0.1)
    assert comparison["test"]["p"] < 0.001


def test_analyze_empty_logs(tmp_path):
    assert main(["analyze", "--logs", str(tmp_path / "none")]) == EXIT_DATA


def test_replay_ok_and_divergence(engine, config_file, tmp_path, capsys):
    s = engine.new_session(seed=11)
    for text in ["hello", "tell me a joke", "no thanks"]:
        engine.process_utterance(s.id, text)
    log_dir = str(engine.log_store.directory)

    assert main(["--config", config_file, "replay", "--logs", log_dir,
                 "--session", s.id]) == EXIT_OK

    # Corrupt one logged response; replay must diverge with exit code 3.
    turn_file = next(engine.log_store.directory.glob("turns-*.jsonl"))
    lines = turn_file.read_text().splitlines()
    record = json.loads(lines[1])
    record["response_text"] = "tampered"
    lines[1] = json.dumps(record)
    turn_file.write_text("\n".join(lines) + "\n")
    code = main(["--config", config_file, "replay", "--logs", log_dir,
                 "--session", s.id])
    assert code == EXIT_DIVERGENCE
    assert "DIVERGED" in capsys.readouterr().out


def test_eval_hierarchical_prints_before_after(config_file, capsys, tmp_path):
    code = main(["--config", config_file, "eval", "--per-class", "6",
                 "--rounds", "3", "--hierarchical",
                 "--report", str(tmp_path / "h.json")])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "before (general only)" in out
    assert "after  (with entities)" in out
    payload = json.loads((tmp_path / "h.json").read_text())
    h = payload["hierarchical"]
    assert h["after_entity_accuracy"] >= h["before_entity_accuracy"]


def test_eval_reports_are_byte_identical(config_file, tmp_path):
    reports = []
    for name in ("one.json", "two.json"):
        path = tmp_path / name
        assert main(["--config", config_file, "eval", "--per-class", "6",
                     "--rounds", "3", "--report", str(path)]) == EXIT_OK
        reports.append(path.read_bytes())
    assert reports[0] == reports[1]


def test_usage_error_exit_code():
    assert main(["not-a-command"]) == 1
