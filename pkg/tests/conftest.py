import json

import pytest

from convsearch.config import load_config
from convsearch.engine import AgentEngine, save_bundle, train_general_model
from convsearch.logstore import LogStore


@pytest.fixture(scope="session")
def base_config():
    return load_config()


@pytest.fixture(scope="session")
def trained(base_config):
    """The fitted featurizer + general GBDT model, trained once per test run."""
    return train_general_model(base_config)


@pytest.fixture(scope="session")
def bundle_path(trained, tmp_path_factory):
    path = tmp_path_factory.mktemp("model") / "general-model.json"
    featurizer, model = trained
    save_bundle(path, featurizer, model)
    return str(path)


@pytest.fixture(scope="session")
def config_file(tmp_path_factory, bundle_path):
    """A config file for CLI invocations: trained bundle + temp log dir."""
    root = tmp_path_factory.mktemp("cli")
    path = root / "config.json"
    path.write_text(json.dumps({
        "model_path": bundle_path,
        "log_dir": str(root / "logs"),
    }))
    return str(path)


@pytest.fixture()
def make_engine(base_config, trained, tmp_path):
    """Factory for engines sharing the trained model but with isolated logs."""
    counter = {"n": 0}

    def _make() -> AgentEngine:
        counter["n"] += 1
        log_dir = tmp_path / f"logs-{counter['n']}"
        featurizer, model = trained
        return AgentEngine(base_config, featurizer, model, LogStore(log_dir))

    return _make


@pytest.fixture()
def engine(make_engine) -> AgentEngine:
    return make_engine()
