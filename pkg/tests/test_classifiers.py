import json

import numpy as np
import pytest

from convsearch.classifiers import (LABEL_ORDER, EvalReport, IntentLabel,
                                    LabeledDataset, cross_validate,
                                    evaluate_predictions, f1_score, load_model,
                                    maxent_loss_grad, model_from_dict, model_to_dict,
                                    predict, save_model, stratified_folds,
                                    train_gbdt, train_maxent, train_naive_bayes)
from convsearch.errors import ConfigurationError, DimensionError, TrainingError

P, N, S = IntentLabel.Positive, IntentLabel.Negative, IntentLabel.SmallTalk


def small_dataset():
    examples = (
        [(np.array([1.0, 0.0, 0.2]), P, "p")] * 3
        + [(np.array([0.0, 1.0, 0.1]), N, "n")] * 2
        + [(np.array([0.4, 0.4, 1.0]), S, "s")] * 3
    )
    return LabeledDataset(examples, [P, N, S])


def test_label_inventory():
    assert len(LABEL_ORDER) == 14
    assert len(set(LABEL_ORDER)) == 14


# -- naive bayes -----------------------------------------------------------------

def test_nb_single_class_always_that_class():
    ds = LabeledDataset([(np.array([1.0, 2.0]), P, "")] * 3, [P])
    model = train_naive_bayes(ds)
    label, scores = predict(model, np.array([0.3, 0.9]))
    assert label == P
    assert scores[0] == pytest.approx(1.0)


def test_nb_separable_singletons():
    ds = LabeledDataset(
        [(np.array([3.0, 0.0]), P, ""), (np.array([0.0, 3.0]), N, "")], [P, N]
    )
    model = train_naive_bayes(ds, alpha=1.0)
    assert predict(model, np.array([3.0, 0.0]))[0] == P
    assert predict(model, np.array([0.0, 3.0]))[0] == N


def test_nb_zero_features_fall_back_to_priors():
    model = train_naive_bayes(small_dataset())
    _, scores = predict(model, np.zeros(3))
    assert scores.tolist() == pytest.approx([3 / 8, 2 / 8, 3 / 8])


def test_nb_handles_negative_features_via_shift():
    ds = LabeledDataset(
        [(np.array([-1.0, 0.5]), P, ""), (np.array([1.0, -0.5]), N, "")], [P, N]
    )
    model = train_naive_bayes(ds)
    assert predict(model, np.array([-1.0, 0.5]))[0] == P


def test_nb_rejects_bad_alpha_and_missing_class():
    with pytest.raises(TrainingError):
        train_naive_bayes(small_dataset(), alpha=0.0)
    ds = LabeledDataset([(np.array([1.0]), P, "")], [P, N])
    with pytest.raises(TrainingError):
        train_naive_bayes(ds)


# -- maxent ------------------------------------------------------------------------

def test_maxent_symmetric_midpoint():
    ds = LabeledDataset(
        [(np.array([1.0, 0.0]), P, ""), (np.array([0.0, 1.0]), N, "")], [P, N]
    )
    model = train_maxent(ds, l2=0.0, epochs=200, lr=0.5)
    _, scores = predict(model, np.array([0.5, 0.5]))
    assert scores.tolist() == pytest.approx([0.5, 0.5], abs=1e-9)


def test_maxent_separable_reaches_full_accuracy():
    xs = [np.array([1.0, 0.0]), np.array([0.9, 0.1]),
          np.array([0.0, 1.0]), np.array([0.1, 0.9])]
    ys = [P, P, N, N]
    ds = LabeledDataset([(x, y, "") for x, y in zip(xs, ys)], [P, N])
    model = train_maxent(ds, l2=0.0, epochs=800, lr=1.0)
    assert all(predict(model, x)[0] == y for x, y in zip(xs, ys))


def test_maxent_gradient_matches_finite_differences():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(5, 4))
    y = np.array([0, 1, 2, 1, 0])
    Y = np.zeros((5, 3))
    Y[np.arange(5), y] = 1.0
    W = rng.normal(size=(4, 3)) * 0.1
    b = rng.normal(size=3) * 0.1
    _, grad_w, grad_b = maxent_loss_grad(W, b, X, Y, l2=0.01)

    eps = 1e-6
    for param, grad in ((W, grad_w), (b, grad_b)):
        it = np.nditer(param, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            saved = param[idx]
            param[idx] = saved + eps
            up = maxent_loss_grad(W, b, X, Y, 0.01)[0]
            param[idx] = saved - eps
            down = maxent_loss_grad(W, b, X, Y, 0.01)[0]
            param[idx] = saved
            numeric = (up - down) / (2 * eps)
            denom = max(abs(numeric), 1e-8)
            assert abs(numeric - grad[idx]) / denom < 1e-5


def test_maxent_validates_params():
    with pytest.raises(TrainingError):
        train_maxent(small_dataset(), l2=-1.0)
    with pytest.raises(TrainingError):
        train_maxent(small_dataset(), epochs=0)


# -- gbdt ---------------------------------------------------------------------------

def test_gbdt_constant_model_predicts_priors():
    ds = small_dataset()
    model = train_gbdt(ds, rounds=1, depth=0, lr=0.1)
    for x in (np.zeros(3), np.array([5.0, -2.0, 1.0])):
        assert model.predict_scores(x).tolist() == pytest.approx([3 / 8, 2 / 8, 3 / 8])


def test_gbdt_learns_xor():
    xs = [np.array([0.0, 0.0]), np.array([0.0, 1.0]),
          np.array([1.0, 0.0]), np.array([1.0, 1.0])]
    ys = [P, N, N, P]
    ds = LabeledDataset([(x, y, "") for x, y in zip(xs, ys)], [P, N])
    model = train_gbdt(ds, rounds=20, depth=2, lr=0.3)
    assert all(predict(model, x)[0] == y for x, y in zip(xs, ys))


def test_gbdt_deterministic():
    ds = small_dataset()
    a = train_gbdt(ds, rounds=5, depth=2, lr=0.2)
    b = train_gbdt(ds, rounds=5, depth=2, lr=0.2)
    x = np.array([0.3, 0.3, 0.4])
    assert a.predict_scores(x).tobytes() == b.predict_scores(x).tobytes()


def test_gbdt_loss_non_increasing():
    rng = np.random.default_rng(1)
    examples = []
    for i, label in enumerate([P, N, S]):
        center = np.zeros(6)
        center[i * 2 : i * 2 + 2] = 2.0
        for _ in range(20):
            examples.append((center + rng.normal(0, 0.5, size=6), label, ""))
    ds = LabeledDataset(examples, [P, N, S])
    model = train_gbdt(ds, rounds=100, depth=2, lr=0.1)
    hist = model.parameters["ensemble"].loss_history
    assert len(hist) == 101
    assert all(b <= a + 1e-9 for a, b in zip(hist, hist[1:]))


def test_gbdt_rejects_non_finite():
    ds = LabeledDataset(
        [(np.array([np.nan, 1.0]), P, ""), (np.array([0.0, 1.0]), N, "")], [P, N]
    )
    with pytest.raises(TrainingError):
        train_gbdt(ds, rounds=1, depth=1, lr=0.1)


# -- predict ----------------------------------------------------------------------

def test_predict_argmax_and_tie_break():
    ds = small_dataset()
    model = train_naive_bayes(ds)
    # Force an exact tie: equal scores pick the earlier label in label_order.
    model.parameters["log_prior"] = np.log(np.array([0.25, 0.25, 0.5]))
    label, _ = predict(model, np.zeros(3))
    assert label == S
    model.parameters["log_prior"] = np.log(np.array([0.4, 0.4, 0.2]))
    assert predict(model, np.zeros(3))[0] == P  # tie P/N -> P first in order


def test_predict_width_mismatch():
    model = train_naive_bayes(small_dataset())
    with pytest.raises(DimensionError):
        predict(model, np.zeros(5))


def test_score_vectors_sum_to_one_all_learners():
    ds = small_dataset()
    models = [
        train_naive_bayes(ds),
        train_maxent(ds, epochs=50),
        train_gbdt(ds, rounds=5, depth=2, lr=0.2),
    ]
    rng = np.random.default_rng(2)
    for model in models:
        for _ in range(10):
            scores = model.predict_scores(rng.normal(size=3))
            assert scores.min() >= 0.0
            assert scores.sum() == pytest.approx(1.0, abs=1e-6)


# -- evaluation --------------------------------------------------------------------

def test_f1_formula():
    assert f1_score(0.5, 1.0) == pytest.approx(2 / 3, abs=1e-4)
    assert f1_score(0.0, 0.0) == 0.0


def test_confusion_metrics():
    # TP=8, FP=2, FN=4 inside a 20-example pool.
    pairs = [(P, P)] * 8 + [(N, P)] * 2 + [(P, N)] * 4 + [(N, N)] * 6
    report = evaluate_predictions(pairs, [P, N])
    m = report.per_label[P]
    assert m.precision == pytest.approx(0.8)
    assert m.recall == pytest.approx(2 / 3, abs=1e-4)
    assert m.f1 == pytest.approx(0.7273, abs=1e-4)


def test_perfect_classifier_metrics():
    pairs = [(P, P)] * 5 + [(N, N)] * 5
    report = evaluate_predictions(pairs, [P, N])
    for label in (P, N):
        assert report.per_label[label].accuracy == 1.0
        assert report.per_label[label].f1 == 1.0
    assert report.macro_f1 == 1.0


def test_stratified_folds_partition():
    ds = small_dataset()
    folds = stratified_folds(ds, 2)
    seen = sorted(i for fold in folds for i in fold)
    assert seen == list(range(len(ds)))


def test_cross_validate_small_class_rejected():
    ds = LabeledDataset(
        [(np.array([1.0]), P, "")] * 3 + [(np.array([0.0]), N, "")], [P, N]
    )
    with pytest.raises(ConfigurationError, match="Negative"):
        cross_validate(ds, 2, train_naive_bayes)


def test_cross_validate_pools_predictions():
    report = cross_validate(small_dataset(), 2, lambda d: train_naive_bayes(d, 1.0))
    assert isinstance(report, EvalReport)
    assert report.fold_count == 2
    assert set(report.per_label) == {P, N, S}


# -- serialization ------------------------------------------------------------------

@pytest.mark.parametrize("trainer", [
    lambda d: train_naive_bayes(d),
    lambda d: train_maxent(d, epochs=30),
    lambda d: train_gbdt(d, rounds=3, depth=2, lr=0.2),
])
def test_model_json_round_trip(tmp_path, trainer):
    ds = small_dataset()
    model = trainer(ds)
    path = tmp_path / "model.json"
    save_model(model, str(path))
    loaded = load_model(str(path))
    x = np.array([0.2, 0.7, 0.1])
    assert np.allclose(loaded.predict_scores(x), model.predict_scores(x))
    assert loaded.label_order == model.label_order


def test_model_schema_version_checked():
    d = model_to_dict(train_naive_bayes(small_dataset()))
    d["schema_version"] = 99
    with pytest.raises(ConfigurationError):
        model_from_dict(json.loads(json.dumps(d)))
