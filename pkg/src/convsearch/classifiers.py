"""General intent classification over the 14 classes.

Three learners (multinomial Naive Bayes, Maximum Entropy, GBDT) behind a
common model interface, plus the stratified cross-validation harness and
per-class evaluation report. Per-class accuracy is one-vs-rest accuracy
(the report header says so).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from . import gbdt as _gbdt
from .errors import ConfigurationError, DimensionError, TrainingError
from .textfeat import FeatureVector


class IntentLabel(str, Enum):
    Positive = "Positive"
    Negative = "Negative"
    SmallTalk = "SmallTalk"
    News = "News"
    Wiki = "Wiki"
    Weather = "Weather"
    Joke = "Joke"
    LiveQA = "LiveQA"
    Movies = "Movies"
    Music = "Music"
    Opinion = "Opinion"
    Food = "Food"
    Transition = "Transition"
    Unrecognized = "Unrecognized"


SENTIMENT = (IntentLabel.Positive, IntentLabel.Negative)
INFORMATION_RETRIEVAL = (
    IntentLabel.SmallTalk,
    IntentLabel.News,
    IntentLabel.Wiki,
    IntentLabel.Weather,
    IntentLabel.Joke,
    IntentLabel.LiveQA,
    IntentLabel.Movies,
    IntentLabel.Music,
    IntentLabel.Opinion,
    IntentLabel.Food,
)
TRANSITIONAL = (IntentLabel.Transition, IntentLabel.Unrecognized)

# Fixed report/label order: sentiment, information retrieval, transitional.
LABEL_ORDER: list[IntentLabel] = [*SENTIMENT, *INFORMATION_RETRIEVAL, *TRANSITIONAL]

LABEL_GROUPS = {
    "S": SENTIMENT,
    "IR": INFORMATION_RETRIEVAL,
    "T": TRANSITIONAL,
}


@dataclass
class LabeledDataset:
    """Featurized training examples: (vector, label, raw text)."""

    examples: list[tuple[np.ndarray, IntentLabel, str]]
    label_order: list[IntentLabel] = field(default_factory=lambda: list(LABEL_ORDER))

    def __post_init__(self):
        self.class_counts: dict[IntentLabel, int] = {}
        for _, label, _ in self.examples:
            self.class_counts[label] = self.class_counts.get(label, 0) + 1

    def __len__(self) -> int:
        return len(self.examples)

    @property
    def feature_width(self) -> int:
        return len(self.examples[0][0]) if self.examples else 0

    def matrix(self) -> np.ndarray:
        return np.stack([x for x, _, _ in self.examples])

    def label_indices(self) -> np.ndarray:
        index = {label: i for i, label in enumerate(self.label_order)}
        return np.array([index[label] for _, label, _ in self.examples])

    def subset(self, indices: Sequence[int]) -> "LabeledDataset":
        return LabeledDataset([self.examples[i] for i in indices], self.label_order)


def _as_vector(fv: FeatureVector | np.ndarray) -> np.ndarray:
    return fv.concat() if isinstance(fv, FeatureVector) else np.asarray(fv, dtype=float)


@dataclass
class ClassifierModel:
    kind: str  # NaiveBayes | MaxEnt | GBDT
    label_order: list[IntentLabel]
    feature_width: int
    parameters: dict

    def predict_scores(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "NaiveBayes":
            return _nb_scores(self.parameters, x)
        if self.kind == "MaxEnt":
            return _maxent_scores(self.parameters, x)
        if self.kind == "GBDT":
            return self.parameters["ensemble"].predict_scores(x)
        raise ConfigurationError(f"unknown classifier kind {self.kind!r}")


def predict(model: ClassifierModel, fv: FeatureVector | np.ndarray) -> tuple[IntentLabel, np.ndarray]:
    """Argmax label with deterministic tie-break by label_order position."""
    x = _as_vector(fv)
    if len(x) != model.feature_width:
        raise DimensionError(
            f"feature width {len(x)} does not match model width {model.feature_width}"
        )
    scores = model.predict_scores(x)
    return model.label_order[int(np.argmax(scores))], scores


def _require_all_classes(data: LabeledDataset):
    missing = [lbl.value for lbl in data.label_order if data.class_counts.get(lbl, 0) == 0]
    if missing:
        raise TrainingError(f"classes with zero examples: {', '.join(missing)}")


# --- Naive Bayes -----------------------------------------------------------

def train_naive_bayes(data: LabeledDataset, alpha: float = 1.0) -> ClassifierModel:
    """Multinomial NB over non-negative feature weights with Laplace smoothing.

    Features that go negative in training (the embedding block) are shifted
    per-feature to non-negative; the shift is stored and applied at predict
    time, with clipping at zero for unseen lower values.
    """
    if alpha <= 0:
        raise TrainingError("naive bayes: alpha must be > 0")
    if not data.examples:
        raise TrainingError("naive bayes: empty dataset")
    _require_all_classes(data)

    X = data.matrix()
    y = data.label_indices()
    n_classes = len(data.label_order)

    shift = np.maximum(0.0, -X.min(axis=0))
    Xn = X + shift

    counts = np.zeros((n_classes, X.shape[1]))
    class_n = np.zeros(n_classes)
    for c in range(n_classes):
        rows = y == c
        class_n[c] = rows.sum()
        counts[c] = Xn[rows].sum(axis=0)

    log_prior = np.log(class_n / class_n.sum())
    totals = counts.sum(axis=1, keepdims=True)
    log_theta = np.log(counts + alpha) - np.log(totals + alpha * X.shape[1])

    return ClassifierModel(
        kind="NaiveBayes",
        label_order=list(data.label_order),
        feature_width=X.shape[1],
        parameters={"log_prior": log_prior, "log_theta": log_theta, "shift": shift},
    )


def _nb_scores(params: dict, x: np.ndarray) -> np.ndarray:
    xn = np.maximum(x + params["shift"], 0.0)
    logits = params["log_prior"] + params["log_theta"] @ xn
    return _softmax(logits)


# --- Maximum Entropy -------------------------------------------------------

def maxent_loss_grad(W: np.ndarray, b: np.ndarray, X: np.ndarray, Y: np.ndarray,
                     l2: float) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy + (l2/2)||W||^2 and its analytic gradient.

    Exposed separately so the finite-difference check can probe it.
    """
    n = X.shape[0]
    logits = X @ W + b
    logits -= logits.max(axis=1, keepdims=True)
    expz = np.exp(logits)
    P = expz / expz.sum(axis=1, keepdims=True)
    loss = -np.log(np.clip(P[np.arange(n), Y.argmax(axis=1)], 1e-300, None)).mean()
    loss += 0.5 * l2 * float((W**2).sum())
    diff = (P - Y) / n
    grad_w = X.T @ diff + l2 * W
    grad_b = diff.sum(axis=0)
    return float(loss), grad_w, grad_b


def train_maxent(data: LabeledDataset, l2: float = 1e-4, epochs: int = 300,
                 lr: float = 0.5) -> ClassifierModel:
    """Multinomial logistic regression by full-batch gradient descent."""
    if l2 < 0 or epochs < 1 or lr <= 0:
        raise TrainingError("maxent: l2 >= 0, epochs >= 1, lr > 0 required")
    _require_all_classes(data)

    X = data.matrix()
    y = data.label_indices()
    n_classes = len(data.label_order)
    Y = np.zeros((X.shape[0], n_classes))
    Y[np.arange(X.shape[0]), y] = 1.0

    W = np.zeros((X.shape[1], n_classes))
    b = np.zeros(n_classes)
    prev_loss = np.inf
    rising = 0
    for epoch in range(1, epochs + 1):
        loss, grad_w, grad_b = maxent_loss_grad(W, b, X, Y, l2)
        if loss > prev_loss + 1e-8:
            rising += 1
            if rising >= 3:
                raise TrainingError(f"maxent diverged at epoch {epoch}: loss rising")
        else:
            rising = 0
        prev_loss = loss
        W -= lr * grad_w
        b -= lr * grad_b

    return ClassifierModel(
        kind="MaxEnt",
        label_order=list(data.label_order),
        feature_width=X.shape[1],
        parameters={"W": W, "b": b},
    )


def _maxent_scores(params: dict, x: np.ndarray) -> np.ndarray:
    return _softmax(x @ params["W"] + params["b"])


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


# --- GBDT -------------------------------------------------------------------

def train_gbdt(data: LabeledDataset, rounds: int = 100, depth: int = 3,
               lr: float = 0.1) -> ClassifierModel:
    _require_all_classes(data)
    ensemble = _gbdt.fit_gbdt(
        data.matrix(), data.label_indices(), len(data.label_order), rounds, depth, lr
    )
    return ClassifierModel(
        kind="GBDT",
        label_order=list(data.label_order),
        feature_width=data.feature_width,
        parameters={"ensemble": ensemble},
    )


# --- Evaluation -------------------------------------------------------------

@dataclass
class LabelMetrics:
    accuracy: float
    precision: float
    recall: float
    f1: float


@dataclass
class EvalReport:
    """Pooled held-out metrics; per-class accuracy is one-vs-rest."""

    per_label: dict[IntentLabel, LabelMetrics]
    macro_f1: float
    fold_count: int
    header: str = "per-class accuracy is one-vs-rest accuracy"

    def to_dict(self) -> dict:
        return {
            "header": self.header,
            "fold_count": self.fold_count,
            "macro_f1": self.macro_f1,
            "per_label": {
                lbl.value: vars(m) for lbl, m in self.per_label.items()
            },
        }


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def evaluate_predictions(pairs: list[tuple[IntentLabel, IntentLabel]],
                         label_order: list[IntentLabel],
                         fold_count: int = 1) -> EvalReport:
    """Metrics over (true, predicted) pairs pooled across folds."""
    n = len(pairs)
    per_label: dict[IntentLabel, LabelMetrics] = {}
    f1s = []
    for label in label_order:
        tp = sum(1 for t, p in pairs if t == label and p == label)
        fp = sum(1 for t, p in pairs if t != label and p == label)
        fn = sum(1 for t, p in pairs if t == label and p != label)
        tn = n - tp - fp - fn
        acc = (tp + tn) / n if n else 0.0
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1 = f1_score(prec, rec)
        per_label[label] = LabelMetrics(acc, prec, rec, f1)
        f1s.append(f1)
    macro = float(np.mean(f1s)) if f1s else 0.0
    return EvalReport(per_label, macro, fold_count)


def stratified_folds(data: LabeledDataset, k: int, seed: int = 0) -> list[list[int]]:
    """Per-class assignment after a seeded within-class shuffle; every example
    lands in exactly one fold. The shuffle keeps folds representative when the
    dataset ordering carries structure (e.g. cycling utterance templates)."""
    small = [
        lbl.value for lbl in data.label_order
        if 0 < data.class_counts.get(lbl, 0) < k
    ]
    if small:
        raise ConfigurationError(f"classes smaller than k={k}: {', '.join(small)}")
    rng = random.Random(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    by_class: dict[IntentLabel, list[int]] = {}
    for i, (_, label, _) in enumerate(data.examples):
        by_class.setdefault(label, []).append(i)
    for label in data.label_order:
        indices = by_class.get(label, [])
        rng.shuffle(indices)
        for j, idx in enumerate(indices):
            folds[j % k].append(idx)
    return folds


Trainer = Callable[[LabeledDataset], ClassifierModel]


def cross_validate(data: LabeledDataset, k: int, trainer: Trainer) -> EvalReport:
    """Stratified k-fold CV; metrics pooled over held-out predictions."""
    if k < 2:
        raise ConfigurationError("cross_validate requires k >= 2")
    folds = stratified_folds(data, k)
    pairs: list[tuple[IntentLabel, IntentLabel]] = []
    for held_out in folds:
        held_set = set(held_out)
        train_idx = [i for i in range(len(data)) if i not in held_set]
        model = trainer(data.subset(train_idx))
        for i in held_out:
            x, true_label, _ = data.examples[i]
            pred_label, _ = predict(model, x)
            pairs.append((true_label, pred_label))
    return evaluate_predictions(pairs, data.label_order, fold_count=k)


# --- Serialization ----------------------------------------------------------

MODEL_SCHEMA_VERSION = 1


def model_to_dict(model: ClassifierModel) -> dict:
    out = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "kind": model.kind,
        "label_order": [lbl.value for lbl in model.label_order],
        "feature_width": model.feature_width,
    }
    if model.kind == "NaiveBayes":
        p = model.parameters
        out["parameters"] = {
            "log_prior": p["log_prior"].tolist(),
            "log_theta": p["log_theta"].tolist(),
            "shift": p["shift"].tolist(),
        }
    elif model.kind == "MaxEnt":
        out["parameters"] = {
            "W": model.parameters["W"].tolist(),
            "b": model.parameters["b"].tolist(),
        }
    elif model.kind == "GBDT":
        out["parameters"] = model.parameters["ensemble"].to_dict()
    else:
        raise ConfigurationError(f"unknown classifier kind {model.kind!r}")
    return out


def model_from_dict(d: dict) -> ClassifierModel:
    if d.get("schema_version") != MODEL_SCHEMA_VERSION:
        raise ConfigurationError(f"unsupported model schema {d.get('schema_version')!r}")
    kind = d["kind"]
    label_order = [IntentLabel(v) for v in d["label_order"]]
    p = d["parameters"]
    if kind == "NaiveBayes":
        params = {
            "log_prior": np.array(p["log_prior"]),
            "log_theta": np.array(p["log_theta"]),
            "shift": np.array(p["shift"]),
        }
    elif kind == "MaxEnt":
        params = {"W": np.array(p["W"]), "b": np.array(p["b"])}
    elif kind == "GBDT":
        params = {"ensemble": _gbdt.GbdtEnsemble.from_dict(p)}
    else:
        raise ConfigurationError(f"unknown classifier kind {kind!r}")
    return ClassifierModel(kind, label_order, d["feature_width"], params)


def save_model(model: ClassifierModel, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh)


def load_model(path: str) -> ClassifierModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
