"""The four utility classifiers and the table-to-matrix encoder they share.

Logistic regression is plain full-batch gradient descent on the multinomial
log-loss. The tree models wrap scikit-learn estimators with fixed
hyperparameters and seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.ensemble import GradientBoostingClassifier, RandomForestClassifier
from sklearn.tree import DecisionTreeClassifier

from polsynth.dataset import Kind, Table
from polsynth.errors import PolsynthError

KINDS = ("LR", "DT", "RF", "GBC")

DEFAULT_PARAMS = {
    "LR": {"learning_rate": 0.1, "epochs": 500, "l2": 1e-4},
    "DT": {"max_depth": 8, "min_leaf": 5},
    "RF": {"n_trees": 100, "max_depth": None, "min_leaf": 1},
    "GBC": {"n_stages": 100, "max_depth": 3, "learning_rate": 0.1},
}


@dataclass
class FeatureEncoder:
    """z-scores continuous columns and one-hot encodes discrete ones.

    Statistics and category lists come from the table passed to ``fit``;
    unseen categories encode as all zeros and missing continuous cells as
    the training mean.
    """

    columns: list
    means: dict = field(default_factory=dict)
    stds: dict = field(default_factory=dict)
    categories: dict = field(default_factory=dict)
    kinds: dict = field(default_factory=dict)

    @classmethod
    def fit(cls, table: Table, columns) -> "FeatureEncoder":
        enc = cls(list(columns))
        for name in enc.columns:
            kind = table.schema[name].kind
            enc.kinds[name] = kind
            obs = table.observed(name)
            if kind is Kind.CONTINUOUS:
                enc.means[name] = float(obs.mean()) if obs.size else 0.0
                sd = float(obs.std()) if obs.size else 0.0
                enc.stds[name] = sd if sd > 0 else 1.0
            else:
                enc.categories[name] = sorted(set(obs))
        return enc

    def transform(self, table: Table) -> np.ndarray:
        blocks = []
        for name in self.columns:
            vals = table[name]
            if self.kinds[name] is Kind.CONTINUOUS:
                x = np.where(np.isnan(vals), self.means[name], vals)
                blocks.append(((x - self.means[name]) / self.stds[name])[:, None])
            else:
                cats = np.array(self.categories[name], dtype=object)
                blocks.append((vals[:, None] == cats[None, :]).astype(float))
        return np.hstack(blocks) if blocks else np.zeros((table.n_rows, 0))


class LogisticRegression:
    def __init__(self, learning_rate=0.1, epochs=500, l2=1e-4):
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.l2 = l2

    def fit(self, x, y_idx, n_classes):
        n, d = x.shape
        self.w = np.zeros((d, n_classes))
        self.b = np.zeros(n_classes)
        onehot = np.eye(n_classes)[y_idx]
        for _ in range(self.epochs):
            p = self._proba(x)
            g = (p - onehot) / n
            self.w -= self.learning_rate * (x.T @ g + self.l2 * self.w)
            self.b -= self.learning_rate * g.sum(axis=0)
        return self

    def _proba(self, x):
        s = x @ self.w + self.b
        s -= s.max(axis=1, keepdims=True)
        e = np.exp(s)
        return e / e.sum(axis=1, keepdims=True)

    def predict_proba(self, x):
        return self._proba(x)

    def predict(self, x):
        return np.argmax(self._proba(x), axis=1)


@dataclass
class Classifier:
    kind: str
    classes: np.ndarray
    estimator: object
    params: dict
    seed: int

    def predict(self, features: np.ndarray) -> np.ndarray:
        return self.classes[np.asarray(self.estimator.predict(features), dtype=int)]

    def accuracy(self, features: np.ndarray, labels) -> float:
        return float(np.mean(self.predict(features) == np.asarray(labels, dtype=object)))


def train_classifier(kind: str, features, labels, params: dict | None = None, seed: int = 0) -> Classifier:
    if kind not in KINDS:
        raise PolsynthError(f"unknown classifier kind {kind!r}; expected one of {KINDS}")
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=object)
    classes = np.array(sorted(set(y)), dtype=object)
    if len(classes) < 2:
        raise PolsynthError("training labels contain a single class")
    if x.shape[0] < 10:
        raise PolsynthError(f"need at least 10 training rows, got {x.shape[0]}")
    y_idx = np.searchsorted(classes, y)
    p = {**DEFAULT_PARAMS[kind], **(params or {})}
    seed = int(seed) % (2**32)
    if kind == "LR":
        est = LogisticRegression(p["learning_rate"], p["epochs"], p["l2"]).fit(x, y_idx, len(classes))
    elif kind == "DT":
        est = DecisionTreeClassifier(criterion="gini", max_depth=p["max_depth"],
                                     min_samples_leaf=p["min_leaf"], random_state=seed).fit(x, y_idx)
    elif kind == "RF":
        est = RandomForestClassifier(n_estimators=p["n_trees"], max_features="sqrt", bootstrap=True,
                                     max_depth=p["max_depth"], min_samples_leaf=p["min_leaf"],
                                     random_state=seed, n_jobs=1).fit(x, y_idx)
    else:
        est = GradientBoostingClassifier(loss="log_loss", n_estimators=p["n_stages"], max_depth=p["max_depth"],
                                         learning_rate=p["learning_rate"], random_state=seed).fit(x, y_idx)
    return Classifier(kind, classes, est, p, seed)


def training_loss_curve(clf: Classifier) -> np.ndarray:
    """Per-stage training log-loss of a GBC model."""
    if clf.kind != "GBC":
        raise ValueError("loss curve is only recorded for GBC")
    return np.asarray(clf.estimator.train_score_)
