"""Train-on-synthetic, test-on-real utility comparison."""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass

import numpy as np

from polsynth import rng as _rng
from polsynth.dataset import Kind, Table
from polsynth.errors import PolsynthError
from polsynth.eval.classifiers import KINDS, FeatureEncoder, train_classifier


@dataclass(frozen=True)
class UtilityEntry:
    kind: str
    accuracy_real: float
    accuracy_synthetic: float

    @property
    def delta(self) -> float:
        return self.accuracy_synthetic - self.accuracy_real


@dataclass(frozen=True)
class UtilityReport:
    target: str
    entries: tuple
    majority_baseline: float
    test_rows: int
    test_fingerprint: str
    seed: int

    def entry(self, kind: str) -> UtilityEntry:
        return next(e for e in self.entries if e.kind == kind)

    def to_records(self) -> list[dict]:
        head = {"record": "utility", "target": self.target, "majority_baseline": self.majority_baseline,
                "test_rows": self.test_rows, "test_fingerprint": self.test_fingerprint, "seed": self.seed}
        return [head] + [{"record": "classifier", "kind": e.kind, "accuracy_real": e.accuracy_real,
                          "accuracy_synthetic": e.accuracy_synthetic, "delta": e.delta} for e in self.entries]


def table_fingerprint(table: Table) -> str:
    h = hashlib.sha256()
    for name in table.schema.names:
        h.update(name.encode())
        h.update(repr(list(table[name])).encode())
    return h.hexdigest()[:16]


def tstr(synth: Table, real_train: Table, real_test: Table, target: str,
         kinds=KINDS, seed: int = 0, params: dict | None = None) -> UtilityReport:
    """Train each kind on real_train and on synth; score both on the same real_test."""
    for label, t in (("synthetic", synth), ("real_train", real_train), ("real_test", real_test)):
        if target not in t.schema:
            raise PolsynthError(f"target {target!r} missing from {label} table")
    if real_train.schema[target].kind is not Kind.DISCRETE:
        raise PolsynthError(f"target {target!r} must be discrete")
    features = [n for n in real_train.schema.names if n != target]
    test_mask = ~real_test.missing(target)
    test = real_test.take(np.flatnonzero(test_mask))
    y_test = test[target]

    def prepare(t: Table):
        keep = np.flatnonzero(~t.missing(target))
        t = t.take(keep)
        enc = FeatureEncoder.fit(t, features)
        return enc, enc.transform(t), t[target]

    real_enc, x_real, y_real = prepare(real_train)
    syn_enc, x_syn, y_syn = prepare(synth)
    x_test_real, x_test_syn = real_enc.transform(test), syn_enc.transform(test)
    entries = []
    for i, kind in enumerate(kinds):
        s = _rng.derive_seed(seed, _rng.CLASSIFIER, i)
        acc_r = train_classifier(kind, x_real, y_real, (params or {}).get(kind), s).accuracy(x_test_real, y_test)
        acc_s = train_classifier(kind, x_syn, y_syn, (params or {}).get(kind), s).accuracy(x_test_syn, y_test)
        entries.append(UtilityEntry(kind, acc_r, acc_s))
    majority = Counter(y_real).most_common(1)[0][0]
    baseline = float(np.mean(y_test == majority))
    return UtilityReport(target, tuple(entries), baseline, test.n_rows, table_fingerprint(test), seed)
