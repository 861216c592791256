"""Attribute-inference and re-identification attacks against released data.

Both attacks treat the synthetic table as the attacker's only training
material and score against real records.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from polsynth import rng as _rng
from polsynth.dataset import Kind, Table
from polsynth.errors import PolsynthError
from polsynth.eval.classifiers import FeatureEncoder, train_classifier

N_SHUFFLES = 100
DEFAULT_DELTA = 0.25


@dataclass(frozen=True)
class AttackReport:
    attack: str
    targets: tuple
    rate: float
    baseline: float
    seed: int
    level: str | None = None
    config: dict = field(default_factory=dict)

    @property
    def advantage(self) -> float:
        return self.rate - self.baseline

    def to_record(self) -> dict:
        return {"record": "attack", "attack": self.attack, "targets": list(self.targets), "rate": self.rate,
                "baseline": self.baseline, "advantage": self.advantage, "level": self.level,
                "seed": self.seed, "config": self.config}


def _check_columns(tables, columns):
    for label, t in tables:
        for c in columns:
            if c not in t.schema:
                raise PolsynthError(f"column {c!r} missing from {label} table")


def attribute_inference_attack(synth: Table, real: Table, target: str, known, kind: str = "RF",
                               seed: int = 0, level: str | None = None) -> AttackReport:
    """Learn known -> target on synth, then predict target for the real rows."""
    known = list(known)
    if target in known:
        raise PolsynthError("target must not be one of the known columns")
    if not known:
        raise PolsynthError("attribute inference needs at least one known column")
    _check_columns([("synthetic", synth), ("real", real)], known + [target])
    if real.schema[target].kind is not Kind.DISCRETE:
        raise PolsynthError(f"target {target!r} is continuous; bin it before attacking")
    syn = synth.take(np.flatnonzero(~synth.missing(target)))
    rl = real.take(np.flatnonzero(~real.missing(target)))
    enc = FeatureEncoder.fit(syn, known)
    clf = train_classifier(kind, enc.transform(syn), syn[target], seed=_rng.derive_seed(seed, _rng.ATTACK))
    rate = clf.accuracy(enc.transform(rl), rl[target])
    majority_share = Counter(rl[target]).most_common(1)[0][1] / rl.n_rows
    return AttackReport("attribute_inference", (target,), rate, float(majority_share), seed, level,
                        {"known": known, "classifier": kind})


def _qi_distance(real: Table, synth: Table, qis, chunk: int = 512):
    """Index of the nearest synthetic row for each real row over the QIs."""
    cont = [c for c in qis if real.schema[c].kind is Kind.CONTINUOUS]
    disc = [c for c in qis if real.schema[c].kind is Kind.DISCRETE]
    stats = {}
    for c in cont:
        obs = real.observed(c)
        sd = float(obs.std()) if obs.size else 0.0
        stats[c] = (float(obs.mean()) if obs.size else 0.0, sd if sd > 0 else 1.0)
    zr = np.column_stack([(real[c] - stats[c][0]) / stats[c][1] for c in cont]) if cont else None
    zs = np.column_stack([(synth[c] - stats[c][0]) / stats[c][1] for c in cont]) if cont else None
    # encode discrete QIs as shared integer codes; missing never matches
    codes_r, codes_s = [], []
    for c in disc:
        vocab = {v: i for i, v in enumerate(sorted({v for v in real[c] if v is not None}
                                                   | {v for v in synth[c] if v is not None}))}
        codes_r.append(np.array([vocab.get(v, -1) if v is not None else -1 for v in real[c]]))
        codes_s.append(np.array([vocab.get(v, -2) if v is not None else -2 for v in synth[c]]))
    out = np.empty(real.n_rows, dtype=np.intp)
    for start in range(0, real.n_rows, chunk):
        sl = slice(start, min(start + chunk, real.n_rows))
        d = np.zeros((sl.stop - sl.start, synth.n_rows))
        if cont:
            # missing continuous cells contribute the maximal unit mismatch
            diff = np.abs(zr[sl, None, :] - zs[None, :, :])
            d += np.nan_to_num(diff, nan=1.0).sum(axis=2)
        for cr, cs in zip(codes_r, codes_s):
            d += cr[sl, None] != cs[None, :]
        out[sl] = np.argmin(d, axis=1)
    return out


def _agreement(real: Table, synth: Table, real_idx, synth_idx, sensitive, delta: float) -> np.ndarray:
    ok = np.ones(len(real_idx), dtype=bool)
    for c in sensitive:
        a, b = real[c][real_idx], synth[c][synth_idx]
        if real.schema[c].kind is Kind.CONTINUOUS:
            sd = float(real.observed(c).std()) if real.observed(c).size else 0.0
            ok &= np.abs(a - b) <= delta * sd
        else:
            ok &= np.array([x is not None and x == y for x, y in zip(a, b)], dtype=bool)
    return ok


def reidentification_attack(synth: Table, real: Table, quasi_identifiers, sensitive,
                            delta: float = DEFAULT_DELTA, seed: int = 0, n_shuffles: int = N_SHUFFLES,
                            level: str | None = None) -> AttackReport:
    """Link each real row to its nearest synthetic row over the QIs.

    A link succeeds when every sensitive attribute of the matched row agrees
    (discrete: equal; continuous: within delta * std). The baseline is the
    mean success rate of uniformly random pairings over ``n_shuffles`` draws.
    """
    qis, sensitive = list(quasi_identifiers), list(sensitive)
    if not qis:
        raise PolsynthError("re-identification needs at least one quasi-identifier")
    if not sensitive:
        raise PolsynthError("re-identification needs at least one sensitive column")
    if set(qis) & set(sensitive):
        raise PolsynthError("quasi-identifiers and sensitive columns must be disjoint")
    _check_columns([("synthetic", synth), ("real", real)], qis + sensitive)
    nearest = _qi_distance(real, synth, qis)
    idx = np.arange(real.n_rows)
    rate = float(_agreement(real, synth, idx, nearest, sensitive, delta).mean())
    gen = _rng.substream(seed, _rng.ATTACK, 1)
    rates = [_agreement(real, synth, idx, gen.integers(synth.n_rows, size=real.n_rows), sensitive, delta).mean()
             for _ in range(n_shuffles)]
    return AttackReport("reidentification", tuple(sensitive), rate, float(np.mean(rates)), seed, level,
                        {"quasi_identifiers": qis, "delta": delta, "n_shuffles": n_shuffles})
