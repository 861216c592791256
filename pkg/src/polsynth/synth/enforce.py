"""Sensitivity-scaled distortion and the EMD acceptance loop."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from polsynth import rng as _rng
from polsynth.dataset import Kind, Table
from polsynth.errors import PolsynthError
from polsynth.metrics import normalized_emd
from polsynth.sensitivity import LEVELS, AcceptanceBand, SensitivityLevel, SensitivityMap
from polsynth.synth.copula import TabularModel, sample

MAX_ITERS = 25
GROW = 1.5
SHRINK = 0.67
FLOOR_STEP = 0.01

DEFAULT_DISTORTION = {
    SensitivityLevel.LOW: (0.0, 0.0),
    SensitivityLevel.MEDIUM: (0.25, 0.05),
    SensitivityLevel.HIGH: (0.5, 0.1),
}


@dataclass(frozen=True)
class DistortionConfig:
    """Per-level (noise_scale, flip_prob).

    noise_scale is the Gaussian noise std as a fraction of the column std;
    flip_prob is the chance a discrete cell is redrawn uniformly over the
    column's categories.
    """

    levels: dict = field(default_factory=lambda: dict(DEFAULT_DISTORTION))

    def __post_init__(self):
        merged = dict(DEFAULT_DISTORTION)
        merged.update({SensitivityLevel(k): (float(v[0]), float(v[1])) for k, v in self.levels.items()})
        for lvl, (eps, p) in merged.items():
            if eps < 0 or not 0.0 <= p <= 1.0:
                raise PolsynthError(f"{lvl.value}: need noise_scale >= 0 and flip_prob in [0, 1]")
        for lo, hi in zip(LEVELS, LEVELS[1:]):
            if merged[hi][0] < merged[lo][0] or merged[hi][1] < merged[lo][1]:
                raise PolsynthError("distortion must be non-decreasing from Low to High")
        object.__setattr__(self, "levels", merged)

    def __getitem__(self, level) -> tuple[float, float]:
        return self.levels[SensitivityLevel(level)]


def _distort_columns(table: Table, settings: Mapping[str, tuple[float, float]], seed: int) -> Table:
    new = {}
    for j, col in enumerate(table.schema.columns):
        eps, p = settings.get(col.name, (0.0, 0.0))
        vals = table[col.name]
        gen = _rng.substream(seed, _rng.DISTORT, j)
        if col.kind is Kind.CONTINUOUS:
            if eps <= 0:
                continue
            sd = float(np.nanstd(vals)) if vals.size else 0.0
            new[col.name] = vals + gen.standard_normal(vals.size) * eps * sd
        else:
            if p <= 0:
                continue
            cats = sorted({v for v in vals if v is not None})
            if not cats:
                continue
            flip = gen.random(vals.size) < p
            draws = gen.integers(len(cats), size=vals.size)
            out = vals.copy()
            for i in np.flatnonzero(flip):
                if out[i] is not None:
                    out[i] = cats[draws[i]]
            new[col.name] = out
    return table.replace(**new) if new else table


def distort(table: Table, smap: SensitivityMap, config: DistortionConfig | None = None, seed: int = 0) -> Table:
    """Apply each attribute's level-dependent noise (continuous) or flips (discrete)."""
    config = config or DistortionConfig()
    settings = {name: config[smap.level(name)] for name in table.schema.names if name in smap}
    return _distort_columns(table, settings, seed)


@dataclass
class AttributeTrace:
    attribute: str
    level: SensitivityLevel
    band: AcceptanceBand
    emd: list = field(default_factory=list)
    noise_scale: list = field(default_factory=list)
    flip_prob: list = field(default_factory=list)
    final_emd: float = float("nan")
    final_noise_scale: float = 0.0
    final_flip_prob: float = 0.0
    status: str = "failed"

    def to_record(self) -> dict:
        return {
            "record": "attribute",
            "attribute": self.attribute,
            "level": self.level.value,
            "t_min": self.band.t_min,
            "t_max": self.band.t_max,
            "emd": list(self.emd),
            "noise_scale": list(self.noise_scale),
            "flip_prob": list(self.flip_prob),
            "final_emd": self.final_emd,
            "final_noise_scale": self.final_noise_scale,
            "final_flip_prob": self.final_flip_prob,
            "status": self.status,
        }


@dataclass
class EnforcementReport:
    attributes: dict
    iterations: int
    seed: int
    sample_size: int
    accepted_iteration: int | None

    @property
    def accepted(self) -> bool:
        return all(a.status == "accepted" for a in self.attributes.values())

    def failed(self) -> list[str]:
        return [k for k, a in self.attributes.items() if a.status != "accepted"]

    def to_records(self) -> list[dict]:
        summary = {"record": "summary", "iterations": self.iterations, "seed": self.seed,
                   "sample_size": self.sample_size, "accepted": self.accepted,
                   "accepted_iteration": self.accepted_iteration, "failed": self.failed()}
        return [summary] + [a.to_record() for a in self.attributes.values()]


def _measure(real: Table, synth: Table, names) -> dict:
    out = {}
    for name in names:
        kind = real.schema[name].kind
        out[name] = normalized_emd(real.observed(name), synth.observed(name), kind)
    return out


def _violation(emd: float, band: AcceptanceBand) -> float:
    if emd < band.t_min:
        return band.t_min - emd
    if emd > band.t_max:
        return emd - band.t_max
    return 0.0


def _adjust(eps: float, p: float, emd: float, band: AcceptanceBand, grow: float, shrink: float):
    if emd < band.t_min:
        eps = eps * grow if eps > 0 else FLOOR_STEP
        p = min(1.0, p * grow if p > 0 else FLOOR_STEP)
    elif emd > band.t_max:
        eps, p = eps * shrink, p * shrink
    return eps, p


def generate_enforced(model: TabularModel, real: Table, bands: list[AcceptanceBand], smap: SensitivityMap,
                      config: DistortionConfig | None = None, n: int | None = None,
                      max_iters: int = MAX_ITERS, seed: int = 0,
                      grow: float = GROW, shrink: float = SHRINK) -> tuple[Table, EnforcementReport]:
    """Sample, distort and measure until every attribute's EMD is inside its band.

    Violating attributes get their distortion scaled up (EMD below t_min) or
    down (above t_max) and the whole table is resampled with a fresh
    sub-seed. On exhaustion the iterate with the fewest violations (then the
    smallest total violation) is returned, its violators marked failed.
    """
    config = config or DistortionConfig()
    n = n or real.n_rows
    by_attr = {b.attribute: b for b in bands}
    missing = [c for c in model.schema.names if c not in by_attr or c not in smap]
    if missing:
        raise PolsynthError(f"bands and sensitivity map must cover every attribute; missing {missing}")
    names = model.schema.names
    settings = {name: config[smap.level(name)] for name in names}
    traces = {name: AttributeTrace(name, smap.level(name), by_attr[name]) for name in names}

    best = None
    accepted_at = None
    for it in range(max_iters):
        it_seed = _rng.derive_seed(seed, _rng.ENFORCE, it)
        synth = sample(model, n, it_seed)
        synth = _distort_columns(synth, settings, _rng.derive_seed(seed, _rng.ENFORCE, it, 1))
        emds = _measure(real, synth, names)
        for name in names:
            t = traces[name]
            t.emd.append(emds[name])
            t.noise_scale.append(settings[name][0])
            t.flip_prob.append(settings[name][1])
        violations = {name: _violation(emds[name], by_attr[name]) for name in names}
        score = (sum(v > 0 for v in violations.values()), sum(violations.values()))
        if best is None or score < best[0]:
            best = (score, it, synth, emds, dict(settings))
        if score[0] == 0:
            accepted_at = it + 1
            break
        for name, v in violations.items():
            if v > 0:
                settings[name] = _adjust(*settings[name], emds[name], by_attr[name], grow, shrink)

    _, best_it, synth, emds, used = best
    for name in names:
        t = traces[name]
        t.final_emd = emds[name]
        t.final_noise_scale, t.final_flip_prob = used[name]
        t.status = "accepted" if by_attr[name].contains(emds[name]) else "failed"
    report = EnforcementReport(traces, len(traces[names[0]].emd) if names else 0, seed, n, accepted_at)
    return synth, report
