"""Latent-Gaussian copula backend over mode-normalized marginals.

Each column is mapped to a standard-normal score (continuous: averaged ranks
of the observed values; discrete: midpoint of the category's interval of
cumulative frequency). The dependence structure is the shrunk correlation
matrix of those scores. Sampling draws correlated normals and inverts each
column's transform.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import norm, rankdata

from polsynth import rng as _rng
from polsynth.dataset import Column, Kind, Schema, Table
from polsynth.errors import PolsynthError
from polsynth.synth.gmm import K_MAX, ModeModel, fit_gmm, mode_denormalize, mode_normalize

MODEL_FORMAT = "polsynth-copula"
MODEL_VERSION = 1
MIN_ROWS = 30
DEFAULT_SHRINKAGE = 0.05
SHRINKAGE_STEP = 0.05


def _sort_categories(tokens) -> list[str]:
    toks = list(tokens)
    try:
        return sorted(toks, key=lambda t: (float(t), t))
    except ValueError:
        return sorted(toks)


@dataclass(frozen=True)
class TabularModel:
    schema: Schema
    mode_models: dict
    quantiles: dict = field(repr=False)
    categories: dict
    frequencies: dict
    correlation: np.ndarray = field(repr=False)
    shrinkage: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.correlation.flags.writeable = False

    def cumulative(self, name: str) -> np.ndarray:
        cum = np.cumsum(self.frequencies[name])
        cum[-1] = 1.0
        return cum

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "schema": [{"name": c.name, "kind": c.kind.value, "tags": sorted(c.tags)} for c in self.schema.columns],
            "mode_models": {k: v.to_dict() for k, v in self.mode_models.items()},
            "quantiles": {k: v.tolist() for k, v in self.quantiles.items()},
            "categories": self.categories,
            "frequencies": {k: v.tolist() for k, v in self.frequencies.items()},
            "correlation": self.correlation.tolist(),
            "shrinkage": self.shrinkage,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d) -> "TabularModel":
        if d.get("format") != MODEL_FORMAT:
            raise PolsynthError("not a polsynth model file")
        if d.get("version") != MODEL_VERSION:
            raise PolsynthError(f"unsupported model version {d.get('version')}")
        schema = Schema(tuple(Column(c["name"], Kind(c["kind"]), frozenset(c["tags"])) for c in d["schema"]))
        return cls(schema,
                   {k: ModeModel.from_dict(v) for k, v in d["mode_models"].items()},
                   {k: np.array(v, dtype=float) for k, v in d["quantiles"].items()},
                   {k: list(v) for k, v in d["categories"].items()},
                   {k: np.array(v, dtype=float) for k, v in d["frequencies"].items()},
                   np.array(d["correlation"], dtype=float), float(d["shrinkage"]), dict(d["metadata"]))


def save_model(model: TabularModel, path, header: dict | None = None) -> None:
    d = model.to_dict()
    if header:
        d["header"] = dict(header)
    Path(path).write_text(json.dumps(d, sort_keys=True) + "\n", encoding="utf-8")


def load_model(path) -> TabularModel:
    return TabularModel.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _pairwise_corr(scores: np.ndarray, observed: np.ndarray) -> np.ndarray:
    d = scores.shape[1]
    c = np.eye(d)
    for i in range(d):
        for j in range(i + 1, d):
            m = observed[:, i] & observed[:, j]
            if m.sum() < 3:
                continue
            a, b = scores[m, i], scores[m, j]
            a, b = a - a.mean(), b - b.mean()
            den = np.sqrt((a * a).sum() * (b * b).sum())
            c[i, j] = c[j, i] = (a * b).sum() / den if den > 0 else 0.0
    return c


def shrink_to_pd(corr: np.ndarray, shrinkage: float = DEFAULT_SHRINKAGE) -> tuple[np.ndarray, float]:
    """(1 - lam) C + lam I, raising lam in 0.05 steps until positive definite."""
    lam = float(shrinkage)
    eye = np.eye(corr.shape[0])
    while True:
        r = (1.0 - lam) * corr + lam * eye
        r = (r + r.T) / 2.0
        np.fill_diagonal(r, 1.0)
        if np.linalg.eigvalsh(r).min() > 1e-10:
            return r, lam
        if lam >= 1.0:
            return eye, 1.0
        lam = min(1.0, round(lam + SHRINKAGE_STEP, 10))


def fit(table: Table, schema: Schema | None = None, shrinkage: float = DEFAULT_SHRINKAGE,
        seed: int = 0, k_max: int = K_MAX, min_rows: int = MIN_ROWS) -> TabularModel:
    schema = schema or table.schema
    if not 0.0 <= shrinkage <= 1.0:
        raise ValueError("shrinkage must lie in [0, 1]")
    n = table.n_rows
    if n < min_rows:
        raise PolsynthError(f"table has {n} rows; fitting needs at least {min_rows} "
                            "(too few rows for stable marginals and correlations)")
    d = len(schema)
    scores = np.zeros((n, d))
    observed = np.zeros((n, d), dtype=bool)
    mode_models, quantiles, categories, frequencies = {}, {}, {}, {}
    for j, col in enumerate(schema.columns):
        miss = table.missing(col.name)
        observed[:, j] = ~miss
        vals = table[col.name][~miss]
        if vals.size == 0:
            raise PolsynthError(f"column {col.name!r} has no observed values")
        if col.kind is Kind.CONTINUOUS:
            vals = vals.astype(np.float64)
            mm = fit_gmm(vals, k_max=k_max, seed=_rng.derive_seed(seed, _rng.FIT, j))
            mode_models[col.name] = mm
            gen = _rng.substream(seed, _rng.FIT, j, 1)
            modes, alpha = mode_normalize(vals, mm, gen)
            quantiles[col.name] = np.sort(mode_denormalize(modes, alpha, mm))
            u = rankdata(vals, method="average") / (vals.size + 1)
            scores[~miss, j] = norm.ppf(u)
        else:
            cats = _sort_categories(set(vals))
            counts = np.array([np.sum(vals == c) for c in cats], dtype=float)
            freqs = counts / counts.sum()
            categories[col.name] = cats
            frequencies[col.name] = freqs
            cum = np.concatenate([[0.0], np.cumsum(freqs)])
            cum[-1] = 1.0
            mids = norm.ppf((cum[:-1] + cum[1:]) / 2.0)
            lookup = dict(zip(cats, mids))
            scores[~miss, j] = [lookup[v] for v in vals]
    corr, lam = shrink_to_pd(_pairwise_corr(scores, observed), shrinkage)
    return TabularModel(schema, mode_models, quantiles, categories, frequencies, corr, lam,
                        {"n_rows": int(n), "seed": int(seed), "k_max": int(k_max)})


def _invert(model: TabularModel, z: np.ndarray) -> Table:
    u = norm.cdf(z)
    data = {}
    for j, col in enumerate(model.schema.columns):
        if col.kind is Kind.CONTINUOUS:
            q = model.quantiles[col.name]
            pos = (np.arange(q.size) + 0.5) / q.size
            data[col.name] = np.interp(u[:, j], pos, q)
        else:
            cats = model.categories[col.name]
            idx = np.searchsorted(model.cumulative(col.name), u[:, j], side="right")
            idx = np.minimum(idx, len(cats) - 1)
            data[col.name] = [cats[i] for i in idx]
    return Table(model.schema, data)


def _standard_normals(model: TabularModel, n: int, seed: int, purpose: int) -> np.ndarray:
    d = len(model.schema)
    return np.column_stack([_rng.substream(seed, purpose, j).standard_normal(n) for j in range(d)]) \
        if d else np.zeros((n, 0))


def sample(model: TabularModel, n: int, seed: int) -> Table:
    if n < 1:
        raise ValueError("sample size must be at least 1")
    e = _standard_normals(model, n, seed, _rng.SAMPLE)
    chol = np.linalg.cholesky(model.correlation)
    return _invert(model, e @ chol.T)


def sample_conditional(model: TabularModel, column: str, category: str, n: int, seed: int) -> Table:
    """Sample rows whose ``column`` equals ``category``.

    The conditioning score is drawn from the standard normal truncated to
    the category's interval; the other scores come from the exact Gaussian
    conditional on it.
    """
    if n < 1:
        raise ValueError("sample size must be at least 1")
    if column not in model.categories:
        raise PolsynthError(f"{column!r} is not a discrete column of the model")
    cats = model.categories[column]
    if category not in cats:
        raise PolsynthError(f"unknown category {category!r} for column {column!r}")
    c = cats.index(category)
    freqs = model.frequencies[column]
    if freqs[c] <= 0:
        raise PolsynthError(f"category {category!r} has zero frequency")
    if freqs[c] >= 1.0:
        return sample(model, n, seed)
    j = model.schema.index(column)
    lo = float(np.sum(freqs[:c]))
    hi = min(1.0, lo + float(freqs[c]))
    gen = _rng.substream(seed, _rng.CONDITIONAL, j)
    # stay strictly inside the interval so the inverse lookup is unambiguous
    width = hi - lo
    u = lo + width * (1e-9 + (1 - 2e-9) * gen.random(n))
    zj = norm.ppf(u)
    r = model.correlation
    others = [i for i in range(r.shape[0]) if i != j]
    cov_oj = r[others, j]
    cond_cov = r[np.ix_(others, others)] - np.outer(cov_oj, cov_oj)
    cond_cov = (cond_cov + cond_cov.T) / 2.0
    chol = np.linalg.cholesky(cond_cov + 1e-12 * np.eye(len(others)))
    e = np.column_stack([_rng.substream(seed, _rng.CONDITIONAL, i, 1).standard_normal(n) for i in others]) \
        if others else np.zeros((n, 0))
    z = np.empty((n, r.shape[0]))
    z[:, j] = zj
    z[:, others] = zj[:, None] * cov_oj[None, :] + e @ chol.T
    # u lies inside the category interval; pin the column against rounding at the edges
    return _invert(model, z).replace(**{column: [category] * n})
