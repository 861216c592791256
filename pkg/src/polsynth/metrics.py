"""Distribution distances and fidelity exports."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from polsynth.dataset import Kind, Table


def _as_sample(x) -> np.ndarray:
    arr = np.sort(np.asarray(x, dtype=np.float64).ravel())
    if arr.size == 0:
        raise ValueError("empirical distribution needs at least one value")
    return arr


def _cdfs(a: np.ndarray, b: np.ndarray):
    support = np.union1d(a, b)
    fa = np.searchsorted(a, support, side="right") / a.size
    fb = np.searchsorted(b, support, side="right") / b.size
    return support, fa, fb


def emd_1d(a, b) -> float:
    """Earth Mover's Distance between two 1-D samples.

    Integrates |F_a - F_b| exactly over the merged support; the empirical
    CDFs are piecewise constant between consecutive support points.
    """
    a, b = _as_sample(a), _as_sample(b)
    support, fa, fb = _cdfs(a, b)
    if support.size == 1:
        return 0.0
    return float(np.sum(np.abs(fa[:-1] - fb[:-1]) * np.diff(support)))


def ks_stat(a, b) -> float:
    a, b = _as_sample(a), _as_sample(b)
    _, fa, fb = _cdfs(a, b)
    return float(np.max(np.abs(fa - fb)))


def category_distribution(values) -> dict:
    vals = [v for v in values if v is not None]
    if not vals:
        raise ValueError("empirical distribution needs at least one value")
    counts = Counter(vals)
    return {k: counts[k] / len(vals) for k in sorted(counts)}


def emd_categorical(a: Mapping, b: Mapping) -> float:
    """EMD under unit ground distance, i.e. total variation."""
    keys = set(a) | set(b)
    return 0.5 * float(sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in sorted(keys, key=str)))


def ks_categorical(a: Mapping, b: Mapping, order=None) -> float:
    """KS statistic over a fixed category order (sorted keys by default)."""
    keys = list(order) if order is not None else sorted(set(a) | set(b), key=str)
    fa = np.cumsum([a.get(k, 0.0) for k in keys])
    fb = np.cumsum([b.get(k, 0.0) for k in keys])
    return float(np.max(np.abs(fa - fb))) if keys else 0.0


def normalized_emd(real, synthetic, kind: Kind) -> float:
    """EMD scaled so one band serves every attribute.

    Continuous: divided by the real column's range (unscaled when the range
    is zero). Discrete: total variation.
    """
    if Kind(kind) is Kind.DISCRETE:
        return emd_categorical(category_distribution(real), category_distribution(synthetic))
    r = _as_sample(real)
    span = r[-1] - r[0]
    d = emd_1d(r, synthetic)
    return float(d / span) if span > 0 else float(d)


def cdf_points(values) -> list[tuple[float, float]]:
    """Vertices of the empirical CDF step function."""
    arr = _as_sample(values)
    xs, counts = np.unique(arr, return_counts=True)
    cum = np.cumsum(counts)
    return [(float(x), float(c / arr.size)) for x, c in zip(xs, cum)]


@dataclass(frozen=True)
class ProjectedPoint:
    source: str
    pc1: float
    pc2: float


def _encode(table: Table, ref: Table, categories: dict):
    blocks = []
    for col in ref.schema.columns:
        if col.kind is Kind.CONTINUOUS:
            obs = ref.observed(col.name)
            mu = obs.mean() if obs.size else 0.0
            sd = obs.std() if obs.size else 0.0
            x = np.where(np.isnan(table[col.name]), mu, table[col.name])
            blocks.append(((x - mu) / (sd if sd > 0 else 1.0))[:, None])
        else:
            cats = categories[col.name]
            vals = table[col.name]
            onehot = np.array([[v == c for c in cats] for v in vals], dtype=float).reshape(len(vals), len(cats))
            blocks.append(onehot)
    return np.hstack(blocks) if blocks else np.zeros((table.n_rows, 0))


def pca_project(real: Table, synthetic: Table | None = None, dims: int = 2) -> list[ProjectedPoint]:
    """Project rows onto the top principal components of the real table.

    Continuous columns are z-scored with the real statistics and discrete
    columns one-hot encoded; the one-hot block is standardized too. Rank
    deficient data gets zero-padded components.
    """
    if dims != 2:
        raise ValueError("only 2-D projections are supported")
    if real.n_rows < 2:
        raise ValueError("projection needs at least two rows")
    categories = {}
    for name in real.schema.discrete():
        seen = set(v for v in real[name] if v is not None)
        if synthetic is not None:
            seen |= set(v for v in synthetic[name] if v is not None)
        categories[name] = sorted(seen)
    xr = _encode(real, real, categories)
    if xr.shape[1] < dims:
        raise ValueError(f"need at least {dims} encoded columns, have {xr.shape[1]}")
    mu = xr.mean(axis=0)
    sd = xr.std(axis=0)
    sd[sd == 0] = 1.0
    zr = (xr - mu) / sd
    cov = zr.T @ zr / (zr.shape[0] - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    basis = np.zeros((zr.shape[1], dims))
    for j in range(dims):
        if evals[j] > 1e-12 * max(evals[0], 1e-300):
            v = evecs[:, j]
            # sign convention: largest-magnitude loading positive
            basis[:, j] = v if v[np.argmax(np.abs(v))] >= 0 else -v
    out = [ProjectedPoint("real", float(p[0]), float(p[1])) for p in zr @ basis]
    if synthetic is not None:
        zs = (_encode(synthetic, real, categories) - mu) / sd
        out += [ProjectedPoint("synthetic", float(p[0]), float(p[1])) for p in zs @ basis]
    return out


def explained_variance(points: list[ProjectedPoint], source: str = "real") -> np.ndarray:
    pts = np.array([[p.pc1, p.pc2] for p in points if p.source == source])
    return pts.var(axis=0, ddof=1)


def centroid_distance(points: list[ProjectedPoint]) -> float:
    real = np.array([[p.pc1, p.pc2] for p in points if p.source == "real"])
    syn = np.array([[p.pc1, p.pc2] for p in points if p.source == "synthetic"])
    return float(np.linalg.norm(real.mean(axis=0) - syn.mean(axis=0)))
