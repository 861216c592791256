"""1-D Gaussian mixtures and mode-specific normalization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from polsynth import rng as _rng

K_MAX = 10
MAX_ITER = 200
TOL = 1e-6
ALPHA_SCALE = 4.0
_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class ModeModel:
    weights: np.ndarray
    means: np.ndarray
    stds: np.ndarray
    log_likelihood: float
    value_range: tuple
    degenerate: bool = False
    history: tuple = field(default=(), repr=False, compare=False)

    @property
    def k(self) -> int:
        return len(self.weights)

    def log_joint(self, x) -> np.ndarray:
        """log(pi_i N(x | mu_i, sigma_i)), shape (n, k)."""
        x = np.asarray(x, dtype=np.float64)[:, None]
        z = (x - self.means) / self.stds
        return np.log(self.weights) - 0.5 * z * z - np.log(self.stds) - 0.5 * _LOG_2PI

    def posterior(self, x) -> np.ndarray:
        lj = self.log_joint(np.atleast_1d(x))
        return np.exp(lj - logsumexp(lj, axis=1, keepdims=True))

    def to_dict(self) -> dict:
        return {"weights": self.weights.tolist(), "means": self.means.tolist(), "stds": self.stds.tolist(),
                "log_likelihood": self.log_likelihood, "value_range": list(self.value_range),
                "degenerate": self.degenerate}

    @classmethod
    def from_dict(cls, d) -> "ModeModel":
        return cls(np.array(d["weights"], dtype=float), np.array(d["means"], dtype=float),
                   np.array(d["stds"], dtype=float), float(d["log_likelihood"]),
                   tuple(d["value_range"]), bool(d.get("degenerate", False)))


def sigma_floor(values) -> float:
    sd = float(np.std(values)) if len(values) else 0.0
    return 1e-6 * sd if sd > 0 else 1e-6


def _kmeanspp(x: np.ndarray, k: int, gen: np.random.Generator) -> np.ndarray:
    centers = [x[gen.integers(x.size)]]
    for _ in range(1, k):
        d2 = np.min((x[:, None] - np.array(centers)[None, :]) ** 2, axis=1)
        total = d2.sum()
        if total <= 0:
            centers.append(x[gen.integers(x.size)])
        else:
            centers.append(x[gen.choice(x.size, p=d2 / total)])
    return np.sort(np.array(centers))


def _loglik(x, w, mu, sd) -> tuple[float, np.ndarray]:
    z = (x[:, None] - mu) / sd
    lj = (np.log(w) - np.log(sd) - 0.5 * _LOG_2PI) - 0.5 * z * z
    top = lj.max(axis=1, keepdims=True)
    p = np.exp(lj - top)
    tot = p.sum(axis=1, keepdims=True)
    p /= tot
    return float((np.log(tot) + top).sum()), p


def em(x: np.ndarray, k: int, gen: np.random.Generator, floor: float,
       max_iter: int = MAX_ITER, tol: float = TOL):
    """Run EM for a k-component mixture.

    Returns (weights, means, stds, log-likelihood trace). Stops when the
    per-sample log-likelihood gain drops below ``tol``. A component whose
    responsibility mass vanishes keeps its previous mean and std (its weight
    goes to the optimal value, zero), so the trace never decreases.
    """
    n = x.size
    mu = _kmeanspp(x, k, gen)
    # initial hard assignment to the nearest center
    assign = np.argmin(np.abs(x[:, None] - mu[None, :]), axis=1)
    sd = np.empty(k)
    w = np.empty(k)
    for i in range(k):
        members = x[assign == i]
        w[i] = max(members.size, 1) / n
        sd[i] = members.std() if members.size > 1 else x.std()
    w /= w.sum()
    sd = np.maximum(sd, floor)
    ll, resp = _loglik(x, w, mu, sd)
    trace = [ll]
    tiny = 1e-12 * n
    for _ in range(max_iter):
        nk = resp.sum(axis=0)
        w = np.maximum(nk / n, 1e-300)
        w /= w.sum()
        alive = nk > tiny
        new_mu = mu.copy()
        new_mu[alive] = (resp[:, alive] * x[:, None]).sum(axis=0) / nk[alive]
        var = (resp[:, alive] * (x[:, None] - new_mu[alive]) ** 2).sum(axis=0) / nk[alive]
        new_sd = sd.copy()
        new_sd[alive] = np.maximum(np.sqrt(var), floor)
        mu, sd = new_mu, new_sd
        ll, resp = _loglik(x, w, mu, sd)
        trace.append(ll)
        if (trace[-1] - trace[-2]) / n < tol:
            break
    return w, mu, sd, trace


def bic(log_likelihood: float, k: int, n: int) -> float:
    return -2.0 * log_likelihood + (3 * k - 1) * np.log(n)


def fit_gmm(values, k_max: int = K_MAX, seed: int = 0, max_iter: int = MAX_ITER,
            tol: float = TOL) -> ModeModel:
    """Fit mixtures with 1..k_max components and keep the lowest-BIC one."""
    x = np.asarray(values, dtype=np.float64).ravel()
    x = x[np.isfinite(x)]
    if x.size == 0:
        raise ValueError("cannot fit a mixture to an empty column")
    floor = sigma_floor(x)
    vrange = (float(x.min()), float(x.max()))
    distinct = np.unique(x).size
    if distinct < 2:
        model = ModeModel(np.array([1.0]), np.array([float(x[0])]), np.array([floor]), 0.0, vrange, True)
        ll, _ = _loglik(x, model.weights, model.means, model.stds)
        return ModeModel(model.weights, model.means, model.stds, ll, vrange, True, (ll,))
    best = None
    for k in range(1, min(k_max, distinct) + 1):
        gen = _rng.substream(seed, _rng.FIT, k)
        w, mu, sd, trace = em(x, k, gen, floor, max_iter, tol)
        score = bic(trace[-1], k, x.size)
        if best is None or score < best[0]:
            best = (score, w, mu, sd, trace)
    _, w, mu, sd, trace = best
    # drop components that carry no mass; renormalize
    keep = w > 1e-12
    w = w[keep] / w[keep].sum()
    return ModeModel(w, mu[keep], sd[keep], float(trace[-1]), vrange, False, tuple(trace))


def mode_normalize(value, model: ModeModel, gen: np.random.Generator):
    """Encode value(s) as (mode_id, alpha); mode_id is 1-based.

    The mode is drawn from the posterior responsibilities and
    alpha = clip((v - mu) / (4 sigma), -1, 1). Scalars give a scalar pair,
    arrays give a pair of arrays.
    """
    scalar = np.ndim(value) == 0
    v = np.atleast_1d(np.asarray(value, dtype=np.float64))
    post = model.posterior(v)
    cum = np.cumsum(post, axis=1)
    cum[:, -1] = 1.0
    u = gen.random(v.size)
    idx = np.minimum((u[:, None] > cum).sum(axis=1), model.k - 1)
    alpha = np.clip((v - model.means[idx]) / (ALPHA_SCALE * model.stds[idx]), -1.0, 1.0)
    if scalar:
        return int(idx[0]) + 1, float(alpha[0])
    return idx + 1, alpha


def mode_denormalize(mode_id, alpha, model: ModeModel):
    idx = np.asarray(mode_id) - 1
    if np.any(idx < 0) or np.any(idx >= model.k):
        raise ValueError(f"mode_id out of range 1..{model.k}")
    out = np.asarray(alpha, dtype=np.float64) * ALPHA_SCALE * model.stds[idx] + model.means[idx]
    return float(out) if np.ndim(out) == 0 else out
