import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.mixture import GaussianMixture

from polsynth import rng as _rng
from polsynth.synth.gmm import ModeModel, bic, em, fit_gmm, mode_denormalize, mode_normalize, sigma_floor


def _reference_k(x, ks=(1, 2, 3)):
    """BIC-preferred component count from an independent EM implementation."""
    scores = []
    for k in ks:
        gm = GaussianMixture(k, n_init=3, random_state=0).fit(x[:, None])
        scores.append(gm.bic(x[:, None]))
    return ks[int(np.argmin(scores))]


def test_single_gaussian_selects_one():
    x = np.random.default_rng(0).standard_normal(2000)
    m = fit_gmm(x)
    assert _reference_k(x) == 1
    assert m.k == 1


def test_two_modes_selected():
    gen = np.random.default_rng(1)
    x = np.concatenate([gen.normal(-5, 1, 1000), gen.normal(5, 1, 1000)])
    m = fit_gmm(x)
    assert _reference_k(x) == 2
    assert m.k == 2
    assert np.all(np.abs(np.sort(m.means) - [-5, 5]) <= 0.3)


def test_bic_agrees_with_reference_scoring():
    gen = np.random.default_rng(2)
    x = np.concatenate([gen.normal(0, 1, 600), gen.normal(6, 0.5, 400)])
    gm = GaussianMixture(2, n_init=3, random_state=0).fit(x[:, None])
    ll = gm.score(x[:, None]) * x.size
    assert bic(ll, 2, x.size) == pytest.approx(gm.bic(x[:, None]), rel=1e-12)
    m = fit_gmm(x)
    assert m.log_likelihood == pytest.approx(ll, rel=1e-4)


def test_constant_column():
    m = fit_gmm([7.0, 7.0, 7.0])
    assert (m.k, float(m.means[0]), float(m.stds[0])) == (1, 7.0, 1e-6)
    assert m.degenerate


def test_model_invariants_on_benchmark_columns(full_model):
    for name, m in full_model.mode_models.items():
        assert 1 <= m.k <= 10
        assert abs(m.weights.sum() - 1) <= 1e-9
        assert np.all(m.stds > 0)


def test_sigma_floor():
    assert sigma_floor([1.0, 1.0]) == 1e-6
    assert sigma_floor([0.0, 2.0]) == pytest.approx(1e-6)


def test_fit_is_deterministic():
    x = np.random.default_rng(3).gamma(2.0, size=500)
    a, b = fit_gmm(x, seed=4), fit_gmm(x, seed=4)
    assert np.array_equal(a.means, b.means) and np.array_equal(a.weights, b.weights)


def test_em_monotone_over_random_fits():
    violations = 0
    for i in range(200):
        gen = np.random.default_rng(i)
        n = int(gen.integers(20, 300))
        k_true = int(gen.integers(1, 4))
        x = np.concatenate([gen.normal(gen.uniform(-10, 10), gen.uniform(0.1, 3), n) for _ in range(k_true)])
        k = int(gen.integers(1, 6))
        _, _, _, trace = em(x, k, _rng.substream(i, _rng.FIT, k), sigma_floor(x))
        violations += int(np.any(np.diff(trace) < -1e-9))
    assert violations == 0


UNIT = ModeModel(np.array([1.0]), np.array([0.0]), np.array([1.0]), 0.0, (0.0, 1.0))


def test_normalize_examples():
    gen = np.random.default_rng(0)
    assert mode_normalize(2.0, UNIT, gen) == (1, 0.5)
    assert mode_normalize(8.0, UNIT, gen) == (1, 1.0)
    assert mode_denormalize(1, 0.5, UNIT) == 2.0
    other = ModeModel(np.array([1.0]), np.array([10.0]), np.array([2.0]), 0.0, (0.0, 1.0))
    assert mode_denormalize(1, -1.0, other) == 2.0
    with pytest.raises(ValueError):
        mode_denormalize(2, 0.0, UNIT)


def test_posterior_at_separated_mean():
    m = ModeModel(np.array([0.5, 0.5]), np.array([-5.0, 5.0]), np.array([1.0, 1.0]), 0.0, (-8.0, 8.0))
    post = m.posterior([5.0])[0]
    assert post[1] > 0.99
    modes = [mode_normalize(5.0, m, np.random.default_rng(s))[0] for s in range(50)]
    assert modes.count(2) >= 49


two = ModeModel(np.array([0.3, 0.7]), np.array([-2.0, 3.0]), np.array([0.5, 2.0]), 0.0, (-5.0, 9.0))


@settings(max_examples=200, deadline=None)
@given(st.floats(-20, 20, allow_nan=False), st.integers(0, 2**31))
def test_roundtrip_when_unclipped(v, seed):
    mode, alpha = mode_normalize(v, two, np.random.default_rng(seed))
    assert 1 <= mode <= 2 and -1 <= alpha <= 1
    if abs(v - two.means[mode - 1]) <= 4 * two.stds[mode - 1]:
        assert abs(mode_denormalize(mode, alpha, two) - v) <= 1e-9


def test_vectorized_normalize():
    v = np.linspace(-4, 8, 50)
    modes, alphas = mode_normalize(v, two, np.random.default_rng(1))
    assert modes.shape == alphas.shape == (50,)
    back = mode_denormalize(modes, alphas, two)
    inside = np.abs(v - two.means[modes - 1]) <= 4 * two.stds[modes - 1]
    assert np.allclose(back[inside], v[inside], atol=1e-9)


def test_dict_roundtrip():
    m = fit_gmm(np.random.default_rng(5).normal(size=200))
    d = ModeModel.from_dict(m.to_dict())
    assert np.array_equal(d.means, m.means) and d.value_range == m.value_range
