import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import ks_2samp, wasserstein_distance

from oracles import emd_bruteforce, emd_categorical_lp, ks_bruteforce
from polsynth.dataset import Column, Kind, Schema, Table
from polsynth.metrics import (category_distribution, cdf_points, centroid_distance, emd_1d, emd_categorical,
                              explained_variance, ks_categorical, ks_stat, normalized_emd, pca_project)

samples = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=8)


def test_emd_examples():
    assert emd_1d([0.0], [1.0]) == 1.0
    assert emd_1d([1, 2, 3], [1, 2, 3]) == 0.0
    assert emd_1d([0, 0], [0, 2]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        emd_1d([], [1.0])


def test_ks_examples():
    assert ks_stat([1, 2, 3], [1, 2, 3]) == 0.0
    assert ks_stat([0, 0], [5, 5]) == 1.0
    assert ks_stat([1, 2], [2, 3]) == pytest.approx(0.5)


@settings(max_examples=150, deadline=None)
@given(samples, samples)
def test_emd_matches_transport_lp(a, b):
    assert abs(emd_1d(a, b) - emd_bruteforce(a, b)) <= 1e-9 * max(1.0, max(map(abs, a + b)))


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
@settings(max_examples=150, deadline=None)
@given(st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=60),
       st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=60))
def test_emd_and_ks_match_scipy(a, b):
    assert emd_1d(a, b) == pytest.approx(wasserstein_distance(a, b), abs=1e-9)
    assert ks_stat(a, b) == pytest.approx(ks_2samp(a, b, method="asymp").statistic, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(samples, samples, samples)
def test_emd_metric_axioms(a, b, c):
    assert emd_1d(a, b) >= 0
    assert emd_1d(a, a) == 0
    assert emd_1d(a, b) == pytest.approx(emd_1d(b, a), abs=1e-9)
    assert emd_1d(a, c) <= emd_1d(a, b) + emd_1d(b, c) + 1e-6


@settings(max_examples=100, deadline=None)
@given(samples, samples)
def test_ks_bounds_and_oracle(a, b):
    k = ks_stat(a, b)
    assert 0 <= k <= 1
    assert k == pytest.approx(ks_bruteforce(a, b), abs=1e-12)


cats = st.lists(st.sampled_from("abcdef"), min_size=1, max_size=30)


@settings(max_examples=100, deadline=None)
@given(cats, cats)
def test_categorical_emd_matches_lp(a, b):
    pa, pb = category_distribution(a), category_distribution(b)
    d = emd_categorical(pa, pb)
    assert abs(d - emd_categorical_lp(pa, pb)) <= 1e-9
    assert 0 <= d <= 1
    assert 0 <= ks_categorical(pa, pb) <= 1


def test_categorical_examples():
    assert emd_categorical({"a": 1.0}, {"b": 1.0}) == 1.0
    assert emd_categorical({"a": 0.5, "b": 0.5}, {"a": 0.5, "b": 0.5}) == 0.0
    assert ks_categorical({"a": 0.5, "b": 0.5}, {"a": 1.0}) == 0.5
    assert ks_categorical({"a": 0.5, "b": 0.5}, {"a": 1.0}, order=["b", "a"]) == 0.5
    assert category_distribution(["x", None, "y", "x"]) == pytest.approx({"x": 2 / 3, "y": 1 / 3})


def test_normalized_emd():
    assert normalized_emd([0.0, 10.0], [0.0, 10.0], Kind.CONTINUOUS) == 0.0
    assert normalized_emd([0.0, 10.0], [1.0, 11.0], Kind.CONTINUOUS) == pytest.approx(0.1)
    assert normalized_emd([3.0, 3.0], [4.0], Kind.CONTINUOUS) == pytest.approx(1.0)
    assert normalized_emd(["a", "b"], ["a", "a"], Kind.DISCRETE) == pytest.approx(0.5)
    assert isinstance(normalized_emd([0.0, 1.0], [0.5], "continuous"), float)


def test_cdf_points():
    assert cdf_points([2.0, 1.0, 2.0, 3.0]) == [(1.0, 0.25), (2.0, 0.75), (3.0, 1.0)]


def _mixed_table(gen, n, shift=0.0):
    schema = Schema((Column("a", Kind.CONTINUOUS), Column("b", Kind.CONTINUOUS), Column("c", Kind.DISCRETE)))
    a = gen.standard_normal(n) + shift
    b = 2 * a + 0.3 * gen.standard_normal(n)
    c = np.where(a > 0, "hi", "lo").astype(object)
    return Table(schema, {"a": a, "b": b, "c": c})


def test_pca_identical_clouds(rng):
    t = _mixed_table(rng, 300)
    pts = pca_project(t, t)
    assert len(pts) == 600
    assert centroid_distance(pts) == pytest.approx(0.0, abs=1e-12)
    var = explained_variance(pts)
    assert var[0] >= var[1]


def test_pca_shift_detected(rng):
    real = _mixed_table(rng, 400)
    synth = _mixed_table(rng, 400, shift=1.0)
    assert centroid_distance(pca_project(real, synth)) > 0.5


def test_pca_matches_reference_svd(rng):
    t = _mixed_table(rng, 200)
    pts = pca_project(t)
    x = np.column_stack([t["a"], t["b"], (t["c"] == "hi").astype(float), (t["c"] == "lo").astype(float)])
    z = (x - x.mean(0)) / x.std(0)
    _, s, vt = np.linalg.svd(z, full_matrices=False)
    ref = z @ vt[:2].T
    got = np.array([[p.pc1, p.pc2] for p in pts])
    for j in range(2):
        assert np.allclose(np.abs(got[:, j]), np.abs(ref[:, j]), atol=1e-8)


def test_pca_rank_deficient():
    schema = Schema((Column("a", Kind.CONTINUOUS), Column("b", Kind.CONTINUOUS)))
    t = Table(schema, {"a": [1.0, 2.0, 3.0], "b": [5.0, 5.0, 5.0]})
    pts = pca_project(t)
    assert all(p.pc2 == 0.0 for p in pts)
    with pytest.raises(ValueError):
        pca_project(t.take([0]))
