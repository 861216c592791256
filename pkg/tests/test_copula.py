import numpy as np
import pytest

from polsynth.dataset import Column, Kind, Schema, Table
from polsynth.errors import PolsynthError
from polsynth.synth import fit, load_model, sample, sample_conditional, save_model
from polsynth.synth.copula import shrink_to_pd


def _table(cols: dict, kinds: dict) -> Table:
    schema = Schema(tuple(Column(n, kinds[n]) for n in cols))
    return Table(schema, cols)


C, D = Kind.CONTINUOUS, Kind.DISCRETE


@pytest.fixture(scope="module")
def indep():
    gen = np.random.default_rng(10)
    t = _table({"a": gen.standard_normal(5000), "b": gen.exponential(size=5000)}, {"a": C, "b": C})
    return t, fit(t, k_max=3)


def test_independent_columns(indep):
    _, model = indep
    assert abs(model.correlation[0, 1]) < 0.05


def test_duplicate_columns():
    x = np.random.default_rng(11).normal(size=400)
    model = fit(_table({"a": x, "b": x.copy()}, {"a": C, "b": C}), k_max=2)
    assert model.correlation[0, 1] >= 0.9


def test_too_few_rows():
    with pytest.raises(PolsynthError, match="10 rows"):
        fit(_table({"a": np.arange(10.0)}, {"a": C}))


def test_correlation_invariants(full_model):
    r = full_model.correlation
    assert np.allclose(r, r.T)
    assert np.allclose(np.diag(r), 1.0)
    assert np.linalg.eigvalsh(r).min() > 0
    for name, f in full_model.frequencies.items():
        assert abs(f.sum() - 1) <= 1e-9


def test_shrinkage_raised_until_pd():
    bad = np.array([[1.0, 1.0, -1.0], [1.0, 1.0, 1.0], [-1.0, 1.0, 1.0]])
    r, lam = shrink_to_pd(bad, 0.05)
    assert lam > 0.05
    assert round(lam / 0.05, 9) == int(round(lam / 0.05))
    assert np.linalg.eigvalsh(r).min() > 0


def test_sample_contract(indep):
    t, model = indep
    with pytest.raises(ValueError):
        sample(model, 0, 1)
    a, b = sample(model, 300, 5), sample(model, 300, 5)
    assert a.equals(b)
    assert not a.equals(sample(model, 300, 6))
    assert not a.missing("a").any()


def test_single_gaussian_mean(indep):
    t, model = indep
    s = sample(model, 5000, 3)
    assert abs(s["a"].mean() - t["a"].mean()) <= 0.1


def test_marginal_ranks_preserved(indep):
    t, model = indep
    s = sample(model, 5000, 4)
    assert np.quantile(s["b"], 0.5) == pytest.approx(np.quantile(t["b"], 0.5), rel=0.1)


def test_discrete_frequencies_reproduced():
    gen = np.random.default_rng(12)
    cats = gen.choice(["x", "y", "z"], p=[0.6, 0.3, 0.1], size=3000).astype(object)
    t = _table({"c": cats, "v": gen.normal(size=3000)}, {"c": D, "v": C})
    model = fit(t, k_max=2)
    assert model.categories["c"] == ["x", "y", "z"]
    s = sample(model, 6000, 1)
    share = np.mean(s["c"] == "x")
    assert abs(share - 0.6) < 0.03


def test_numeric_category_order():
    gen = np.random.default_rng(13)
    t = _table({"c": gen.choice(["10", "2", "1"], size=60).astype(object)}, {"c": D})
    assert fit(t).categories["c"] == ["1", "2", "10"]


def test_model_file_roundtrip(tmp_path, indep):
    _, model = indep
    save_model(model, tmp_path / "m.json")
    loaded = load_model(tmp_path / "m.json")
    assert sample(loaded, 200, 9).equals(sample(model, 200, 9))


def test_conditional_sampling(train_model):
    rows = sample_conditional(train_model, "credit_access", "yes", 2000, 3)
    assert set(rows["credit_access"]) == {"yes"}
    base = sample(train_model, 2000, 3)
    j = train_model.schema.index("credit_access")
    k = train_model.schema.index("household_income")
    # "yes" sorts last, so a positive latent correlation pushes income up
    assert train_model.correlation[j, k] > 0
    assert rows["household_income"].mean() > base["household_income"].mean()


def test_conditional_degenerate_and_errors():
    gen = np.random.default_rng(14)
    t = _table({"c": np.array(["only"] * 50, dtype=object), "v": gen.normal(size=50)}, {"c": D, "v": C})
    model = fit(t, k_max=2)
    assert sample_conditional(model, "c", "only", 40, 2).equals(sample(model, 40, 2))
    with pytest.raises(PolsynthError):
        sample_conditional(model, "c", "other", 10, 2)
    with pytest.raises(PolsynthError):
        sample_conditional(model, "v", "1", 10, 2)
