from collections import Counter

from polsynth import benchmark
from polsynth.dataset import Kind
from polsynth.eval import FeatureEncoder, train_classifier


def test_shape(bench_table):
    s = bench_table.schema
    assert bench_table.n_rows == 5000
    assert len(s.continuous()) == 12 and len(s.discrete()) == 8
    for name in s.discrete():
        assert 2 <= len(set(bench_table[name])) <= 6
    assert not any(bench_table.missing(n).any() for n in s.names)


def test_tags():
    tags = Counter(next(iter(c.tags)) if c.tags else None for c in benchmark.schema().columns)
    assert tags == {"PII": 10, None: 7, "public": 3}
    assert benchmark.schema()[benchmark.TARGET].kind is Kind.DISCRETE


def test_deterministic():
    assert benchmark.generate(1, n=300).equals(benchmark.generate(1, n=300))
    assert not benchmark.generate(1, n=300).equals(benchmark.generate(2, n=300))


def test_target_is_learnable(bench_split):
    train, test = bench_split
    features = [n for n in train.schema.names if n != benchmark.TARGET]
    enc = FeatureEncoder.fit(train, features)
    clf = train_classifier("RF", enc.transform(train), train[benchmark.TARGET], seed=0)
    assert clf.accuracy(enc.transform(test), test[benchmark.TARGET]) >= 0.90


def test_fail_safe_histogram(bench_map):
    assert {k.value: v for k, v in bench_map.histogram().items()} == {"Low": 3, "Medium": 0, "High": 17}
