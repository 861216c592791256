import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polsynth.dataset import (Column, Kind, Schema, Table, infer_schema, load_schema, load_table, split,
                              summarize, write_schema, write_table)
from polsynth.errors import TableError


def _write(tmp_path, text, name="t.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_load_simple(tmp_path):
    t = load_table(_write(tmp_path, "a,b,c\n1,x,2.5\n3,y,4.5\n"))
    assert t.n_rows == 2
    assert t.schema.names == ["a", "b", "c"]


def test_short_row_reports_line(tmp_path):
    with pytest.raises(TableError, match="line 3"):
        load_table(_write(tmp_path, "a,b,c\n1,2,3\n4,5\n"))


def test_bad_continuous_cell_names_column(tmp_path):
    schema = Schema((Column("a", Kind.CONTINUOUS), Column("b", Kind.DISCRETE)))
    with pytest.raises(TableError, match="'a'") as exc:
        load_table(_write(tmp_path, "a,b\n1,x\nabc,y\n"), schema)
    assert exc.value.line == 3


def test_quoted_fields_and_missing(tmp_path):
    schema = Schema((Column("a", Kind.CONTINUOUS), Column("b", Kind.DISCRETE)))
    t = load_table(_write(tmp_path, 'a,b\n1.5,"x, y"\n,z\n2,\n'), schema)
    assert t["b"][0] == "x, y"
    assert t.missing("a").tolist() == [False, True, False]
    assert t.missing("b").tolist() == [False, False, True]


def test_infinite_cell_rejected(tmp_path):
    schema = Schema((Column("a", Kind.CONTINUOUS),))
    with pytest.raises(TableError):
        load_table(_write(tmp_path, "a\n1\ninf\n"), schema)


def test_infer_schema_rules():
    header = ["x", "flag", "small"]
    rows = [[str(0.1 + 1.37 * i), "yes" if i % 2 else "no", str(i % 5)] for i in range(200)]
    s = infer_schema(header, rows)
    assert s["x"].kind is Kind.CONTINUOUS
    assert s["flag"].kind is Kind.DISCRETE
    assert s["small"].kind is Kind.DISCRETE
    assert infer_schema(header, rows, distinct_threshold=3)["small"].kind is Kind.CONTINUOUS
    with pytest.raises(TableError):
        infer_schema(header, [])


def test_schema_invariants():
    with pytest.raises(TableError):
        Schema((Column("a", Kind.DISCRETE), Column("a", Kind.CONTINUOUS)))
    with pytest.raises(TableError):
        Column("", Kind.DISCRETE)


def _table(n):
    schema = Schema((Column("v", Kind.CONTINUOUS), Column("c", Kind.DISCRETE)))
    return Table(schema, {"v": np.arange(n, dtype=float), "c": [str(i % 3) for i in range(n)]})


def test_split_sizes_and_determinism():
    t = _table(100)
    tr, ho = split(t, 0.2, 7)
    assert (tr.n_rows, ho.n_rows) == (80, 20)
    assert set(tr["v"]).isdisjoint(ho["v"])
    assert set(tr["v"]) | set(ho["v"]) == set(range(100))
    tr2, ho2 = split(t, 0.2, 7)
    assert tr.equals(tr2) and ho.equals(ho2)
    assert not split(t, 0.2, 8)[1].equals(ho)


@pytest.mark.parametrize("fraction", [0.0, 1.0, -0.1, 1.5])
def test_split_rejects_fraction(fraction):
    with pytest.raises(ValueError):
        split(_table(10), fraction, 0)


def test_split_holdout_frozen():
    # PCG64 seeded through SeedSequence is stable across numpy versions and platforms
    _, ho = split(_table(20), 0.25, 7)
    assert ho["v"].tolist() == [3.0, 5.0, 11.0, 14.0, 16.0]


def test_summarize_examples():
    schema = Schema((Column("x", Kind.CONTINUOUS), Column("c", Kind.DISCRETE), Column("m", Kind.DISCRETE)))
    t = Table(schema, {"x": [1.0, 2.0, 3.0, np.nan], "c": ["A", "A", "B", "B"], "m": ["p", None, "q", "q"]})
    stats = {s.name: s for s in summarize(t)}
    assert (stats["x"].mean, stats["x"].min, stats["x"].max) == (2.0, 1.0, 3.0)
    assert stats["x"].missing_count == 1
    assert stats["c"].frequencies == {"A": 0.5, "B": 0.5}
    assert stats["m"].missing_count == 1
    assert stats["m"].frequencies == pytest.approx({"p": 1 / 3, "q": 2 / 3})


def test_summarize_all_missing_warns():
    schema = Schema((Column("x", Kind.CONTINUOUS),))
    t = Table(schema, {"x": [np.nan, np.nan]})
    with pytest.warns(UserWarning):
        (s,) = summarize(t)
    assert s.count == 0 and s.warning


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from(["a", "b", "c", "d", None]), min_size=1, max_size=40).filter(
    lambda v: any(x is not None for x in v)))
def test_frequencies_sum_to_one(values):
    t = Table(Schema((Column("c", Kind.DISCRETE),)), {"c": values})
    (s,) = summarize(t)
    assert abs(sum(s.frequencies.values()) - 1.0) <= 1e-9


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.one_of(finite, st.none()),
                          st.one_of(st.text(st.characters(blacklist_categories=("Cs", "Cc")), min_size=1,
                                            max_size=6).filter(lambda s: s.strip() == s and not s.startswith("#")),
                                    st.none())),
                min_size=1, max_size=15))
def test_roundtrip_through_file(tmp_path_factory, rows):
    schema = Schema((Column("x", Kind.CONTINUOUS), Column("label", Kind.DISCRETE)))
    t = Table(schema, {"x": [np.nan if r[0] is None else r[0] for r in rows], "label": [r[1] for r in rows]})
    path = tmp_path_factory.mktemp("rt") / "t.csv"
    write_table(t, path, header_line="# provenance line")
    assert load_table(path, schema).equals(t)


def test_schema_file_roundtrip(tmp_path):
    s = Schema((Column("a", Kind.CONTINUOUS, {"PII", "location"}), Column("b", Kind.DISCRETE)))
    write_schema(s, tmp_path / "s.csv")
    assert load_schema(tmp_path / "s.csv") == s
