"""Tabular data ingestion: schemas, tables, splits and column summaries.

Continuous columns are stored as float64 arrays in which NaN is the missing
marker (parsed cells are always finite). Discrete columns are object arrays of
``str`` tokens with ``None`` as the missing marker.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from polsynth import rng as _rng
from polsynth.errors import ConfigError, TableError

DEFAULT_DISTINCT_THRESHOLD = 20


class Kind(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class Column:
    name: str
    kind: Kind
    tags: frozenset = frozenset()

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise TableError("column names must be nonempty strings")
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "tags", frozenset(self.tags))


@dataclass(frozen=True)
class Schema:
    columns: tuple

    def __post_init__(self):
        cols = tuple(self.columns)
        names = [c.name for c in cols]
        dupes = sorted(n for n, k in Counter(names).items() if k > 1)
        if dupes:
            raise TableError(f"duplicate column names: {', '.join(dupes)}")
        object.__setattr__(self, "columns", cols)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    def __len__(self):
        return len(self.columns)

    def __getitem__(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name) -> bool:
        return any(c.name == name for c in self.columns)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def continuous(self) -> list[str]:
        return [c.name for c in self.columns if c.kind is Kind.CONTINUOUS]

    def discrete(self) -> list[str]:
        return [c.name for c in self.columns if c.kind is Kind.DISCRETE]

    def with_tags(self, tags: Mapping[str, Iterable[str]]) -> "Schema":
        return Schema(tuple(Column(c.name, c.kind, tags.get(c.name, c.tags)) for c in self.columns))


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Table:
    schema: Schema
    data: dict = field(repr=False)

    def __post_init__(self):
        data = {}
        n = None
        for col in self.schema.columns:
            if col.name not in self.data:
                raise TableError("missing data for column", column=col.name)
            if col.kind is Kind.CONTINUOUS:
                arr = np.array(self.data[col.name], dtype=np.float64)
                if np.isinf(arr).any():
                    raise TableError("continuous cells must be finite", column=col.name)
            else:
                arr = np.empty(len(self.data[col.name]), dtype=object)
                arr[:] = [None if v is None else str(v) for v in self.data[col.name]]
            if n is None:
                n = len(arr)
            elif len(arr) != n:
                raise TableError("columns have different lengths", column=col.name)
            data[col.name] = _frozen(arr)
        object.__setattr__(self, "data", data)

    @property
    def n_rows(self) -> int:
        if not self.schema.columns:
            return 0
        return len(self.data[self.schema.columns[0].name])

    def __len__(self):
        return self.n_rows

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[name]

    def missing(self, name: str) -> np.ndarray:
        arr = self.data[name]
        if self.schema[name].kind is Kind.CONTINUOUS:
            return np.isnan(arr)
        return np.array([v is None for v in arr], dtype=bool)

    def observed(self, name: str) -> np.ndarray:
        """Non-missing cells of a column."""
        return self.data[name][~self.missing(name)]

    def take(self, indices) -> "Table":
        idx = np.asarray(indices, dtype=np.intp)
        return Table(self.schema, {k: v[idx] for k, v in self.data.items()})

    def replace(self, **columns) -> "Table":
        data = dict(self.data)
        data.update(columns)
        return Table(self.schema, data)

    def rows(self):
        names = self.schema.names
        for i in range(self.n_rows):
            yield tuple(self.data[n][i] for n in names)

    def equals(self, other: "Table") -> bool:
        if self.schema != other.schema or self.n_rows != other.n_rows:
            return False
        for col in self.schema.columns:
            a, b = self.data[col.name], other.data[col.name]
            if col.kind is Kind.CONTINUOUS:
                if not np.array_equal(a, b, equal_nan=True):
                    return False
            elif list(a) != list(b):
                return False
        return True


@dataclass(frozen=True)
class ColumnStats:
    name: str
    kind: Kind
    count: int
    missing_count: int
    min: float | None = None
    max: float | None = None
    mean: float | None = None
    std: float | None = None
    frequencies: dict | None = None
    warning: str | None = None


def _is_number(token: str) -> bool:
    try:
        return math.isfinite(float(token))
    except ValueError:
        return False


def infer_schema(header: Sequence[str], rows: Sequence[Sequence[str]],
                 distinct_threshold: int = DEFAULT_DISTINCT_THRESHOLD) -> Schema:
    """Type each column from raw string cells.

    A column is discrete if any non-empty cell is non-numeric or if it has at
    most ``distinct_threshold`` distinct values; otherwise continuous.
    """
    if not rows:
        raise TableError("cannot infer a schema from an empty table")
    columns = []
    for j, name in enumerate(header):
        cells = [r[j] for r in rows if r[j] != ""]
        numeric = all(_is_number(c) for c in cells)
        distinct = len({float(c) for c in cells}) if numeric else len(set(cells))
        discrete = (not numeric) or distinct <= distinct_threshold
        columns.append(Column(name, Kind.DISCRETE if discrete else Kind.CONTINUOUS))
    return Schema(tuple(columns))


def _read_rows(path: Path):
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines(keepends=True)
    skip = 0
    while skip < len(lines) and lines[skip].startswith("#"):
        skip += 1
    reader = csv.reader(io.StringIO("".join(lines[skip:])))
    records = []
    for rec in reader:
        records.append((skip + reader.line_num, rec))
    records = [(ln, rec) for ln, rec in records if rec]
    if not records:
        raise TableError(f"{path}: no header row")
    return records[0][1], records[1:]


def load_table(path, schema: Schema | None = None,
               distinct_threshold: int = DEFAULT_DISTINCT_THRESHOLD) -> Table:
    header, records = _read_rows(Path(path))
    if len(set(header)) != len(header):
        raise TableError("duplicate names in header", line=1)
    width = len(header)
    for line, rec in records:
        if len(rec) != width:
            raise TableError(f"expected {width} fields, found {len(rec)}", line=line)
    rows = [rec for _, rec in records]
    if schema is None:
        schema = infer_schema(header, rows, distinct_threshold)
    elif set(schema.names) != set(header):
        raise TableError(f"header {header} does not match schema columns {schema.names}", line=1)
    data = {}
    for col in schema.columns:
        j = header.index(col.name)
        if col.kind is Kind.CONTINUOUS:
            values = np.empty(len(rows))
            for i, (line, rec) in enumerate(records):
                cell = rec[j].strip()
                if cell == "":
                    values[i] = np.nan
                elif _is_number(cell):
                    values[i] = float(cell)
                else:
                    raise TableError(f"cannot parse {cell!r} as a finite number", line=line, column=col.name)
            data[col.name] = values
        else:
            data[col.name] = [rec[j] if rec[j] != "" else None for rec in rows]
    return Table(schema, data)


def format_float(x: float) -> str:
    return "" if math.isnan(x) else repr(float(x))


def write_table(table: Table, path, header_line: str | None = None) -> None:
    buf = io.StringIO()
    if header_line:
        buf.write(header_line.rstrip("\n") + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    names = table.schema.names
    writer.writerow(names)
    kinds = [table.schema[n].kind for n in names]
    for row in table.rows():
        writer.writerow([format_float(v) if k is Kind.CONTINUOUS else ("" if v is None else v)
                         for v, k in zip(row, kinds)])
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")


def split(table: Table, holdout_fraction: float, seed: int) -> tuple[Table, Table]:
    """Partition rows into (train, holdout); holdout has round(fraction * n) rows."""
    if not 0.0 < holdout_fraction < 1.0:
        raise ValueError(f"holdout_fraction must lie in (0, 1), got {holdout_fraction}")
    n = table.n_rows
    if n == 0:
        raise ValueError("cannot split an empty table")
    n_hold = int(math.floor(holdout_fraction * n + 0.5))
    perm = _rng.substream(seed, _rng.SPLIT).permutation(n)
    holdout = np.sort(perm[:n_hold])
    train = np.sort(perm[n_hold:])
    return table.take(train), table.take(holdout)


def summarize(table: Table) -> list[ColumnStats]:
    if table.n_rows == 0:
        raise ValueError("cannot summarize an empty table")
    out = []
    for col in table.schema.columns:
        miss = table.missing(col.name)
        vals = table[col.name][~miss]
        n_missing = int(miss.sum())
        if len(vals) == 0:
            msg = f"column {col.name!r} has no observed values"
            warnings.warn(msg, stacklevel=2)
            out.append(ColumnStats(col.name, col.kind, 0, n_missing, warning=msg))
        elif col.kind is Kind.CONTINUOUS:
            out.append(ColumnStats(col.name, col.kind, len(vals), n_missing,
                                   min=float(vals.min()), max=float(vals.max()),
                                   mean=float(np.clip(vals.mean(), vals.min(), vals.max())),
                                   std=float(vals.std())))
        else:
            counts = Counter(vals)
            freqs = {k: counts[k] / len(vals) for k in sorted(counts)}
            out.append(ColumnStats(col.name, col.kind, len(vals), n_missing, frequencies=freqs))
    return out


# -- schema config files -----------------------------------------------------
# Delimited text with header "name,kind,tags"; tags separated by ";".

def write_schema(schema: Schema, path, header_line: str | None = None) -> None:
    buf = io.StringIO()
    if header_line:
        buf.write(header_line.rstrip("\n") + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "kind", "tags"])
    for c in schema.columns:
        writer.writerow([c.name, c.kind.value, ";".join(sorted(c.tags))])
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")


def load_schema(path) -> Schema:
    header, records = _read_rows(Path(path))
    if [h.strip().lower() for h in header[:2]] != ["name", "kind"]:
        raise ConfigError("schema file must start with a 'name,kind,tags' header", line=1, path=path)
    cols = []
    for line, rec in records:
        name = rec[0].strip()
        kind = rec[1].strip().lower() if len(rec) > 1 else ""
        if kind not in (Kind.CONTINUOUS.value, Kind.DISCRETE.value):
            raise ConfigError(f"unknown column kind {kind!r}", line=line, path=path)
        tags = {t.strip() for t in rec[2].split(";")} if len(rec) > 2 else set()
        cols.append(Column(name, Kind(kind), frozenset(t for t in tags if t)))
    return Schema(tuple(cols))
