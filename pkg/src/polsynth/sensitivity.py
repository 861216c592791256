"""Attribute sensitivity tiers and the per-attribute acceptance bands they imply."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping

from polsynth.config import parse_pair, read_sections
from polsynth.dataset import Schema
from polsynth.errors import ConfigError, PolsynthError
from polsynth.policy import DeonticRule, DeonticType


class SensitivityLevel(str, Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"

    @property
    def rank(self) -> int:
        return _RANK[self]

    @classmethod
    def parse(cls, token: str) -> "SensitivityLevel":
        for member in cls:
            if token.strip().lower() == member.value.lower():
                return member
        raise ValueError(f"unknown sensitivity level {token!r} (expected Low, Medium or High)")


_RANK = {SensitivityLevel.LOW: 0, SensitivityLevel.MEDIUM: 1, SensitivityLevel.HIGH: 2}
LEVELS = (SensitivityLevel.LOW, SensitivityLevel.MEDIUM, SensitivityLevel.HIGH)


@dataclass(frozen=True)
class Provenance:
    kind: str  # "explicit-config" | "tag-match" | "default"
    detail: str = ""


@dataclass(frozen=True)
class SensitivityEntry:
    level: SensitivityLevel
    provenance: Provenance


class SensitivityMap(dict):
    """attribute name -> SensitivityEntry, in schema order."""

    def level(self, name: str) -> SensitivityLevel:
        return self[name].level

    def histogram(self) -> dict[SensitivityLevel, int]:
        counts = {lvl: 0 for lvl in LEVELS}
        for entry in self.values():
            counts[entry.level] += 1
        return counts

    def attributes_at(self, *levels) -> list[str]:
        return [name for name, e in self.items() if e.level in levels]


@dataclass(frozen=True)
class AcceptanceBand:
    attribute: str
    t_min: float
    t_max: float
    level: SensitivityLevel | None = None

    def __post_init__(self):
        if not 0.0 <= self.t_min <= self.t_max <= 1.0:
            raise PolsynthError(
                f"band for {self.attribute!r} must satisfy 0 <= t_min <= t_max <= 1, "
                f"got [{self.t_min}, {self.t_max}]")

    def contains(self, value: float) -> bool:
        return self.t_min <= value <= self.t_max


DEFAULT_BANDS = {
    SensitivityLevel.LOW: (0.0, 0.05),
    SensitivityLevel.MEDIUM: (0.01, 0.08),
    SensitivityLevel.HIGH: (0.03, 0.12),
}

_STRICT = (DeonticType.PROHIBITION, DeonticType.OBLIGATION)


def classify_attributes(schema: Schema, rules: list[DeonticRule],
                        tag_keywords: Mapping[str, list[str]] | None = None,
                        overrides: Mapping[str, SensitivityLevel] | None = None) -> SensitivityMap:
    """Assign each attribute a tier.

    Precedence: explicit override, then tag keywords matched against rule
    sentences (Prohibition/Obligation -> High, Permission/Entitlement only ->
    Low, tagged but unmatched -> Medium), then High as the fail-safe default.
    """
    tag_keywords = {t: [k.lower() for k in kws if k.strip()] for t, kws in (tag_keywords or {}).items()}
    overrides = dict(overrides or {})
    unknown = sorted(set(overrides) - set(schema.names))
    if unknown:
        raise PolsynthError(f"overrides name unknown attributes: {', '.join(unknown)}")

    lowered = [(r, r.sentence.lower()) for r in rules]
    out = SensitivityMap()
    for col in schema.columns:
        if col.name in overrides:
            out[col.name] = SensitivityEntry(SensitivityLevel(overrides[col.name]),
                                             Provenance("explicit-config", "override"))
            continue
        if not col.tags:
            out[col.name] = SensitivityEntry(SensitivityLevel.HIGH, Provenance("default", "untagged"))
            continue
        strict = permissive = None
        for tag in sorted(col.tags):
            for kw in tag_keywords.get(tag, []):
                for rule, sentence in lowered:
                    if kw not in sentence:
                        continue
                    hit = f"tag={tag} keyword={kw} rule={rule.source}"
                    if rule.deontic_type in _STRICT:
                        strict = strict or hit
                    else:
                        permissive = permissive or hit
        if strict:
            out[col.name] = SensitivityEntry(SensitivityLevel.HIGH, Provenance("tag-match", strict))
        elif permissive:
            out[col.name] = SensitivityEntry(SensitivityLevel.LOW, Provenance("tag-match", permissive))
        else:
            tags = ",".join(sorted(col.tags))
            out[col.name] = SensitivityEntry(SensitivityLevel.MEDIUM, Provenance("tag-match", f"tags={tags} unmatched"))
    return out


def resolve_band_config(band_config: Mapping | None = None) -> dict[SensitivityLevel, tuple[float, float]]:
    """Merge a partial per-level config over the defaults and validate it."""
    bands = dict(DEFAULT_BANDS)
    for lvl, pair in (band_config or {}).items():
        bands[SensitivityLevel(lvl)] = (float(pair[0]), float(pair[1]))
    for lvl, (lo, hi) in bands.items():
        if not 0.0 <= lo <= hi <= 1.0:
            raise PolsynthError(f"{lvl.value} band must satisfy 0 <= t_min <= t_max <= 1, got ({lo}, {hi})")
    lows = [bands[lvl][0] for lvl in LEVELS]
    if lows != sorted(lows):
        raise PolsynthError("band t_min must be non-decreasing from Low to Medium to High")
    return bands


def privacy_bands(smap: SensitivityMap, band_config: Mapping | None = None) -> list[AcceptanceBand]:
    bands = resolve_band_config(band_config)
    return [AcceptanceBand(name, *bands[e.level], level=e.level) for name, e in smap.items()]


def load_sensitivity_config(path):
    """Read ``[tags]``, ``[overrides]`` and ``[bands]`` sections.

    Returns (tag_keywords, overrides, band_config); absent sections are empty.
    """
    sections = read_sections(path, allowed={"tags", "overrides", "bands"})
    tag_keywords = {name: [k.strip() for k in value.split(",") if k.strip()]
                    for _, name, value in sections.get("tags", [])}
    overrides, band_config = {}, {}
    for lineno, name, value in sections.get("overrides", []):
        try:
            overrides[name] = SensitivityLevel.parse(value)
        except ValueError as exc:
            raise ConfigError(str(exc), line=lineno, path=path) from None
    for lineno, name, value in sections.get("bands", []):
        try:
            lvl = SensitivityLevel.parse(name)
        except ValueError as exc:
            raise ConfigError(str(exc), line=lineno, path=path) from None
        band_config[lvl] = parse_pair(value, lineno, path)
    if band_config:
        try:
            resolve_band_config(band_config)
        except PolsynthError as exc:
            raise ConfigError(str(exc), path=path) from None
    return tag_keywords, overrides, band_config


# -- map files: delimited text "attribute,level,provenance,detail" ---------------

def write_map(smap: SensitivityMap, path, header_line: str | None = None) -> None:
    buf = io.StringIO()
    if header_line:
        buf.write(header_line.rstrip("\n") + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["attribute", "level", "provenance", "detail"])
    for name, e in smap.items():
        w.writerow([name, e.level.value, e.provenance.kind, e.provenance.detail])
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")


def load_map(path) -> SensitivityMap:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    offset = 0
    while offset < len(lines) and lines[offset].startswith("#"):
        offset += 1
    reader = csv.reader(lines[offset:])
    header = next(reader, None)
    if header is None or header[:2] != ["attribute", "level"]:
        raise ConfigError("map file must start with an 'attribute,level,...' header", path=path)
    out = SensitivityMap()
    for i, rec in enumerate(reader, offset + 2):
        if not rec:
            continue
        try:
            lvl = SensitivityLevel.parse(rec[1])
        except (ValueError, IndexError) as exc:
            raise ConfigError(str(exc), line=i, path=path) from None
        prov = Provenance(rec[2] if len(rec) > 2 else "explicit-config", rec[3] if len(rec) > 3 else "")
        out[rec[0]] = SensitivityEntry(lvl, prov)
    return out
