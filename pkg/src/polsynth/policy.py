"""Deontic rule extraction from regulation text.

Sentences are scanned for modal-verb trigger phrases. Matching is
token-aware and leftmost-longest, so "shall not" wins over "shall" and
"canal" never triggers "can".
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping, NamedTuple

from polsynth.errors import ConfigError


class DeonticType(str, Enum):
    PERMISSION = "Permission"
    PROHIBITION = "Prohibition"
    OBLIGATION = "Obligation"
    ENTITLEMENT = "Entitlement"

    @classmethod
    def parse(cls, token: str) -> "DeonticType":
        t = token.strip().lower()
        for member in cls:
            if t in (member.value.lower(), member.value.lower() + "s"):
                return member
        raise ValueError(f"unknown deontic type {token!r}")


_DEFAULT_TRIGGERS = {
    DeonticType.OBLIGATION: [
        "shall be required", "will be required", "shall be obligated", "shall", "must",
        "will", "have to", "should", "ought to have", "will be paid", "shall be paid",
        "agree", "agrees", "acknowledges", "acknowledge", "represents and warrants",
        "shall be responsible for", "will be responsible for",
    ],
    DeonticType.PROHIBITION: [
        "shall not", "will not", "must not", "may not", "cannot", "shall have no right",
        "can not", "shall not be allowed", "will not be allowed", "shall not assist",
        "shall be prohibited", "will be prohibited", "nor shall", "not to be",
        "neither lessor nore lessee may", "in no event shall", "nor will", "will not allow",
        "nor may",
    ],
    DeonticType.PERMISSION: [
        "shall be permitted", "shall also be permitted", "can", "may", "could",
        "shall be allowed", "will be allowed", "is permitted", "will allow", "has the right",
        "or at landlord's option", "shall be permitted to",
    ],
    DeonticType.ENTITLEMENT: [],
}

_TOKEN = re.compile(r"\w+(?:['’]\w+)*")


def _tokens(text: str) -> list[tuple[int, int, str]]:
    return [(m.start(), m.end(), m.group().lower().replace("’", "'")) for m in _TOKEN.finditer(text)]


class TriggerLexicon:
    """Mapping of deontic type to trigger phrases; each phrase belongs to one type."""

    def __init__(self, triggers: Mapping[DeonticType, list[str]]):
        self._by_type = {t: [] for t in DeonticType}
        owner: dict[str, DeonticType] = {}
        for dtype, phrases in triggers.items():
            dtype = DeonticType(dtype)
            for phrase in phrases:
                p = " ".join(phrase.lower().split())
                if not p:
                    continue
                if p in owner and owner[p] is not dtype:
                    raise ValueError(
                        f"trigger {p!r} listed under both {owner[p].value} and {dtype.value}")
                if p not in owner:
                    owner[p] = dtype
                    self._by_type[dtype].append(p)
        self._owner = owner
        # token tuples, longest first; ties broken alphabetically for stability
        self._patterns = sorted(((tuple(t for _, _, t in _tokens(p)), p) for p in owner),
                                key=lambda tp: (-len(tp[0]), tp[1]))

    def __getitem__(self, dtype: DeonticType) -> list[str]:
        return list(self._by_type[DeonticType(dtype)])

    def type_of(self, phrase: str) -> DeonticType:
        return self._owner[phrase]

    def phrases(self) -> list[str]:
        return list(self._owner)

    def as_dict(self) -> dict[str, list[str]]:
        return {t.value: list(v) for t, v in self._by_type.items()}

    def __eq__(self, other):
        return isinstance(other, TriggerLexicon) and self.as_dict() == other.as_dict()


def default_lexicon() -> TriggerLexicon:
    return TriggerLexicon(_DEFAULT_TRIGGERS)


def load_lexicon(path=None, replace: bool = False) -> TriggerLexicon:
    """Load the built-in lexicon, optionally extended (or replaced) by a file.

    The file has sections headed ``[Obligation]``, ``[Prohibition]``,
    ``[Permission]`` or ``[Entitlement]`` followed by one phrase per line.
    """
    if path is None:
        return default_lexicon()
    merged = {t: [] if replace else list(v) for t, v in _DEFAULT_TRIGGERS.items()}
    current = None
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            try:
                current = DeonticType.parse(line[1:-1])
            except ValueError as exc:
                raise ConfigError(str(exc), line=lineno, path=path) from None
            continue
        if current is None:
            raise ConfigError("phrase outside of a [Type] section", line=lineno, path=path)
        merged[current].append(line)
    try:
        return TriggerLexicon(merged)
    except ValueError as exc:
        raise ConfigError(str(exc), path=path) from None


class Sentence(NamedTuple):
    text: str
    start: int


_BOUNDARY = re.compile(r"[.!?;](?=\s|$)")


def split_sentences(text: str) -> list[Sentence]:
    """Split at '.', '!', '?' or ';' followed by whitespace or end of text.

    Abbreviations such as "e.g." over-split; that is accepted.
    """
    out = []
    pos = 0
    ends = [m.end() for m in _BOUNDARY.finditer(text)] + [len(text)]
    for end in ends:
        chunk = text[pos:end]
        stripped = chunk.strip()
        if stripped:
            out.append(Sentence(stripped, pos + len(chunk) - len(chunk.lstrip())))
        pos = end
    return out


@dataclass(frozen=True)
class DeonticRule:
    sentence: str
    trigger: str
    start_index: int
    deontic_type: DeonticType
    source: str

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["deontic_type"] = self.deontic_type.value
        return rec

    @classmethod
    def from_record(cls, rec: Mapping) -> "DeonticRule":
        return cls(sentence=rec["sentence"], trigger=rec["trigger"], start_index=int(rec["start_index"]),
                   deontic_type=DeonticType(rec["deontic_type"]), source=rec["source"])


def _match_sentence(sentence: str, lexicon: TriggerLexicon):
    toks = _tokens(sentence)
    lowered = sentence.lower().replace("’", "'")
    words = [t for _, _, t in toks]
    i = 0
    while i < len(toks):
        for pattern, phrase in lexicon._patterns:
            n = len(pattern)
            if tuple(words[i:i + n]) != pattern:
                continue
            start = toks[i][0]
            # the stored span must read exactly as the phrase
            if lowered[start:start + len(phrase)] != phrase:
                continue
            yield start, phrase
            i += n
            break
        else:
            i += 1


def extract_rules(text: str, lexicon: TriggerLexicon | None = None, doc_id: str = "doc") -> list[DeonticRule]:
    lexicon = lexicon or default_lexicon()
    rules = []
    for ordinal, sent in enumerate(split_sentences(text), 1):
        for start, phrase in _match_sentence(sent.text, lexicon):
            rules.append(DeonticRule(sent.text, phrase, start, lexicon.type_of(phrase), f"{doc_id}:{ordinal}"))
    return rules


def export_rules(rules, path, header: Mapping | None = None) -> None:
    """Write rules as JSON lines with sorted keys (canonical, roundtrip-stable)."""
    lines = []
    if header is not None:
        lines.append(json.dumps({"record": "header", **header}, sort_keys=True, ensure_ascii=False))
    lines.extend(json.dumps(r.to_record(), sort_keys=True, ensure_ascii=False) for r in rules)
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8", newline="")


def load_rules(path) -> list[DeonticRule]:
    rules = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            if rec.get("record") == "header":
                continue
            rules.append(DeonticRule.from_record(rec))
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"malformed rule record: {exc}", line=lineno, path=path) from None
    return rules
