"""Sectioned ``name = value`` text files used for sensitivity and run configs."""

from pathlib import Path

from polsynth.errors import ConfigError


def read_sections(path, allowed=None) -> dict[str, list[tuple[int, str, str]]]:
    """Parse ``[section]`` headers and ``name = value`` lines.

    Returns section -> list of (line number, name, value). Names keep their
    case; ``#`` starts a comment line.
    """
    sections: dict[str, list] = {}
    current = None
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            if allowed is not None and current not in allowed:
                raise ConfigError(f"unknown section [{current}]", line=lineno, path=path)
            sections.setdefault(current, [])
            continue
        if current is None:
            raise ConfigError("entry outside of a [section]", line=lineno, path=path)
        if "=" not in line:
            raise ConfigError("expected 'name = value'", line=lineno, path=path)
        name, value = line.split("=", 1)
        sections[current].append((lineno, name.strip(), value.strip()))
    return sections


def parse_pair(value: str, lineno: int, path) -> tuple[float, float]:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"expected two comma-separated numbers, got {value!r}", line=lineno, path=path)
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"not a number pair: {value!r}", line=lineno, path=path) from None
