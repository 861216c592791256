"""Command-line entry point: ``polsynth <subcommand> ...``.

Exit codes: 0 success, 2 usage error, 3 input error, 4 enforcement failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from polsynth import __version__, benchmark
from polsynth.config import parse_pair, read_sections
from polsynth.dataset import Kind, load_schema, load_table, split, write_table
from polsynth.errors import ConfigError, PolsynthError
from polsynth.eval import KINDS, attribute_inference_attack, reidentification_attack, tstr
from polsynth.metrics import (category_distribution, cdf_points, ks_categorical, ks_stat, normalized_emd,
                              pca_project)
from polsynth.policy import DeonticType, export_rules, extract_rules, load_lexicon, load_rules
from polsynth.sensitivity import (SensitivityLevel, classify_attributes, load_map, load_sensitivity_config,
                                  privacy_bands, write_map)
from polsynth.synth import DistortionConfig, fit, generate_enforced, load_model, save_model

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_ENFORCEMENT = 0, 2, 3, 4
HOLDOUT = 0.2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    paths: dict = field(default_factory=dict)
    seed: int | None = None
    n_samples: int | None = None
    max_iters: int = 25
    shrinkage: float = 0.05
    distortion: dict = field(default_factory=dict)
    attack: dict = field(default_factory=dict)

    def digest(self) -> str:
        """Hash of settings plus input file contents; independent of where files live."""
        inputs = {}
        for key, p in sorted(self.paths.items()):
            if key == "out" or p is None:
                continue
            path = Path(p)
            inputs[key] = hashlib.sha256(path.read_bytes()).hexdigest() if path.is_file() else None
        payload = {"command": self.command, "seed": self.seed, "n": self.n_samples, "max_iters": self.max_iters,
                   "shrinkage": self.shrinkage, "attack": self.attack, "inputs": inputs,
                   "distortion": {k.value if hasattr(k, "value") else k: list(v) for k, v in self.distortion.items()}}
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]

    def header(self) -> dict:
        return {"tool": "polsynth", "version": __version__, "seed": self.seed, "config_hash": self.digest()}

    def header_line(self) -> str:
        h = self.header()
        return f"# polsynth {h['version']} seed={h['seed']} config={h['config_hash']}"


def _csv_list(value) -> list[str]:
    if value is None:
        return []
    return [v.strip() for v in str(value).split(",") if v.strip()]


def _load_run_config(path, cfg: RunConfig) -> None:
    sections = read_sections(path, allowed={"paths", "run", "distortion", "attack"})
    for lineno, name, value in sections.get("paths", []):
        cfg.paths[name.replace("-", "_")] = str((Path(path).parent / value).resolve())
    for lineno, name, value in sections.get("run", []):
        try:
            if name == "seed":
                cfg.seed = int(value)
            elif name == "n":
                cfg.n_samples = int(value)
            elif name == "max_iters":
                cfg.max_iters = int(value)
            elif name == "shrinkage":
                cfg.shrinkage = float(value)
            else:
                raise ConfigError(f"unknown run setting {name!r}", line=lineno, path=path)
        except ValueError:
            raise ConfigError(f"bad value {value!r} for {name}", line=lineno, path=path) from None
    for lineno, name, value in sections.get("distortion", []):
        try:
            cfg.distortion[SensitivityLevel.parse(name)] = parse_pair(value, lineno, path)
        except ValueError as exc:
            raise ConfigError(str(exc), line=lineno, path=path) from None
    for lineno, name, value in sections.get("attack", []):
        cfg.attack[name] = value


def _resolve(args, command: str) -> RunConfig:
    cfg = RunConfig(command)
    if getattr(args, "config", None):
        _load_run_config(args.config, cfg)
    for key in ("data", "policy", "schema", "sensitivity_config", "rules", "map", "out", "synth", "test",
                "lexicon", "model"):
        val = getattr(args, key, None)
        if val is not None:
            cfg.paths[key] = str(Path(val).resolve())
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "n", None) is not None:
        cfg.n_samples = args.n
    if getattr(args, "max_iters", None) is not None:
        cfg.max_iters = args.max_iters
    for key in ("target", "qi", "known", "attack", "delta", "classifier"):
        val = getattr(args, key, None)
        if val is not None:
            cfg.attack[key] = str(val)
    return cfg


def _need(cfg: RunConfig, *keys):
    for key in keys:
        if key == "seed":
            if cfg.seed is None:
                raise UsageError("--seed is required (no wall-clock default)")
        elif not cfg.paths.get(key):
            raise UsageError(f"--{key.replace('_', '-')} is required")


def _write_jsonl(path, header: dict, records) -> None:
    lines = [json.dumps({"record": "header", **header}, sort_keys=True)]
    lines += [json.dumps(r, sort_keys=True) for r in records]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8", newline="")


def _read_table(cfg: RunConfig, key: str = "data"):
    schema = load_schema(cfg.paths["schema"]) if cfg.paths.get("schema") else None
    return load_table(cfg.paths[key], schema)


# -- subcommands ---------------------------------------------------------------

def cmd_extract_rules(cfg: RunConfig) -> int:
    _need(cfg, "policy", "out")
    lexicon = load_lexicon(cfg.paths.get("lexicon"))
    text = Path(cfg.paths["policy"]).read_text(encoding="utf-8")
    rules = extract_rules(text, lexicon, doc_id=Path(cfg.paths["policy"]).name)
    export_rules(rules, cfg.paths["out"], header=cfg.header())
    for dtype in DeonticType:
        print(f"{dtype.value}\t{sum(r.deontic_type is dtype for r in rules)}")
    print(f"total\t{len(rules)}")
    return EXIT_OK


def cmd_classify(cfg: RunConfig) -> int:
    _need(cfg, "schema", "out")
    schema = load_schema(cfg.paths["schema"])
    rules = load_rules(cfg.paths["rules"]) if cfg.paths.get("rules") else []
    tags, overrides = {}, {}
    if cfg.paths.get("sensitivity_config"):
        tags, overrides, _ = load_sensitivity_config(cfg.paths["sensitivity_config"])
    smap = classify_attributes(schema, rules, tags, overrides)
    write_map(smap, cfg.paths["out"], cfg.header_line())
    for lvl, count in smap.histogram().items():
        print(f"{lvl.value}\t{count}")
    return EXIT_OK


def cmd_fit(cfg: RunConfig) -> int:
    _need(cfg, "data", "out", "seed")
    table = _read_table(cfg)
    save_model(fit(table, shrinkage=cfg.shrinkage, seed=cfg.seed), cfg.paths["out"], cfg.header())
    print(f"fitted {len(table.schema)} columns on {table.n_rows} rows")
    return EXIT_OK


def cmd_synthesize(cfg: RunConfig) -> int:
    _need(cfg, "data", "map", "out", "seed")
    real = _read_table(cfg)
    smap = load_map(cfg.paths["map"])
    band_config = {}
    if cfg.paths.get("sensitivity_config"):
        _, _, band_config = load_sensitivity_config(cfg.paths["sensitivity_config"])
    model = load_model(cfg.paths["model"]) if cfg.paths.get("model") else \
        fit(real, shrinkage=cfg.shrinkage, seed=cfg.seed)
    missing = [c for c in model.schema.names if c not in smap]
    if missing:
        raise PolsynthError(f"sensitivity map lacks attributes: {', '.join(missing)}")
    bands = privacy_bands(smap, band_config)
    synth, report = generate_enforced(model, real, bands, smap, DistortionConfig(cfg.distortion),
                                      n=cfg.n_samples or real.n_rows, max_iters=cfg.max_iters, seed=cfg.seed)
    out = Path(cfg.paths["out"])
    out.mkdir(parents=True, exist_ok=True)
    write_table(synth, out / "synthetic.csv", cfg.header_line())
    _write_jsonl(out / "enforcement.jsonl", cfg.header(), report.to_records())
    status = "accepted" if report.accepted else f"failed: {', '.join(report.failed())}"
    print(f"iterations\t{report.iterations}\nstatus\t{status}")
    return EXIT_OK if report.accepted else EXIT_ENFORCEMENT


def _fidelity_records(real, synth) -> list[dict]:
    recs = []
    for col in real.schema.columns:
        r, s = real.observed(col.name), synth.observed(col.name)
        if col.kind is Kind.CONTINUOUS:
            ks = ks_stat(r, s)
        else:
            ks = ks_categorical(category_distribution(r), category_distribution(s))
        recs.append({"record": "fidelity", "attribute": col.name, "kind": col.kind.value, "ks": ks,
                     "normalized_emd": normalized_emd(r, s, col.kind)})
    return recs


def cmd_evaluate(cfg: RunConfig) -> int:
    _need(cfg, "data", "synth", "out", "seed")
    real = _read_table(cfg)
    synth = load_table(cfg.paths["synth"], real.schema)
    out = Path(cfg.paths["out"])
    (out / "cdf").mkdir(parents=True, exist_ok=True)
    fid = _fidelity_records(real, synth)
    summary = {"record": "fidelity_summary", "mean_ks": float(np.mean([f["ks"] for f in fid])),
               "mean_normalized_emd": float(np.mean([f["normalized_emd"] for f in fid]))}
    _write_jsonl(out / "fidelity.jsonl", cfg.header(), [summary] + fid)
    for name in real.schema.continuous():
        lines = [cfg.header_line(), "source,x,cdf"]
        for label, t in (("real", real), ("synthetic", synth)):
            lines += [f"{label},{x!r},{f!r}" for x, f in cdf_points(t.observed(name))]
        (out / "cdf" / f"{name}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    try:
        pts = pca_project(real, synth)
    except ValueError as exc:
        print(f"pca\tskipped ({exc})")
    else:
        lines = [cfg.header_line(), "source,pc1,pc2"] + [f"{p.source},{p.pc1!r},{p.pc2!r}" for p in pts]
        (out / "pca.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    target = cfg.attack.get("target")
    if target:
        if cfg.paths.get("test"):
            train, test = real, load_table(cfg.paths["test"], real.schema)
        else:
            train, test = split(real, HOLDOUT, cfg.seed)
        report = tstr(synth, train, test, target, KINDS, seed=cfg.seed)
        _write_jsonl(out / "utility.jsonl", cfg.header(), report.to_records())
        for e in report.entries:
            print(f"{e.kind}\treal={e.accuracy_real:.4f}\tsynthetic={e.accuracy_synthetic:.4f}")
    print(f"mean_ks\t{summary['mean_ks']:.4f}\nmean_normalized_emd\t{summary['mean_normalized_emd']:.4f}")
    return EXIT_OK


def cmd_attack(cfg: RunConfig) -> int:
    _need(cfg, "data", "synth", "out", "seed")
    real = _read_table(cfg)
    synth = load_table(cfg.paths["synth"], real.schema)
    smap = load_map(cfg.paths["map"]) if cfg.paths.get("map") else None
    kind = cfg.attack.get("attack")
    targets = _csv_list(cfg.attack.get("target"))
    if kind == "inference":
        known = _csv_list(cfg.attack.get("known"))
        if len(targets) != 1 or not known:
            raise UsageError("inference needs --target <column> and --known <columns>")
        level = smap.level(targets[0]).value if smap and targets[0] in smap else None
        report = attribute_inference_attack(synth, real, targets[0], known,
                                            kind=cfg.attack.get("classifier", "RF"), seed=cfg.seed, level=level)
    elif kind == "reidentification":
        qi = _csv_list(cfg.attack.get("qi"))
        if not qi:
            raise UsageError("reidentification needs --qi <columns>")
        if not targets:
            raise UsageError("reidentification needs --target <sensitive columns>")
        levels = {smap.level(t).value for t in targets if t in smap} if smap else set()
        level = max(levels, key=lambda v: SensitivityLevel(v).rank) if levels else None
        report = reidentification_attack(synth, real, qi, targets, delta=float(cfg.attack.get("delta", 0.25)),
                                         seed=cfg.seed, level=level)
    else:
        raise UsageError("--attack must be 'inference' or 'reidentification'")
    Path(cfg.paths["out"]).parent.mkdir(parents=True, exist_ok=True)
    _write_jsonl(cfg.paths["out"], cfg.header(), [report.to_record()])
    print(f"{report.attack}\trate={report.rate:.4f}\tbaseline={report.baseline:.4f}")
    return EXIT_OK


def cmd_benchmark(cfg: RunConfig) -> int:
    _need(cfg, "out", "seed")
    paths = benchmark.write_benchmark(cfg.paths["out"], cfg.seed, cfg.header_line())
    for key, p in paths.items():
        print(f"{key}\t{p}")
    return EXIT_OK


COMMANDS = {
    "extract-rules": cmd_extract_rules, "classify": cmd_classify, "fit": cmd_fit,
    "synthesize": cmd_synthesize, "evaluate": cmd_evaluate, "attack": cmd_attack, "benchmark": cmd_benchmark,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polsynth", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"polsynth {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help, flags):
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", help="run config file; flags override it")
        p.add_argument("--out", help="output file or directory")
        for flag, kw in flags:
            p.add_argument(flag, **kw)
        return p

    seed = ("--seed", {"type": int})
    data = ("--data", {})
    schema = ("--schema", {})
    add("extract-rules", "extract deontic rules from policy text",
        [("--policy", {}), ("--lexicon", {"help": "extra trigger phrases, by [Type] section"})])
    add("classify", "assign sensitivity tiers to schema attributes",
        [schema, ("--rules", {}), ("--sensitivity-config", {})])
    add("fit", "fit the copula model and save it", [data, schema, seed])
    add("synthesize", "generate synthetic data under the acceptance bands",
        [data, schema, ("--map", {}), ("--sensitivity-config", {}), ("--model", {}), seed,
         ("--n", {"type": int}), ("--max-iters", {"type": int})])
    add("evaluate", "fidelity and train-on-synthetic utility reports",
        [data, schema, ("--synth", {}), ("--test", {}), ("--target", {}), seed])
    add("attack", "attribute-inference or re-identification attack",
        [data, schema, ("--synth", {}), ("--map", {}), ("--attack", {"choices": ["inference", "reidentification"]}),
         ("--target", {}), ("--known", {}), ("--qi", {}), ("--delta", {"type": float}),
         ("--classifier", {"choices": list(KINDS)}), seed])
    add("benchmark", "write the benchmark dataset, schema, policy and config", [seed])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args, args.command)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"polsynth {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PolsynthError, OSError, KeyError) as exc:
        print(f"polsynth {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
