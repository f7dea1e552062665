"""``verify`` command: seeded verification sweeps with JSON/CSV reports.

Exit codes: 0 when no trial failed or failed to converge, 1 otherwise,
2 on a configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from collections import Counter
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from qbailey.errors import DomainError, SamplingExhausted
from qbailey.identities import MODES, REGIMES, sample_bailey, sample_config, verify_sample
from qbailey.qkernel import QModulus, TruncationPolicy
from qbailey.report import Report, emit_report

CONFIG_ENV = "QBAILEY_CONFIG"


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    identity: str
    trials: int = 10
    seed: int = 0
    q_override: float | None = None
    policy: dict = field(default_factory=dict)
    nodes: int | None = None
    window: int | None = None
    tol: float | None = None
    regime: str = "any"
    output_path: str | None = None
    emit_format: str = "json"

    def validate(self) -> None:
        if self.identity not in MODES:
            raise ConfigError(f"identity: unknown identity {self.identity!r} (choose from {', '.join(MODES)})")
        if self.trials < 1:
            raise ConfigError("trials must be ≥ 1")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tol: must be positive")
        if self.q_override is not None and not 0 < abs(self.q_override) < 1:
            raise ConfigError("q: must satisfy 0 < |q| < 1")
        if self.regime not in REGIMES:
            raise ConfigError(f"regime: must be one of {', '.join(REGIMES)}")
        if self.emit_format not in ("json", "csv"):
            raise ConfigError("format: must be json or csv")
        for name, k in (("nodes", self.nodes), ("window", self.window)):
            if k is not None and k < (8 if name == "nodes" else 0):
                raise ConfigError(f"{name}: out of range")
        if self.nodes is not None and self.nodes & (self.nodes - 1):
            raise ConfigError("nodes: must be a power of two")
        try:
            self.truncation_policy()
        except DomainError as exc:
            raise ConfigError(f"[policy] {exc}") from None

    def truncation_policy(self) -> TruncationPolicy:
        return replace(TruncationPolicy(), **self.policy)


_POLICY_TYPES = {f.name: f.type for f in fields(TruncationPolicy)}
_RUN_KEYS = {
    "identity": str, "trials": int, "seed": int, "q": float, "tol": float,
    "nodes": int, "window": int, "regime": str, "output": str, "format": str,
}


def _line_of(path: Path, section: str, key: str) -> int | None:
    current = None
    for i, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
        elif current == section and line.split("=", 1)[0].split(":", 1)[0].strip() == key:
            return i
    return None


def load_config_file(path: str | Path) -> dict:
    """Read an INI file with optional [run] and [policy] sections."""
    path = Path(path)
    parser = configparser.ConfigParser()
    try:
        with path.open() as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    out: dict = {"policy": {}}
    for section in parser.sections():
        if section not in ("run", "policy"):
            line = _line_of_section(path, section)
            raise ConfigError(f"{path} line {line}: unknown section [{section}]")
        types = _RUN_KEYS if section == "run" else _POLICY_TYPES
        for key, raw in parser.items(section):
            line = _line_of(path, section, key)
            where = f"{path} line {line}: [{section}] {key}"
            if key not in types:
                raise ConfigError(f"{where}: unknown field")
            conv = types[key]
            conv = {"int": int, "float": float, "str": str}.get(conv, conv) if isinstance(conv, str) else conv
            try:
                value = conv(raw)
            except ValueError:
                raise ConfigError(f"{where}: cannot parse {raw!r} as {conv.__name__}") from None
            if section == "policy":
                out["policy"][key] = value
            else:
                out[key] = value
    return out


def _line_of_section(path: Path, section: str) -> int | None:
    for i, raw in enumerate(path.read_text().splitlines(), 1):
        if raw.strip() == f"[{section}]":
            return i
    return None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="verify", description=__doc__.splitlines()[0])
    p.add_argument("identity", nargs="?", help=f"one of: {', '.join(MODES)}")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--q", type=float, help="fix the nome (otherwise drawn per trial)")
    p.add_argument("--nodes", type=int, help="fixed trapezoid node count (disables refinement)")
    p.add_argument("--window", type=int, help="fixed lattice window |m| <= M")
    p.add_argument("--tol", type=float, help="identity tolerance on rel_err")
    p.add_argument("--regime", choices=REGIMES, help="q-beta index regime")
    out = p.add_mutually_exclusive_group()
    out.add_argument("--json", metavar="PATH")
    out.add_argument("--csv", metavar="PATH")
    p.add_argument("--config", metavar="PATH", help=f"INI config file (default: ${CONFIG_ENV})")
    return p


def resolve_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    values: dict = {"policy": {}}
    cfg_path = args.config or environ.get(CONFIG_ENV)
    if cfg_path:
        values = load_config_file(cfg_path)
    flags = {"identity": args.identity, "trials": args.trials, "seed": args.seed, "q": args.q,
             "tol": args.tol, "nodes": args.nodes, "window": args.window, "regime": args.regime}
    for k, v in flags.items():
        if v is not None:
            values[k] = v
    if args.json:
        values["output"], values["format"] = args.json, "json"
    elif args.csv:
        values["output"], values["format"] = args.csv, "csv"
    if not values.get("identity"):
        raise ConfigError("identity: missing (give it as an argument or in [run])")
    cfg = RunConfig(
        identity=values["identity"],
        trials=values.get("trials", 10),
        seed=values.get("seed", 0),
        q_override=values.get("q"),
        policy=values.get("policy", {}),
        nodes=values.get("nodes"),
        window=values.get("window"),
        tol=values.get("tol"),
        regime=values.get("regime", "any"),
        output_path=values.get("output"),
        emit_format=values.get("format", "json"),
    )
    cfg.validate()
    return cfg


def run_trial(cfg: RunConfig, seed: int, policy: TruncationPolicy) -> list[Report]:
    qm = None if cfg.q_override is None else QModulus.of(cfg.q_override)
    try:
        if cfg.identity == "bailey":
            sample = sample_bailey(seed, qm, policy, n_points=1)
        else:
            sample = sample_config(seed, qm, policy, cfg.identity, cfg.regime)
    except SamplingExhausted as exc:
        settings = policy.as_dict()
        settings.update(seed=seed, reason=str(exc))
        nan = float("nan")
        return [Report(cfg.identity, {}, complex(nan, nan), complex(nan, nan), nan, nan,
                       settings, "rejected", 0.0)]
    kw = {}
    if cfg.identity in ("qbeta", "star-triangle"):
        kw = {"nodes": cfg.nodes, "window": cfg.window}
    elif cfg.identity == "bailey":
        kw = {"nodes": cfg.nodes}
    reports = verify_sample(sample, cfg.identity, policy, cfg.tol, **kw)
    for r in reports:
        r.settings["seed"] = seed
        r.settings["attempts"] = sample.attempts
    return reports


def run(cfg: RunConfig) -> tuple[dict, list[Report]]:
    """Execute the sweep; returns (summary, reports) in seed order."""
    policy = cfg.truncation_policy()
    reports: list[Report] = []
    for i in range(cfg.trials):
        reports.extend(run_trial(cfg, cfg.seed + i, policy))
    counts = Counter(r.status for r in reports)
    passes = [r.rel_err for r in reports if r.status == "pass"]
    attempts = [r.settings.get("attempts", 0) for r in reports if "attempts" in r.settings]
    summary = {
        "identity": cfg.identity,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "counts": {s: counts.get(s, 0) for s in ("pass", "fail", "degenerate-pass", "rejected", "non-convergent")},
        "max_rel_err_pass": max(passes) if passes else None,
        "acceptance_rate": (len(attempts) / sum(attempts)) if attempts else None,
    }
    return summary, reports


def exit_code(summary: dict) -> int:
    c = summary["counts"]
    return 0 if c["fail"] == 0 and c["non-convergent"] == 0 else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"verify: configuration error: {exc}", file=sys.stderr)
        return 2
    summary, reports = run(cfg)
    if cfg.output_path:
        try:
            emit_report(reports, cfg.emit_format, cfg.output_path)
        except OSError as exc:
            print(f"verify: {exc}", file=sys.stderr)
            return 1
    print(json.dumps(summary, indent=2))
    return exit_code(summary)


if __name__ == "__main__":
    sys.exit(main())
