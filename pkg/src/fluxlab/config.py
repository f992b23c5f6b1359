"""Run configuration: sectioned key-value (INI) or JSON documents.

Three sections: [model] physical parameters, [run] orchestration, and
[experiment] per-experiment knobs. Unknown sections or keys are rejected,
and validation reports every problem in one pass, each naming the
offending section.key, so a bad manifest is fixed in one edit cycle.
"""

from __future__ import annotations

import configparser
import json
import math
from dataclasses import dataclass, fields

from .errors import ConfigError

EXPERIMENTS = (
    "identities",
    "check-theorem",
    "ground-energy",
    "correlations",
    "orbit-average",
    "string",
    "anneal",
    "spectrum",
)
FIELD_KINDS = ("zero", "random", "pure-gauge", "pi-flux")


@dataclass(frozen=True)
class RunConfig:
    # [model]
    d: int = 2
    L: int = 1
    kappa: float = 1.0
    g: float = 1.0
    K: float = 1.0
    beta: float = 2.0
    # [run]
    experiment: str = "identities"
    seed: int = 12345
    out: str = "out"
    threads: int | None = None
    betas: tuple[float, ...] = (0.5, 2.0, 8.0)
    # [experiment]
    n_samples: int = 50
    n_controls: int = 1
    n_phi_samples: int = 200
    n_covariance_fields: int = 20
    n_identity_seeds: int = 10
    field_kind: str = "zero"
    x: tuple[int, ...] | None = None
    y: tuple[int, ...] | None = None
    paths: tuple[tuple[tuple[int, ...], ...], ...] | None = None
    t_initial: float = 1.0
    t_final: float = 1e-3
    cooling: float = 0.95
    steps_per_temp: int = 200
    proposal_width: float = 0.5
    restarts: int = 20


_MODEL_KEYS = ("d", "L", "kappa", "g", "K", "beta")
_RUN_KEYS = ("experiment", "seed", "out", "threads", "betas")
_EXPERIMENT_KEYS = (
    "n_samples",
    "n_controls",
    "n_phi_samples",
    "n_covariance_fields",
    "n_identity_seeds",
    "field_kind",
    "x",
    "y",
    "paths",
    "t_initial",
    "t_final",
    "cooling",
    "steps_per_temp",
    "proposal_width",
    "restarts",
)
_SECTIONS = {"model": _MODEL_KEYS, "run": _RUN_KEYS, "experiment": _EXPERIMENT_KEYS}
_INT_KEYS = {
    "d",
    "L",
    "seed",
    "threads",
    "n_samples",
    "n_controls",
    "n_phi_samples",
    "n_covariance_fields",
    "n_identity_seeds",
    "steps_per_temp",
    "restarts",
}
_FLOAT_KEYS = {
    "kappa",
    "g",
    "K",
    "beta",
    "t_initial",
    "t_final",
    "cooling",
    "proposal_width",
}


def _parse_site(text: str) -> tuple[int, ...]:
    return tuple(int(p.strip()) for p in str(text).split(",") if p.strip() != "")


def _parse_paths(text: str):
    # "0,0 -> 1,0 -> 1,1 ; 0,0 -> 0,1 -> 1,1": sites joined by ->, paths by ;
    paths = []
    for chunk in str(text).split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        paths.append(tuple(_parse_site(s) for s in chunk.split("->")))
    return tuple(paths)


def _coerce(section: str, key: str, raw, problems: list[str]):
    label = f"{section}.{key}"
    try:
        if key in _INT_KEYS:
            if isinstance(raw, bool):
                raise ValueError("boolean is not an integer")
            if isinstance(raw, float) and raw != int(raw):
                raise ValueError("not an integer")
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key == "betas":
            if isinstance(raw, str):
                vals = tuple(float(p) for p in raw.split(",") if p.strip() != "")
            else:
                vals = tuple(float(v) for v in raw)
            if not vals:
                raise ValueError("needs at least one value")
            return vals
        if key in ("x", "y"):
            if isinstance(raw, str):
                return _parse_site(raw)
            return tuple(int(v) for v in raw)
        if key == "paths":
            if isinstance(raw, str):
                return _parse_paths(raw)
            return tuple(tuple(tuple(int(c) for c in site) for site in path) for path in raw)
        return str(raw)
    except (TypeError, ValueError) as exc:
        problems.append(f"{label}: cannot parse value {raw!r} ({exc})")
        return None


def _load_sections(text: str, problems: list[str]) -> dict[str, dict]:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            problems.append(f"document: invalid JSON ({exc})")
            return {}
        if not isinstance(doc, dict) or not all(
            isinstance(v, dict) for v in doc.values()
        ):
            problems.append("document: JSON form must be {section: {key: value}}")
            return {}
        return doc
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keys are case-sensitive (L vs l, K vs kappa)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        problems.append(f"document: invalid INI ({exc})")
        return {}
    return {s: dict(parser.items(s)) for s in parser.sections()}


def _validate(cfg: RunConfig, problems: list[str]) -> None:
    if cfg.d < 2:
        problems.append(f"model.d: dimension must be >= 2, got {cfg.d}")
    if cfg.L < 1:
        problems.append(f"model.L: must be >= 1, got {cfg.L}")
    if cfg.g < 0:
        problems.append(f"model.g: must be >= 0, got {cfg.g}")
    if cfg.K <= 0:
        problems.append(f"model.K: must be > 0, got {cfg.K}")
    if cfg.beta <= 0:
        problems.append(f"model.beta: must be > 0, got {cfg.beta}")
    if cfg.experiment not in EXPERIMENTS:
        problems.append(
            f"run.experiment: unknown experiment {cfg.experiment!r}; "
            f"choose from {', '.join(EXPERIMENTS)}"
        )
    if cfg.seed < 0:
        problems.append(f"run.seed: must be >= 0, got {cfg.seed}")
    if cfg.threads is not None and cfg.threads < 1:
        problems.append(f"run.threads: must be >= 1, got {cfg.threads}")
    if any(b <= 0 for b in cfg.betas):
        problems.append(f"run.betas: all values must be > 0, got {list(cfg.betas)}")
    for key in ("n_samples", "n_phi_samples", "n_covariance_fields",
                "n_identity_seeds", "steps_per_temp", "restarts"):
        if getattr(cfg, key) < 1:
            problems.append(f"experiment.{key}: must be >= 1, got {getattr(cfg, key)}")
    if cfg.n_controls < 0:
        problems.append(f"experiment.n_controls: must be >= 0, got {cfg.n_controls}")
    if cfg.field_kind not in FIELD_KINDS:
        problems.append(
            f"experiment.field_kind: unknown kind {cfg.field_kind!r}; "
            f"choose from {', '.join(FIELD_KINDS)}"
        )
    if not (0.0 < cfg.cooling < 1.0):
        problems.append(f"experiment.cooling: must be in (0, 1), got {cfg.cooling}")
    if not (0.0 < cfg.proposal_width <= math.pi):
        problems.append(
            f"experiment.proposal_width: must be in (0, pi], got {cfg.proposal_width}"
        )
    if not (0.0 < cfg.t_final <= cfg.t_initial):
        problems.append(
            "experiment.t_final: need 0 < t_final <= t_initial, "
            f"got t_final={cfg.t_final}, t_initial={cfg.t_initial}"
        )
    for key in ("x", "y"):
        val = getattr(cfg, key)
        if val is not None and len(val) != cfg.d:
            problems.append(
                f"experiment.{key}: site needs {cfg.d} coordinates, got {val}"
            )
    if cfg.paths is not None:
        for pi, path in enumerate(cfg.paths):
            if len(path) < 2:
                problems.append(f"experiment.paths: path {pi} has fewer than 2 sites")
            elif any(len(site) != cfg.d for site in path):
                problems.append(
                    f"experiment.paths: path {pi} has a site with wrong coordinate count"
                )


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Parse and fully validate; raises ConfigError listing every problem.

    overrides maps flat field names to pre-typed values (CLI flags); they
    are applied after the document and validated with it.
    """
    problems: list[str] = []
    sections = _load_sections(text, problems)
    values: dict = {}
    for section, entries in sections.items():
        if section not in _SECTIONS:
            problems.append(
                f"{section}: unknown section; expected one of {', '.join(_SECTIONS)}"
            )
            continue
        for key, raw in entries.items():
            if key not in _SECTIONS[section]:
                problems.append(
                    f"{section}.{key}: unknown key; valid keys are "
                    f"{', '.join(_SECTIONS[section])}"
                )
                continue
            coerced = _coerce(section, key, raw, problems)
            if coerced is not None:
                values[key] = coerced
    if overrides:
        valid_names = {f.name for f in fields(RunConfig)}
        for key, val in overrides.items():
            if key not in valid_names:
                raise ValueError(f"unknown override field {key!r}")
            if val is not None:
                values[key] = val
    if problems:
        raise ConfigError(problems)
    cfg = RunConfig(**values)
    _validate(cfg, problems)
    if problems:
        raise ConfigError(problems)
    return cfg


def config_dict(cfg: RunConfig) -> dict:
    """Sectioned plain-data view used for hashing and report embedding."""
    out: dict[str, dict] = {"model": {}, "run": {}, "experiment": {}}
    lookup = {}
    for section, keys in _SECTIONS.items():
        for key in keys:
            lookup[key] = section
    for f in fields(cfg):
        val = getattr(cfg, f.name)
        if isinstance(val, tuple):
            val = _tuple_to_list(val)
        out[lookup[f.name]][f.name] = val
    return out


def _tuple_to_list(val):
    if isinstance(val, tuple):
        return [_tuple_to_list(v) for v in val]
    return val
