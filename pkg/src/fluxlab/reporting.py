"""Report emission: provenance-stamped JSON summaries and exact CSVs.

Determinism contract: identical config + seed produce byte-identical CSV
files. Floats are therefore written with repr (shortest round-trip form),
rows use a fixed column order, and line endings are pinned to \\n. The
JSON summary isolates its wall-clock timestamp inside a "header" block so
everything outside that block is reproducible too.
"""

from __future__ import annotations

import hashlib
import json
import subprocess
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .config import RunConfig, config_dict
from .rng import GENERATOR_NAME

SCHEMA = "fluxlab-report-v1"


def config_hash(cfg: RunConfig) -> str:
    """Hash of the scientifically meaningful config content.

    The output directory and thread count steer where and how fast results
    are produced, never what they are, so they stay out of the hash; this
    is what lets two runs into different directories emit byte-identical
    CSVs stamped with the same hash.
    """
    view = config_dict(cfg)
    view["run"] = {
        k: v for k, v in view["run"].items() if k not in ("out", "threads")
    }
    canonical = json.dumps(view, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            capture_output=True,
            text=True,
            timeout=10,
        )
    except (OSError, subprocess.TimeoutExpired):
        return "unknown"
    return out.stdout.strip() if out.returncode == 0 else "unknown"


def format_cell(value) -> str:
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, complex):
        raise TypeError("split complex values into _re and _im columns")
    return str(value)


def write_csv(path, header: list[str], rows, stamp: str | None = None) -> None:
    """Write rows with a fixed column order; ``stamp`` (a config hash)
    prepends a '# <schema> config=<hash>' comment line naming the run."""
    lines = []
    if stamp is not None:
        lines.append(f"# {SCHEMA} config={stamp}")
    lines.append(",".join(header))
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
        lines.append(",".join(format_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def summary_payload(
    cfg: RunConfig,
    experiment: str,
    results: dict,
    verdict: bool | None,
    tolerances: dict | None = None,
    below_paper_dimension: bool = False,
) -> dict:
    return {
        "header": {"generated_at": datetime.now(timezone.utc).isoformat()},
        "schema": SCHEMA,
        "experiment": experiment,
        "config": config_dict(cfg),
        "config_hash": config_hash(cfg),
        "provenance": {
            "git_describe": git_describe(),
            "rng": GENERATOR_NAME,
            "seed": cfg.seed,
        },
        "tolerances": tolerances or {},
        "below_paper_dimension": below_paper_dimension,
        "results": results,
        "verdict": verdict,
    }


def write_summary(path, payload: dict) -> None:
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
        newline="\n",
    )


def complex_columns(prefix: str) -> list[str]:
    return [f"{prefix}_re", f"{prefix}_im"]


def split_complex(value: complex) -> tuple[float, float]:
    return float(value.real), float(value.imag)
