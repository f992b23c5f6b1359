#!/usr/bin/env python3
"""Figure generation from experiment output directories.

Reads the CSV/JSON files written by the fluxlab CLI and renders one
figure per invocation. The renderer never recomputes physics: every
plotted series is a column taken verbatim from the inputs, and render()
returns a checksum over exactly those series so callers can confirm the
figure drew the emitted numbers and nothing else.

    python3 plots/render.py --in out/theorem --kind margins --out margins.png

Kinds:
    margins            histogram of free-energy margins with the zero
                       line marked (margins.csv)
    anneal-trace       two panels, objective and flux distance vs step
                       (anneal_trace.csv)
    correlation        pair-correlation magnitude vs site separation,
                       one point per correlations run found in --in or
                       one level below it (summary.json)
    orbit-convergence  running |mean| of the orbit average vs sample
                       count, stderr bars (orbit_convergence.csv)

Exit codes: 0 on success, 2 when an input names a different schema
version, 1 on any other error.
"""

import argparse
import csv
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

SCHEMA = "fluxlab-report-v1"
KINDS = ("margins", "anneal-trace", "correlation", "orbit-convergence")

# fixed ids and no embedded dates: identical inputs give identical bytes
plt.rcParams["svg.hashsalt"] = "fluxlab"


class RenderError(Exception):
    """Base class; anything raised here exits the CLI nonzero."""


class SchemaMismatch(RenderError):
    pass


class MissingColumns(RenderError):
    pass


@dataclass(frozen=True)
class FigureSpec:
    in_dir: Path
    kind: str
    out_file: Path


@dataclass(frozen=True)
class RenderResult:
    out_file: Path
    checksum: str
    series: tuple  # ((label, tuple_of_floats), ...) exactly as drawn


def series_checksum(series) -> str:
    """Canonical digest of labeled float series; the contract checked by
    the tests is that this equals the same digest over the parsed input
    columns."""
    h = hashlib.sha256()
    for label, values in series:
        h.update(str(label).encode("utf-8"))
        h.update(b"\n")
        for v in values:
            h.update(repr(float(v)).encode("ascii"))
            h.update(b",")
        h.update(b"\n")
    return h.hexdigest()


def read_table(path: Path) -> dict[str, list]:
    """Parse one stamped CSV into columns; floats where they parse."""
    if not path.is_file():
        raise RenderError(f"{path}: no such input file")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("# "):
        raise SchemaMismatch(f"{path}: missing schema stamp line")
    stamp = lines[0][2:].split()
    if not stamp or stamp[0] != SCHEMA:
        got = stamp[0] if stamp else "<empty>"
        raise SchemaMismatch(f"{path}: schema {got!r}, expected {SCHEMA!r}")
    rows = list(csv.reader(lines[1:]))
    if not rows:
        raise RenderError(f"{path}: no header row")
    header, body = rows[0], rows[1:]
    columns: dict[str, list] = {name: [] for name in header}
    for row in body:
        for name, cell in zip(header, row):
            try:
                columns[name].append(float(cell))
            except ValueError:
                columns[name].append(cell)
    return columns


def require_columns(columns: dict, names, path: Path):
    missing = [n for n in names if n not in columns]
    if missing:
        raise MissingColumns(f"{path}: missing columns {', '.join(missing)}")
    return [columns[n] for n in names]


def read_summary(path: Path) -> dict:
    if not path.is_file():
        raise RenderError(f"{path}: no such input file")
    payload = json.loads(path.read_text(encoding="utf-8"))
    if payload.get("schema") != SCHEMA:
        raise SchemaMismatch(
            f"{path}: schema {payload.get('schema')!r}, expected {SCHEMA!r}"
        )
    return payload


def _save(fig, spec: FigureSpec) -> None:
    suffix = spec.out_file.suffix.lower()
    metadata = {"Date": None} if suffix == ".svg" else None
    spec.out_file.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.out_file, dpi=150, metadata=metadata)
    plt.close(fig)


def render_margins(spec: FigureSpec) -> RenderResult:
    path = spec.in_dir / "margins.csv"
    (margins,) = require_columns(read_table(path), ["margin"], path)
    series = (("margin", tuple(float(v) for v in margins)),)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.hist(series[0][1], bins=30, color="#4878a8", edgecolor="white")
    ax.axvline(0.0, color="#c44e52", linewidth=1.2, label="zero margin")
    ax.set_xlabel("log Z(0) - log Z(A~)")
    ax.set_ylabel("count")
    ax.set_title(f"free-energy margins ({len(series[0][1])} rows)")
    ax.legend(loc="upper right")
    _save(fig, spec)
    return RenderResult(spec.out_file, series_checksum(series), series)


def render_anneal_trace(spec: FigureSpec) -> RenderResult:
    path = spec.in_dir / "anneal_trace.csv"
    step, objective, flux = require_columns(
        read_table(path), ["step", "objective", "flux_distance"], path
    )
    series = (
        ("step", tuple(float(v) for v in step)),
        ("objective", tuple(float(v) for v in objective)),
        ("flux_distance", tuple(float(v) for v in flux)),
    )
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6.0, 5.5), sharex=True)
    top.plot(series[0][1], series[1][1], color="#4878a8", linewidth=1.0)
    top.set_ylabel("objective")
    top.set_title("annealing trace (best so far)")
    bottom.plot(series[0][1], series[2][1], color="#6aa36a", linewidth=1.0)
    bottom.set_ylabel("flux distance")
    bottom.set_xlabel("step")
    _save(fig, spec)
    return RenderResult(spec.out_file, series_checksum(series), series)


def render_orbit_convergence(spec: FigureSpec) -> RenderResult:
    path = spec.in_dir / "orbit_convergence.csv"
    n, abs_mean, stderr = require_columns(
        read_table(path), ["n", "abs_mean", "stderr"], path
    )
    series = (
        ("n", tuple(float(v) for v in n)),
        ("abs_mean", tuple(float(v) for v in abs_mean)),
        ("stderr", tuple(float(v) for v in stderr)),
    )
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.errorbar(
        series[0][1],
        series[1][1],
        yerr=series[2][1],
        fmt="o-",
        color="#4878a8",
        capsize=3,
    )
    ax.set_xscale("log", base=2)
    ax.set_xlabel("samples")
    ax.set_ylabel("|orbit mean|")
    ax.set_title("orbit-average convergence")
    _save(fig, spec)
    return RenderResult(spec.out_file, series_checksum(series), series)


def _correlation_runs(in_dir: Path):
    candidates = [in_dir] + sorted(p for p in in_dir.iterdir() if p.is_dir())
    runs = []
    for d in candidates:
        if (d / "summary.json").is_file():
            payload = read_summary(d / "summary.json")
            if payload.get("experiment") == "correlations":
                runs.append((d, payload))
    return runs


def render_correlation(spec: FigureSpec) -> RenderResult:
    runs = _correlation_runs(spec.in_dir)
    if not runs:
        raise RenderError(f"{spec.in_dir}: no correlations runs found")
    points = []
    for d, payload in runs:
        results = payload.get("results", {})
        if "separation" not in results or "fixed_gauge_abs" not in results:
            raise MissingColumns(
                f"{d / 'summary.json'}: missing results.separation "
                "or results.fixed_gauge_abs"
            )
        points.append((float(results["separation"]), float(results["fixed_gauge_abs"])))
    points.sort()
    series = (
        ("separation", tuple(p[0] for p in points)),
        ("fixed_gauge_abs", tuple(p[1] for p in points)),
    )
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(series[0][1], series[1][1], "o-", color="#4878a8")
    ax.set_xlabel("site separation")
    ax.set_ylabel("|pair correlation|")
    ax.set_title(f"pair correlation vs separation ({len(points)} runs)")
    ax.set_ylim(bottom=0.0)
    _save(fig, spec)
    return RenderResult(spec.out_file, series_checksum(series), series)


_RENDERERS = {
    "margins": render_margins,
    "anneal-trace": render_anneal_trace,
    "correlation": render_correlation,
    "orbit-convergence": render_orbit_convergence,
}


def render(spec: FigureSpec) -> RenderResult:
    if spec.kind not in _RENDERERS:
        raise RenderError(f"unknown kind {spec.kind!r}; choose from {', '.join(KINDS)}")
    return _RENDERERS[spec.kind](spec)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render", description=__doc__.splitlines()[1].strip()
    )
    parser.add_argument("--in", dest="in_dir", type=Path, required=True,
                        help="experiment output directory")
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("--out", dest="out_file", type=Path, required=True,
                        help="figure file (png or svg)")
    args = parser.parse_args(argv)
    spec = FigureSpec(in_dir=args.in_dir, kind=args.kind, out_file=args.out_file)
    try:
        result = render(spec)
    except SchemaMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RenderError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{spec.kind}: wrote {result.out_file} checksum={result.checksum}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
