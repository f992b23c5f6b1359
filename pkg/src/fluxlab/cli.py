"""Command-line entry point: one subcommand per experiment.

Exit codes: 0 when the experiment's verdict passes, 2 when it computed
cleanly but the verdict fails, 1 on configuration or runtime errors (in
which case no output files are written). Flag overrides beat the config
file, which beats documented defaults.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import anneal as anneal_mod
from . import experiments, gauge, spectral, transforms
from .config import EXPERIMENTS, RunConfig, parse_config
from .errors import FluxlabError
from .lattice import Lattice, build_lattice, neighbor
from .model import ModelParams, build_full
from .reporting import (
    complex_columns,
    config_hash,
    split_complex,
    summary_payload,
    write_csv,
    write_summary,
)

MARGIN_TOL = experiments.MARGIN_TOL
COVARIANCE_TOL = experiments.COVARIANCE_TOL
STRING_TOL = 1e-10


def _model_params(cfg: RunConfig) -> ModelParams:
    return ModelParams(kappa=cfg.kappa, g=cfg.g, K=cfg.K, beta=cfg.beta)


def _resolve_sites(cfg: RunConfig, lat: Lattice):
    x = cfg.x if cfg.x is not None else (0,) * lat.d
    y = cfg.y if cfg.y is not None else (1,) * lat.d
    return x, y


def default_paths(lat: Lattice, x, y):
    """Three distinct lattice paths x -> y: two staircases + a backtrack."""
    side = 2 * lat.L

    def staircase(axes):
        path = [tuple(x)]
        cur = tuple(x)
        for i in axes:
            steps = (y[i - 1] - cur[i - 1]) % side
            for _ in range(steps):
                cur = neighbor(lat, cur, i)
                path.append(cur)
        return tuple(path)

    ascending = staircase(range(1, lat.d + 1))
    descending = staircase(range(lat.d, 0, -1))
    detour = (tuple(x), neighbor(lat, tuple(x), 1)) + ascending
    if len(ascending) == 1:  # x == y: loop out and back along two axes
        a1 = neighbor(lat, tuple(x), 1)
        a2 = neighbor(lat, tuple(x), 2)
        return (
            (tuple(x), a1, tuple(x)),
            (tuple(x), a2, tuple(x)),
            (tuple(x), a1, tuple(x), a2, tuple(x)),
        )
    return (ascending, descending, detour)


def _experiment_field(cfg: RunConfig, lat: Lattice) -> gauge.GaugeField:
    if cfg.field_kind == "zero":
        return gauge.zero_field(lat)
    if cfg.field_kind == "random":
        return gauge.random_field(lat, cfg.seed, 9)
    if cfg.field_kind == "pure-gauge":
        return gauge.pure_gauge(lat, gauge.random_phases(lat, cfg.seed, 9))
    return gauge.pi_flux_field(lat)


def _run_identities(cfg: RunConfig, lat: Lattice, out: Path, stamp: str):
    params = _model_params(cfg)
    rows = []
    worst: dict[str, float] = {}
    for s in range(cfg.n_identity_seeds):
        tilde = gauge.random_field(lat, cfg.seed, 8, s)
        for rep in transforms.identity_suite(lat, params, tilde):
            rows.append((rep["kind"], s, rep["max_error"], rep["passed"]))
            worst[rep["kind"]] = max(worst.get(rep["kind"], 0.0), rep["max_error"])
    write_csv(
        out / "identities.csv",
        ["kind", "field_seed", "max_error", "passed"],
        rows,
        stamp=stamp,
    )
    results = {
        "identities": [
            {
                "kind": kind,
                "max_error": err,
                "passed": err <= transforms.IDENTITY_TOL,
            }
            for kind, err in worst.items()
        ],
        "n_fields": cfg.n_identity_seeds,
    }
    verdict = all(item["passed"] for item in results["identities"])
    return results, verdict, {"identity": transforms.IDENTITY_TOL}


def _run_theorem(cfg: RunConfig, lat: Lattice, out: Path, stamp: str):
    params = _model_params(cfg)
    report = experiments.check_theorem1(
        lat,
        params,
        cfg.n_samples,
        cfg.betas,
        cfg.seed,
        n_controls=cfg.n_controls,
        threads=cfg.threads,
    )
    write_csv(
        out / "margins.csv",
        ["sample_index", "kind", "stream", "beta", "logz_tilde", "logz_zero", "margin"],
        [
            (r.sample_index, r.kind, r.stream, r.beta, r.logz_tilde, r.logz_zero, r.margin)
            for r in report.rows
        ],
        stamp=stamp,
    )
    results = {
        "n_samples": cfg.n_samples,
        "n_controls": cfg.n_controls,
        "betas": list(report.betas),
        "min_margin": report.min_margin,
        "control_max_abs_margin": report.control_max_abs_margin,
        "margins_ok": report.verdict,
        "controls_ok": report.controls_ok,
    }
    return results, report.verdict and report.controls_ok, {"margin": MARGIN_TOL}


def _run_ground_energy(cfg: RunConfig, lat: Lattice, out: Path, stamp: str):
    params = _model_params(cfg)
    report = experiments.check_ground_energy(
        lat, params, cfg.n_samples, cfg.seed, n_controls=cfg.n_controls, threads=cfg.threads
    )
    write_csv(
        out / "gaps.csv",
        ["sample_index", "kind", "stream", "e0_tilde", "e0_zero", "gap"],
        [
            (r.sample_index, r.kind, r.stream, r.e0_tilde, r.e0_zero, r.gap)
            for r in report.rows
        ],
        stamp=stamp,
    )
    results = {
        "n_samples": cfg.n_samples,
        "min_gap": report.min_gap,
        "control_max_abs_gap": report.control_max_abs_gap,
        "gaps_ok": report.verdict,
        "controls_ok": report.controls_ok,
    }
    return results, report.verdict and report.controls_ok, {"gap": MARGIN_TOL}


def _run_correlations(cfg: RunConfig, lat: Lattice, out: Path, stamp: str):
    params = _model_params(cfg)
    x, y = _resolve_sites(cfg, lat)
    report = experiments.check_covariance(
        lat, params, x, y, cfg.n_covariance_fields, cfg.seed
    )
    rows = []
    for c in report.covariance_checks:
        rows.append(
            (c["stream"], *split_complex(c["value"]), *split_complex(c["predicted"]), c["error"])
        )
    write_csv(
        out / "covariance.csv",
        ["stream", *complex_columns("value"), *complex_columns("predicted"), "error"],
        rows,
        stamp=stamp,
    )
    max_error = max((c["error"] for c in report.covariance_checks), default=0.0)
    side = 2 * lat.L
    deltas = [min((yi - xi) % side, (xi - yi) % side) for xi, yi in zip(x, y)]
    results = {
        "x": list(report.x),
        "y": list(report.y),
        "separation": float(np.sqrt(sum(dd * dd for dd in deltas))),
        "fixed_gauge_value": list(split_complex(report.fixed_gauge_value)),
        "fixed_gauge_abs": abs(report.fixed_gauge_value),
        "n_fields": cfg.n_covariance_fields,
        "max_error": max_error,
    }
    return results, max_error <= COVARIANCE_TOL, {"covariance": COVARIANCE_TOL}


def _run_orbit(cfg: RunConfig, lat: Lattice, out: Path, stamp: str):
    params = _model_params(cfg)
    x, y = _resolve_sites(cfg, lat)
    report = experiments.orbit_average(lat, params, x, y, cfg.n_phi_samples, cfg.seed)
    write_csv(
        out / "orbit_samples.csv",
        ["sample", *complex_columns("value")],
        [(k, *split_complex(v)) for k, v in enumerate(report.orbit_samples)],
        stamp=stamp,
    )
    write_csv(
        out / "orbit_convergence.csv",
        ["n", "abs_mean", "stderr"],
        [(c["n"], c["abs_mean"], c["stderr"]) for c in report.convergence],
        stamp=stamp,
    )
    write_csv(
        out / "orbit_direct_checks.csv",
        ["stream", *complex_columns("value"), *complex_columns("predicted"), "error"],
        [
            (c["stream"], *split_complex(c["value"]), *split_complex(c["predicted"]), c["error"])
            for c in report.direct_checks
        ],
        stamp=stamp,
    )
    onsite = tuple(report.x) == tuple(report.y)
    direct_max = max((c["error"] for c in report.direct_checks), default=0.0)
    if onsite:
        stat_ok = abs(report.orbit_mean - report.fixed_gauge_value) <= COVARIANCE_TOL
    else:
        stat_ok = abs(report.orbit_mean) <= 4.0 * report.orbit_stderr
    results = {
        "x": list(report.x),
        "y": list(report.y),
        "on_site": onsite,
        "analytic": list(split_complex(complex(report.orbit_analytic))),
        "mean": list(split_complex(report.orbit_mean)),
        "stderr": report.orbit_stderr,
        "n_phi_samples": cfg.n_phi_samples,
        "direct_check_max_error": direct_max,
    }
    verdict = stat_ok and direct_max <= COVARIANCE_TOL
    return results, verdict, {"covariance": COVARIANCE_TOL, "mean_sigmas": 4.0}


def _run_string(cfg: RunConfig, lat: Lattice, out: Path, stamp: str):
    params = _model_params(cfg)
    x, y = _resolve_sites(cfg, lat)
    paths = cfg.paths if cfg.paths is not None else default_paths(lat, x, y)
    tilde = _experiment_field(cfg, lat)
    report = experiments.string_suite(lat, params, tilde, paths)
    write_csv(
        out / "string_values.csv",
        ["path", *complex_columns("value"), "error_vs_zero"],
        [
            (
                "->".join("/".join(str(c) for c in site) for site in r["path"]),
                *split_complex(r["value"]),
                r["error_vs_zero"],
            )
            for r in report.string_values
        ],
        stamp=stamp,
    )
    max_error = max(r["error_vs_zero"] for r in report.string_values)
    gauge_equivalent = cfg.field_kind in ("zero", "pure-gauge")
    results = {
        "x": list(report.x),
        "y": list(report.y),
        "field_kind": cfg.field_kind,
        "n_paths": len(report.string_values),
        "zero_field_value": list(split_complex(report.fixed_gauge_value)),
        "max_error_vs_zero": max_error,
        "values_match_zero_field": max_error <= STRING_TOL,
    }
    verdict = max_error <= STRING_TOL if gauge_equivalent else True
    return results, verdict, {"string": STRING_TOL}


def _run_anneal(cfg: RunConfig, lat: Lattice, out: Path, stamp: str):
    params = _model_params(cfg)
    acfg = anneal_mod.AnnealConfig(
        t_initial=cfg.t_initial,
        t_final=cfg.t_final,
        cooling=cfg.cooling,
        steps_per_temp=cfg.steps_per_temp,
        proposal_width=cfg.proposal_width,
        restarts=cfg.restarts,
        seed=cfg.seed,
        beta_physical=cfg.beta,
    )
    result = anneal_mod.run_anneal(lat, params, acfg, threads=cfg.threads)
    write_csv(
        out / "anneal_trace.csv",
        ["step", "temperature", "objective", "flux_distance"],
        [
            (r["step"], r["temperature"], r["objective"], r["flux_distance"])
            for r in result.objective_trace
        ],
        stamp=stamp,
    )
    write_csv(
        out / "anneal_restarts.csv",
        ["restart", "best_objective", "flux_distance", "converged", "accepted", "steps"],
        [
            (s.restart, s.best_objective, s.flux_distance, s.converged, s.accepted, s.steps)
            for s in result.restart_summaries
        ],
        stamp=stamp,
    )
    results = {
        "restarts": cfg.restarts,
        "restarts_converged": result.restarts_converged,
        "convergence_flux": anneal_mod.CONVERGENCE_FLUX,
        "best_objective": result.best_objective,
        "best_flux_distance": result.flux_distance,
        "zero_objective": result.zero_objective,
        "theorem_consistent": result.theorem_consistent,
    }
    return results, result.theorem_consistent, {"zero_field_optimality": 1e-10}


def _run_spectrum(cfg: RunConfig, lat: Lattice, out: Path, stamp: str):
    params = _model_params(cfg)
    tilde = _experiment_field(cfg, lat)
    bundle = build_full(lat, params, tilde)
    spec = spectral.diagonalize(bundle, threads=cfg.threads)
    write_csv(
        out / "spectrum.csv",
        ["n_up", "n_dn", "index", "eigenvalue"],
        list(spectral.spectrum_rows(spec)),
        stamp=stamp,
    )
    results = {
        "field_kind": cfg.field_kind,
        "e0": spec.e0,
        "degeneracy": spec.degeneracy,
        "degeneracy_stable": spec.degeneracy_stable,
        "spectral_width": spec.spectral_width,
        "classical_shift": spec.shift,
        "log_z": {str(b): spectral.partition_function(spec, b) for b in cfg.betas},
    }
    return results, True, {"ground": spec.ground_tol}


_RUNNERS = {
    "identities": _run_identities,
    "check-theorem": _run_theorem,
    "ground-energy": _run_ground_energy,
    "correlations": _run_correlations,
    "orbit-average": _run_orbit,
    "string": _run_string,
    "anneal": _run_anneal,
    "spectrum": _run_spectrum,
}


def run(cfg: RunConfig) -> int:
    lat = build_lattice(cfg.d, cfg.L)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    stamp = config_hash(cfg)
    results, verdict, tolerances = _RUNNERS[cfg.experiment](cfg, lat, out, stamp)
    payload = summary_payload(
        cfg,
        cfg.experiment,
        results,
        verdict,
        tolerances=tolerances,
        below_paper_dimension=lat.below_paper_dimension,
    )
    write_summary(out / "summary.json", payload)
    print(f"{cfg.experiment}: {'pass' if verdict else 'FAIL'} -> {out / 'summary.json'}")
    return 0 if verdict else 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluxlab",
        description="Exact-diagonalization laboratory for paired lattice "
        "fermions coupled to classical U(1) gauge fields.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=Path, default=None, help="INI or JSON config file")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="master RNG seed")
        p.add_argument("--threads", type=int, default=None, help="worker thread count")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {
        "experiment": args.experiment,
        "out": args.out,
        "seed": args.seed,
        "threads": args.threads,
    }
    try:
        text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
        cfg = parse_config(text, overrides=overrides)
        return run(cfg)
    except FluxlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
