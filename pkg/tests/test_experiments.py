"""Theorem margins, pair-correlation covariance, orbit averages, strings.

Everything here runs at d=2 (dim 256) so one test is a fraction of a
second; the d=3 sweeps live in the acceptance suite.
"""

import numpy as np

from fluxlab import experiments, gauge, model, spectral
from fluxlab.experiments import MARGIN_TOL
from fluxlab.model import ModelParams


def test_theorem_margins_d2(lat2, params):
    report = experiments.check_theorem1(
        lat2, params, n_samples=6, betas=(0.5, 2.0, 8.0), seed=321
    )
    assert report.verdict
    assert report.controls_ok
    assert report.min_margin >= -MARGIN_TOL
    kinds = {row.kind for row in report.rows}
    assert kinds == {"zero", "pure_gauge", "random"}
    for row in report.rows:
        if row.kind == "zero":
            assert row.margin == 0.0  # same spectrum, same log-sum-exp
        if row.kind == "pure_gauge":
            assert abs(row.margin) <= MARGIN_TOL
    # every (sample, beta) combination is present
    betas_seen = sorted({row.beta for row in report.rows})
    assert betas_seen == [0.5, 2.0, 8.0]
    random_rows = [r for r in report.rows if r.kind == "random"]
    assert len(random_rows) == 6 * 3


def test_ground_energy_gaps_d2(lat2, params):
    report = experiments.check_ground_energy(lat2, params, n_samples=6, seed=321)
    assert report.verdict
    for row in report.rows:
        if row.kind == "zero":
            assert row.gap == 0.0
        elif row.kind == "pure_gauge":
            assert abs(row.gap) <= MARGIN_TOL
        else:
            assert row.gap >= -MARGIN_TOL


def test_study_shares_samples(lat2, params):
    # both reports come from one sweep: same plan, same streams
    theorem, ground = experiments.gauge_sample_study(
        lat2, params, (2.0,), n_samples=3, seed=99
    )
    assert [r.stream for r in ground.rows] == [
        r.stream for r in theorem.rows if r.beta == 2.0
    ]
    assert theorem.seed == ground.seed == 99


def test_covariance_law(lat2, params):
    report = experiments.check_covariance(
        lat2, params, (0, 0), (1, 1), n_fields=10, seed=77
    )
    assert len(report.covariance_checks) == 10
    worst = max(c["error"] for c in report.covariance_checks)
    assert worst <= experiments.COVARIANCE_TOL
    # the zero-field value itself is reproducible
    v0 = experiments.cooper_correlation(
        lat2, params, gauge.zero_field(lat2), (0, 0), (1, 1)
    )
    assert abs(v0 - report.fixed_gauge_value) <= 1e-12


def test_covariance_phase_formula(lat2):
    phases = gauge.random_phases(lat2, 4)
    x, y = (0, 0), (1, 0)
    got = experiments.covariance_phase(phases, lat2, x, y)
    ix, iy = lat2.site_index(x), lat2.site_index(y)
    want = np.exp(-2j * phases.phi[ix]) * np.exp(2j * phases.phi[iy])
    assert abs(got - want) <= 1e-15


def test_orbit_average_off_site(lat2, params):
    report = experiments.orbit_average(
        lat2, params, (0, 0), (1, 1), n_phi_samples=64, seed=11
    )
    assert report.orbit_analytic == 0.0
    # statistical zero: |mean| within 4 standard errors
    assert abs(report.orbit_mean) <= 4.0 * report.orbit_stderr
    # direct full solves agree with the covariance-law samples
    assert max(c["error"] for c in report.direct_checks) <= 1e-10
    # stderr shrinks like 1/sqrt(n): n*stderr^2 roughly flat past n=4
    tail = [c for c in report.convergence if c["n"] >= 4]
    scaled = [c["n"] * c["stderr"] ** 2 for c in tail]
    assert max(scaled) <= 4.0 * min(scaled)


def test_orbit_average_on_site(lat2, params):
    report = experiments.orbit_average(
        lat2, params, (1, 0), (1, 0), n_phi_samples=16, seed=12
    )
    # on-site pair operator is gauge-blind: every sample equals v0
    assert abs(report.orbit_analytic - report.fixed_gauge_value) <= 1e-15
    assert abs(report.orbit_mean - report.fixed_gauge_value) <= 1e-10
    assert report.orbit_stderr <= 1e-12


def test_orbit_samples_match_stored_stats(lat2, params):
    report = experiments.orbit_average(
        lat2, params, (0, 0), (0, 1), n_phi_samples=32, seed=13
    )
    mean = complex(report.orbit_samples.mean())
    assert abs(mean - report.orbit_mean) <= 1e-15
    var = report.orbit_samples.real.var(ddof=1) + report.orbit_samples.imag.var(
        ddof=1
    )
    assert abs(np.sqrt(var / 32) - report.orbit_stderr) <= 1e-15


def test_string_suite_pure_gauge(lat2, params):
    # under a pure gauge each dressed value equals the zero-field value,
    # whatever the path
    phases = gauge.random_phases(lat2, 21)
    tilde = gauge.pure_gauge(lat2, phases)
    paths = [
        [(0, 0), (1, 0), (1, 1)],
        [(0, 0), (0, 1), (1, 1)],
        [(0, 0), (1, 0), (0, 0), (0, 1), (1, 1)],
    ]
    report = experiments.string_suite(lat2, params, tilde, paths)
    assert len(report.string_values) == 3
    for row in report.string_values:
        assert abs(row["value"] - report.fixed_gauge_value) <= 1e-10


def test_string_suite_random_field_consistency(lat2, params):
    tilde = gauge.random_field(lat2, 31)
    paths = [
        [(0, 0), (1, 0), (1, 1)],
        [(0, 0), (0, 1), (1, 1)],
    ]
    report = experiments.string_suite(lat2, params, tilde, paths)
    bare = experiments.cooper_correlation(lat2, params, tilde, (0, 0), (1, 1))
    for row, path in zip(report.string_values, paths):
        phase = np.exp(2j * gauge.string_phase(tilde, path))
        assert abs(row["value"] - phase * bare) <= 1e-12


def test_string_suite_rejects_mismatched_endpoints(lat2, params):
    import pytest

    paths = [
        [(0, 0), (1, 0), (1, 1)],
        [(0, 1), (1, 1)],
    ]
    with pytest.raises(ValueError):
        experiments.string_suite(lat2, params, gauge.zero_field(lat2), paths)


def test_pair_operator_shape(lat2):
    op = experiments.pair_operator(lat2, (0, 0), (1, 1))
    assert op.dim == 256
    # moves one pair: nonzero only between sectors... within (N_up, N_dn)
    # conserving blocks since it destroys and creates one of each spin
    from fluxlab import fock

    fock.sector_split(op)  # must not raise


def test_margin_equals_free_energy_difference(lat2, params):
    # recompute one random row end to end
    report = experiments.check_theorem1(
        lat2, params, n_samples=1, betas=(2.0,), seed=5
    )
    row = next(r for r in report.rows if r.kind == "random")
    tilde = gauge.random_field(lat2, 5, 0, 0)
    h_tilde = model.build_fermionic(lat2, params, tilde)
    h_zero = model.build_fermionic(lat2, params, gauge.zero_field(lat2))
    lz_tilde = spectral.partition_function(spectral.diagonalize(h_tilde), 2.0)
    lz_zero = spectral.partition_function(spectral.diagonalize(h_zero), 2.0)
    assert abs(row.logz_tilde - lz_tilde) <= 1e-12
    assert abs(row.logz_zero - lz_zero) <= 1e-12
    assert abs(row.margin - (lz_zero - lz_tilde)) <= 1e-12
