"""Hamiltonian builders: hop/int in both variable sets, flux energy,
pair quadratures, and the change-of-variables operator identities."""

import numpy as np
import pytest

from fluxlab import fock, gauge, model, transforms
from fluxlab.lattice import build_lattice
from fluxlab.model import ModelParams

TOL = 1e-12


def _one_particle_matrix(lat, field, kappa):
    """Independent oracle: the spin-up single-particle block, bond by bond."""
    m = np.zeros((lat.n_sites, lat.n_sites), dtype=complex)
    for b in lat.bonds():
        x = lat.site_index(b.base)
        y = lat.neighbor_plus[x, b.axis - 1]
        phase = np.exp(1j * field.values[x, b.axis - 1])
        m[x, y] += kappa * phase
        m[y, x] += kappa * np.conj(phase)
    return m


def test_hop_one_particle_sector_matches_oracle(lat2):
    field = gauge.zero_field(lat2)
    h = model.build_hop(lat2, field, 1.0)
    blocks = fock.sector_split(h)
    got = np.sort(np.linalg.eigvalsh(blocks.blocks[(1, 0)]))
    want = np.sort(np.linalg.eigvalsh(_one_particle_matrix(lat2, field, 1.0)))
    assert np.max(np.abs(got - want)) <= TOL
    # doubled-bond ring at L=1: each neighbor pair carries two bonds
    assert np.max(np.abs(want - np.array([-4.0, 0.0, 0.0, 4.0]))) <= TOL


def test_hop_one_particle_sector_with_field(lat2):
    field = gauge.random_field(lat2, 17)
    h = model.build_hop(lat2, field, 0.8)
    blocks = fock.sector_split(h)
    for key in ((1, 0), (0, 1)):
        got = np.sort(np.linalg.eigvalsh(blocks.blocks[key]))
        want = np.sort(np.linalg.eigvalsh(_one_particle_matrix(lat2, field, 0.8)))
        assert np.max(np.abs(got - want)) <= TOL


def test_zero_couplings_give_zero_operators(lat2):
    field = gauge.random_field(lat2, 1)
    assert model.build_hop(lat2, field, 0.0).max_abs() == 0.0
    assert model.build_int(lat2, field, 0.0).max_abs() == 0.0
    assert model.build_barred_hop(lat2, field, 0.0).max_abs() == 0.0
    assert model.build_barred_int(lat2, field, 0.0).max_abs() == 0.0


def test_hermiticity_and_number_conservation(lat2, params):
    for seed in range(3):
        tilde = gauge.random_field(lat2, 200 + seed)
        h = model.build_fermionic(lat2, params, tilde)
        assert h.is_hermitian()
        fock.sector_split(h)  # raises NotBlockDiagonal on a leak
        for spin in (fock.UP, fock.DOWN):
            n_op = fock.total_number(lat2.n_modes, spin)
            comm = h @ n_op - n_op @ h
            assert comm.max_abs() <= TOL


def test_int_depends_on_angle_mod_pi(lat2):
    # e^{2iA} is blind to shifting one bond angle by pi
    base = gauge.random_field(lat2, 9)
    shifted_vals = base.values.copy()
    shifted_vals[2, 1] = gauge.normalize_angle(shifted_vals[2, 1] + np.pi)
    shifted = gauge.GaugeField(lat2, shifted_vals)
    a = model.build_int(lat2, base, 1.3)
    b = model.build_int(lat2, shifted, 1.3)
    assert a.max_abs_diff(b) <= TOL
    # the hop term does notice
    ha = model.build_hop(lat2, base, 1.0)
    hb = model.build_hop(lat2, shifted, 1.0)
    assert ha.max_abs_diff(hb) > 0.1


def test_pair_matrix_element(lat2):
    # <x-pair| H_int |y-pair> = -g sum over connecting bonds of e^{2iA},
    # oriented x <- y; at L=1 each neighbor pair contributes two bonds
    field = gauge.random_field(lat2, 31)
    g = 0.7
    h = model.build_int(lat2, field, g).to_dense()

    def pair_state(site):
        ups = fock.create(lat2.n_modes, fock.mode_id(site, fock.UP))
        dns = fock.create(lat2.n_modes, fock.mode_id(site, fock.DOWN))
        vec = np.zeros(1 << lat2.n_modes, dtype=complex)
        vec[0] = 1.0
        return (ups @ dns).to_dense() @ vec

    for x in range(lat2.n_sites):
        for y in range(lat2.n_sites):
            want = 0.0 + 0.0j
            for b in lat2.bonds():
                bx = lat2.site_index(b.base)
                by = lat2.neighbor_plus[bx, b.axis - 1]
                angle = field.values[bx, b.axis - 1]
                if (bx, by) == (x, y):
                    want += -g * np.exp(2j * angle)
                if (bx, by) == (y, x):
                    want += -g * np.exp(-2j * angle)
            got = np.vdot(pair_state(x), h @ pair_state(y))
            assert abs(got - want) <= TOL, (x, y)


def test_barred_equals_composed():
    # the defining identities of the variable change, entrywise
    for d in (2, 3):
        lat = build_lattice(d, 1)
        for seed in range(10):
            tilde = gauge.random_field(lat, 300 + seed)
            a = gauge.compose(lat, tilde)
            hop_a = model.build_hop(lat, a, 1.1)
            hop_t = model.build_barred_hop(lat, tilde, 1.1)
            assert hop_a.max_abs_diff(hop_t) <= TOL, (d, seed)
            int_a = model.build_int(lat, a, 0.9)
            int_t = model.build_barred_int(lat, tilde, 0.9)
            assert int_a.max_abs_diff(int_t) <= TOL, (d, seed)


def test_barred_hop_at_zero_field_is_pi_flux_hop(lat2):
    got = model.build_barred_hop(lat2, gauge.zero_field(lat2), 1.0)
    want = model.build_hop(lat2, gauge.pi_flux_field(lat2), 1.0)
    assert got.max_abs_diff(want) <= TOL


def test_flux_energy_conventions(lat2, lat3):
    for lat in (lat2, lat3):
        n_p = lat.n_plaquettes
        pi_e = model.flux_energy(lat, gauge.pi_flux_field(lat), 2.0, "original")
        assert abs(pi_e - (-2.0 * n_p)) <= TOL
        zero_e = model.flux_energy(lat, gauge.zero_field(lat), 2.0, "barred")
        assert abs(zero_e - (-2.0 * n_p)) <= TOL
        for seed in range(5):
            tilde = gauge.random_field(lat, 400 + seed)
            orig = model.flux_energy(lat, gauge.compose(lat, tilde), 1.5, "original")
            barred = model.flux_energy(lat, tilde, 1.5, "barred")
            assert abs(orig - barred) <= TOL
    with pytest.raises(ValueError):
        model.flux_energy(lat2, gauge.zero_field(lat2), 1.0, "sideways")


def test_gamma_ops_site_algebra(lat2):
    g1, g2 = model.gamma_ops(lat2, (0, 0))
    assert g1.is_hermitian()
    assert g2.is_hermitian()
    # (g1)^2 + (g2)^2 = 2 * projector onto {empty, doubly occupied} at the site
    up = fock.number(lat2.n_modes, fock.mode_id(0, fock.UP))
    dn = fock.number(lat2.n_modes, fock.mode_id(0, fock.DOWN))
    eye = fock.identity(lat2.n_modes)
    proj = (eye - up) @ (eye - dn) + up @ dn
    lhs = g1 @ g1 + g2 @ g2
    assert lhs.max_abs_diff(proj * 2.0) <= TOL


def test_gamma_cross_term_is_pair_hop(lat2):
    # gamma1_x gamma1_y for x != y contains exactly the pair transfer terms
    x, y = (0, 0), (1, 1)
    g1x, _ = model.gamma_ops(lat2, x)
    g1y, _ = model.gamma_ops(lat2, y)
    sx, sy = lat2.site_index(x), lat2.site_index(y)
    cross = fock.assemble(
        lat2.n_modes,
        [
            (
                1.0,
                [
                    (fock.mode_id(sx, fock.UP), True),
                    (fock.mode_id(sx, fock.DOWN), True),
                    (fock.mode_id(sy, fock.DOWN), False),
                    (fock.mode_id(sy, fock.UP), False),
                ],
            ),
            (
                1.0,
                [
                    (fock.mode_id(sy, fock.UP), True),
                    (fock.mode_id(sy, fock.DOWN), True),
                    (fock.mode_id(sx, fock.DOWN), False),
                    (fock.mode_id(sx, fock.UP), False),
                ],
            ),
            (
                1.0,
                [
                    (fock.mode_id(sx, fock.UP), True),
                    (fock.mode_id(sx, fock.DOWN), True),
                    (fock.mode_id(sy, fock.UP), True),
                    (fock.mode_id(sy, fock.DOWN), True),
                ],
            ),
            (
                1.0,
                [
                    (fock.mode_id(sy, fock.DOWN), False),
                    (fock.mode_id(sy, fock.UP), False),
                    (fock.mode_id(sx, fock.DOWN), False),
                    (fock.mode_id(sx, fock.UP), False),
                ],
            ),
        ],
    )
    assert (g1x @ g1y).max_abs_diff(cross) <= TOL


def test_phase_conjugation_shifts_the_field(lat2):
    # U(phi)+ H_hop(A + dphi) U(phi) = H_hop(A) with dphi_{x,y} = phi_x - phi_y
    phases = gauge.random_phases(lat2, 55)
    u = transforms.build_unitary(lat2, "u_phase", phases=phases)
    dphi = gauge.pure_gauge(lat2, phases)
    for seed in range(3):
        a = gauge.random_field(lat2, 500 + seed)
        shifted = gauge.add(a, dphi)
        got = transforms.conjugate(model.build_hop(lat2, shifted, 1.0), u)
        assert got.max_abs_diff(model.build_hop(lat2, a, 1.0)) <= TOL
        got_int = transforms.conjugate(model.build_int(lat2, shifted, 0.8), u)
        assert got_int.max_abs_diff(model.build_int(lat2, a, 0.8)) <= TOL


def test_full_bundle_zero_couplings(lat2):
    params = ModelParams(kappa=0.0, g=0.0, K=1.5, beta=1.0)
    tilde = gauge.random_field(lat2, 8)
    bundle = model.build_full(lat2, params, tilde)
    assert bundle.fermionic.max_abs() == 0.0
    want = -1.5 * float(np.cos(gauge.flux_all(tilde)).sum())
    assert abs(bundle.classical_shift - want) <= TOL


def test_spectrum_invariant_under_pure_gauge(lat2, params):
    for seed in range(3):
        tilde = gauge.random_field(lat2, 600 + seed)
        phases = gauge.random_phases(lat2, 700 + seed)
        shifted = gauge.add(tilde, gauge.pure_gauge(lat2, phases))
        e_base = np.linalg.eigvalsh(
            model.build_fermionic(lat2, params, tilde).to_dense()
        )
        e_shift = np.linalg.eigvalsh(
            model.build_fermionic(lat2, params, shifted).to_dense()
        )
        assert np.max(np.abs(e_base - e_shift)) <= 1e-10


def test_fermionic_real_after_quarter_rotation(lat2, params):
    u = transforms.build_unitary(lat2, "u_odd_pi2")
    h = model.build_fermionic(lat2, params, gauge.zero_field(lat2))
    rotated = transforms.conjugate(h, u).to_dense()
    assert np.max(np.abs(rotated.imag)) <= TOL


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(kappa=1.0, g=-0.1, K=1.0, beta=1.0)
    with pytest.raises(ValueError):
        ModelParams(kappa=1.0, g=1.0, K=0.0, beta=1.0)
    with pytest.raises(ValueError):
        ModelParams(kappa=1.0, g=1.0, K=1.0, beta=-2.0)
