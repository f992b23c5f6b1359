"""Hamiltonians for BCS-paired fermions hopping in a gauge background.

Two equivalent presentations are built from the same directed-bond family:
the original one, whose hopping phases come from the composed field A and
whose plaquette energy is +K sum cos F, and the shifted one, written in the
perturbation field around the pi-flux background, with an extra i(-1)^theta
on each hop, +g pairing, and plaquette energy -K sum cos F. The plaquette
term is diagonal in the fermion Fock space, so it is carried as a scalar
shift, never materialized as a matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fock, gauge
from .fock import DOWN, UP, FockOperator, mode_id
from .gauge import GaugeField, flux_all, theta_table
from .lattice import Lattice

ETA = {UP: 1, DOWN: -1}


@dataclass(frozen=True)
class ModelParams:
    kappa: float = 1.0
    g: float = 1.0
    K: float = 1.0
    beta: float = 2.0

    def __post_init__(self):
        problems = []
        if self.g < 0:
            problems.append(f"g must be >= 0, got {self.g}")
        if self.K <= 0:
            problems.append(f"K must be > 0, got {self.K}")
        if self.beta <= 0:
            problems.append(f"beta must be > 0, got {self.beta}")
        if problems:
            raise ValueError("; ".join(problems))


@dataclass(frozen=True)
class HamiltonianBundle:
    """Fermionic matrix plus the scalar plaquette energy of the same field."""

    fermionic: FockOperator
    classical_shift: float
    lattice: Lattice
    params: ModelParams
    field: GaugeField


def _bond_arrays(lat: Lattice):
    """(x_site, y_site, axis_col) for every directed bond, site-major."""
    xs = np.repeat(np.arange(lat.n_sites), lat.d)
    cols = np.tile(np.arange(lat.d), lat.n_sites)
    ys = lat.neighbor_plus[xs, cols]
    return xs, ys, cols


def build_hop(lat: Lattice, a: GaugeField, kappa: float) -> FockOperator:
    """kappa sum_sigma sum_(x,i) (a+_x e^{iA} a_y + h.c.), y = x + e_i."""
    xs, ys, cols = _bond_arrays(lat)
    terms = []
    for x, y, c in zip(xs, ys, cols):
        phase = np.exp(1j * a.values[x, c])
        for spin in (UP, DOWN):
            mx, my = mode_id(x, spin), mode_id(y, spin)
            terms.append((kappa * phase, [(mx, True), (my, False)]))
            terms.append((kappa * np.conj(phase), [(my, True), (mx, False)]))
    return fock.assemble(lat.n_modes, terms)


def build_int(lat: Lattice, a: GaugeField, g: float) -> FockOperator:
    """-g sum_(x,i) (e^{2iA} a+_xup a+_xdn a_ydn a_yup + h.c.)."""
    return _pair_sum(lat, a, -g, 2.0)


def build_barred_hop(lat: Lattice, tilde: GaugeField, kappa: float) -> FockOperator:
    """i kappa sum_sigma sum_(x,i) (-1)^theta_i(x)
    (a+_x e^{i tilde A} a_y - a+_y e^{-i tilde A} a_x)."""
    op = None
    for spin in (UP, DOWN):
        part = build_barred_hop_component(lat, tilde, kappa, spin, eta=1)
        op = part if op is None else op + part
    return op


def build_barred_hop_component(
    lat: Lattice,
    tilde: GaugeField,
    kappa: float,
    spin: int,
    axis: int | None = None,
    eta: int = 1,
) -> FockOperator:
    """One spin's barred hopping, optionally restricted to a 1-based axis.

    ``eta`` scales the gauge angle (the down-spin copy of the decoupled form
    hops against the field), leaving the i(-1)^theta factor untouched.
    """
    th = theta_table(lat)
    xs, ys, cols = _bond_arrays(lat)
    terms = []
    for x, y, c in zip(xs, ys, cols):
        if axis is not None and c != axis - 1:
            continue
        sign = -1.0 if th[x, c] else 1.0
        phase = np.exp(1j * eta * tilde.values[x, c])
        mx, my = mode_id(x, spin), mode_id(y, spin)
        terms.append((1j * kappa * sign * phase, [(mx, True), (my, False)]))
        terms.append((-1j * kappa * sign * np.conj(phase), [(my, True), (mx, False)]))
    return fock.assemble(lat.n_modes, terms)


def build_barred_int(lat: Lattice, tilde: GaugeField, g: float) -> FockOperator:
    """+g sum_(x,i) (e^{2i tilde A} a+_xup a+_xdn a_ydn a_yup + h.c.)."""
    return _pair_sum(lat, tilde, g, 2.0)


def _pair_sum(lat: Lattice, field: GaugeField, coupling: float, angle_scale: float):
    xs, ys, cols = _bond_arrays(lat)
    terms = []
    for x, y, c in zip(xs, ys, cols):
        phase = np.exp(1j * angle_scale * field.values[x, c])
        up_x, dn_x = mode_id(x, UP), mode_id(x, DOWN)
        up_y, dn_y = mode_id(y, UP), mode_id(y, DOWN)
        terms.append(
            (
                coupling * phase,
                [(up_x, True), (dn_x, True), (dn_y, False), (up_y, False)],
            )
        )
        terms.append(
            (
                coupling * np.conj(phase),
                [(up_y, True), (dn_y, True), (dn_x, False), (up_x, False)],
            )
        )
    return fock.assemble(lat.n_modes, terms)


def flux_energy(
    lat: Lattice, field: GaugeField, K: float, convention: str = "barred"
) -> float:
    """Plaquette energy: -K sum cos F for the barred convention (the field is
    the perturbation around pi flux), +K sum cos F for the original one."""
    total = float(np.cos(flux_all(field)).sum())
    if convention == "barred":
        return -K * total
    if convention == "original":
        return K * total
    raise ValueError(f"convention must be 'barred' or 'original', got {convention!r}")


def gamma_ops(lat: Lattice, x) -> tuple[FockOperator, FockOperator]:
    """Site pair quadrature operators (hermitian, even fermion parity):
    gamma1 = a+_up a+_dn + a_dn a_up and gamma2 = i(a+_up a+_dn - a_dn a_up)."""
    s = lat.site_index(x)
    up, dn = mode_id(s, UP), mode_id(s, DOWN)
    pair_create = [(up, True), (dn, True)]
    pair_destroy = [(dn, False), (up, False)]
    g1 = fock.assemble(lat.n_modes, [(1.0, pair_create), (1.0, pair_destroy)])
    g2 = fock.assemble(lat.n_modes, [(1j, pair_create), (-1j, pair_destroy)])
    return g1, g2


def build_fermionic(lat: Lattice, params: ModelParams, tilde: GaugeField) -> FockOperator:
    """Hopping plus pairing in the barred convention, no plaquette term."""
    return build_barred_hop(lat, tilde, params.kappa) + build_barred_int(
        lat, tilde, params.g
    )


def build_full(lat: Lattice, params: ModelParams, tilde: GaugeField) -> HamiltonianBundle:
    """Full barred Hamiltonian: fermionic matrix plus scalar -K sum cos F."""
    return HamiltonianBundle(
        fermionic=build_fermionic(lat, params, tilde),
        classical_shift=flux_energy(lat, tilde, params.K, "barred"),
        lattice=lat,
        params=params,
        field=tilde,
    )
