"""Unitary changes of variables and the operator identities they induce.

Every unitary here maps each occupation basis state to a single basis state
times a phase, so they are built as monomial matrices (a permutation array
plus a phase array) and only materialized as sparse matrices at the end.
The particle-hole factors are multiplied in ascending mode order; any other
order differs by a global sign, which cancels in every conjugation.

``verify_identity`` checks the seven conjugation identities entrywise: the
spin-rotation forms of hopping and pairing, the quadrature decomposition of
the pairing term, and the pair-creation forms that hopping and pairing take
under the combined phase and particle-hole transformation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import model
from .errors import UnknownLabel
from .fock import DOWN, UP, FockOperator, mode_id
from .gauge import GaugeField, theta_table, zero_field
from .lattice import Lattice
from .model import ETA, ModelParams

IDENTITY_TOL = 1e-12

IDENTITY_KINDS = (
    "spin_rotation_hop",
    "spin_rotation_int",
    "gamma_decomposition",
    "u1_int_1",
    "u1_int_j",
    "u1_hop_1",
    "u1_hop_i",
)

UNITARY_LABELS = ("u_odd_pi2", "u_1j", "u_1", "u_odd", "u_tilde_1", "u_phase")


@dataclass(frozen=True)
class SignTables:
    """Site-sign tables entering the transformed hopping terms."""

    upsilon: np.ndarray  # (-1)^(coordinate sum)
    varrho: np.ndarray  # (n_sites, d): (-1)^(theta_i(x) + x^(i))
    varrho_tilde: np.ndarray  # varrho_i(x) * upsilon(x)

    @staticmethod
    def eta(spin: int) -> int:
        return ETA[spin]


def build_sign_tables(lat: Lattice) -> SignTables:
    upsilon = np.where(lat.parity == 1, -1, 1).astype(np.int64)
    coord_parity = np.mod(lat.coords, 2)
    th = theta_table(lat)
    varrho = np.where((th + coord_parity) % 2 == 1, -1, 1).astype(np.int64)
    varrho_tilde = varrho * upsilon[:, None]
    for arr in (upsilon, varrho, varrho_tilde):
        arr.setflags(write=False)
    return SignTables(upsilon, varrho, varrho_tilde)


def upsilon_sigma(tables: SignTables, spin: int) -> np.ndarray:
    return tables.upsilon * ETA[spin]


@dataclass(frozen=True)
class UnitaryOp:
    label: str
    matrix: FockOperator


class _Monomial:
    """U|s> = phase[s] |perm[s]>."""

    def __init__(self, perm: np.ndarray, phase: np.ndarray):
        self.perm = perm
        self.phase = phase

    @staticmethod
    def identity(dim: int) -> "_Monomial":
        return _Monomial(np.arange(dim), np.ones(dim, dtype=complex))

    @staticmethod
    def diagonal(phase: np.ndarray) -> "_Monomial":
        return _Monomial(np.arange(len(phase)), phase.astype(complex))

    def left_multiply(self, factor: "_Monomial") -> "_Monomial":
        """factor @ self."""
        return _Monomial(
            factor.perm[self.perm], self.phase * factor.phase[self.perm]
        )

    def to_operator(self, n_modes: int) -> FockOperator:
        dim = len(self.perm)
        mat = sp.coo_matrix(
            (self.phase, (self.perm, np.arange(dim))), shape=(dim, dim)
        ).tocsr()
        return FockOperator(n_modes, mat)


def _occupied_count_in_mask(dim: int, mask: int) -> np.ndarray:
    states = np.arange(dim, dtype=np.uint64)
    return np.bitwise_count(states & np.uint64(mask)).astype(np.int64)


def _site_mode_mask(lat: Lattice, site_selector: np.ndarray) -> int:
    mask = 0
    for s in np.nonzero(site_selector)[0]:
        mask |= 1 << mode_id(int(s), UP)
        mask |= 1 << mode_id(int(s), DOWN)
    return mask


def _particle_hole_factor(n_modes: int, mode: int) -> _Monomial:
    """The dressed factor (product of parities over all other modes) times
    (a+ + a) at ``mode``; flips the bit with a state-dependent sign."""
    dim = 1 << n_modes
    states = np.arange(dim, dtype=np.int64)
    below = (states & ((1 << mode) - 1)).astype(np.uint64)
    flip_sign = 1 - 2 * (np.bitwise_count(below).astype(np.int64) & 1)
    targets = states ^ (1 << mode)
    total = np.bitwise_count(targets.astype(np.uint64)).astype(np.int64)
    bit_m = (targets >> mode) & 1
    parity_sign = 1 - 2 * ((total - bit_m) & 1)
    return _Monomial(targets, (flip_sign * parity_sign).astype(complex))


def build_unitary(
    lat: Lattice,
    label: str,
    *,
    axis: int | None = None,
    phases=None,
) -> UnitaryOp:
    """Construct one of the supported unitaries by label.

    u_odd_pi2: quarter phase per occupied mode on odd-parity sites.
    u_1j: quarter phase per occupied mode on sites with even x^(axis).
    u_1: product of u_1j over axes 2..d.
    u_odd: particle-hole map on odd-parity sites.
    u_tilde_1: u_1 composed after u_odd.
    u_phase: e^{i phi_x} per occupied mode at site x (needs ``phases``).
    """
    n_modes = lat.n_modes
    dim = 1 << n_modes
    if label == "u_odd_pi2":
        mask = _site_mode_mask(lat, lat.parity == 1)
        mono = _Monomial.diagonal(1j ** _occupied_count_in_mask(dim, mask))
    elif label == "u_1j":
        if axis is None or not 1 <= axis <= lat.d:
            raise ValueError(f"u_1j needs a 1-based axis in 1..{lat.d}")
        even = np.mod(lat.coords[:, axis - 1], 2) == 0
        mask = _site_mode_mask(lat, even)
        mono = _Monomial.diagonal(1j ** _occupied_count_in_mask(dim, mask))
    elif label == "u_1":
        mono = _Monomial.identity(dim)
        for j in range(2, lat.d + 1):
            even = np.mod(lat.coords[:, j - 1], 2) == 0
            mask = _site_mode_mask(lat, even)
            step = _Monomial.diagonal(1j ** _occupied_count_in_mask(dim, mask))
            mono = mono.left_multiply(step)
    elif label == "u_odd":
        mono = _Monomial.identity(dim)
        for site in np.nonzero(lat.parity == 1)[0]:
            for spin in (UP, DOWN):
                factor = _particle_hole_factor(n_modes, mode_id(int(site), spin))
                mono = mono.left_multiply(factor)
    elif label == "u_tilde_1":
        u1 = build_unitary(lat, "u_1")
        uodd = build_unitary(lat, "u_odd")
        return UnitaryOp("u_tilde_1", u1.matrix @ uodd.matrix)
    elif label == "u_phase":
        if phases is None:
            raise ValueError("u_phase needs site phases")
        phi = np.asarray(phases.phi, dtype=np.float64)
        states = np.arange(dim, dtype=np.int64)
        angle = np.zeros(dim)
        for m in range(n_modes):
            angle += phi[m // 2] * ((states >> m) & 1)
        mono = _Monomial.diagonal(np.exp(1j * angle))
    else:
        raise UnknownLabel(f"unknown unitary label {label!r}")
    return UnitaryOp(label, mono.to_operator(n_modes))


def conjugate(op: FockOperator, u: UnitaryOp) -> FockOperator:
    return u.matrix.dagger() @ op @ u.matrix


def _pair_quadrature_sum(lat: Lattice, g: float, axis: int, signs: tuple[int, int]):
    """(g/4) sum_x [G1_x + s1 G1_{x+e}]^2 - (g/4) sum_x [G2_x + s2 G2_{x+e}]^2."""
    s1, s2 = signs
    gammas = [model.gamma_ops(lat, lat.site(s)) for s in range(lat.n_sites)]
    acc = None
    for s in range(lat.n_sites):
        y = int(lat.neighbor_plus[s, axis - 1])
        g1x, g2x = gammas[s]
        g1y, g2y = gammas[y]
        a = g1x + (float(s1) * g1y)
        b = g2x + (float(s2) * g2y)
        term = (g / 4.0) * (a @ a) - (g / 4.0) * (b @ b)
        acc = term if acc is None else acc + term
    return acc


def barred_int_axis(lat: Lattice, g: float, axis: int) -> FockOperator:
    """Single-axis quadrature form of the zero-field pairing term."""
    return _pair_quadrature_sum(lat, g, axis, (1, -1))


def _onsite_quadrature_sum(lat: Lattice, coeff: float) -> FockOperator:
    acc = None
    for s in range(lat.n_sites):
        g1, g2 = model.gamma_ops(lat, lat.site(s))
        term = coeff * ((g1 @ g1) - (g2 @ g2))
        acc = term if acc is None else acc + term
    return acc


def _hop_pair_form(
    lat: Lattice,
    tilde: GaugeField,
    kappa: float,
    spin: int,
    axis: int,
    tables: SignTables,
) -> FockOperator:
    """Pair-creation form a hopping axis takes under the combined unitary."""
    ups = upsilon_sigma(tables, spin)
    th = theta_table(lat)
    terms = []
    for s in range(lat.n_sites):
        y = int(lat.neighbor_plus[s, axis - 1])
        ang = ups[s] * tilde.values[s, axis - 1]
        mx, my = mode_id(s, spin), mode_id(y, spin)
        if axis == 1:
            sign = -1.0 if th[s, 0] else 1.0
            terms.append((1j * kappa * sign * np.exp(1j * ang), [(mx, True), (my, True)]))
            terms.append(
                (1j * kappa * sign * np.exp(-1j * ang), [(mx, False), (my, False)])
            )
        else:
            sign = float(tables.varrho_tilde[s, axis - 1])
            terms.append((kappa * sign * np.exp(1j * ang), [(mx, True), (my, True)]))
            terms.append(
                (kappa * sign * np.exp(-1j * ang), [(my, False), (mx, False)])
            )
    from . import fock

    return fock.assemble(lat.n_modes, terms)


def verify_identity(
    lat: Lattice, params: ModelParams, tilde: GaugeField, kind: str
) -> dict:
    """Check one conjugation identity entrywise; returns kind, max_error, passed."""
    kappa, g = params.kappa, params.g
    tables = build_sign_tables(lat)
    if kind == "spin_rotation_hop":
        u = build_unitary(lat, "u_odd_pi2")
        lhs = conjugate(model.build_barred_hop(lat, tilde, kappa), u)
        th = theta_table(lat)
        terms = []
        for s in range(lat.n_sites):
            for c in range(lat.d):
                y = int(lat.neighbor_plus[s, c])
                sign = (-1.0 if th[s, c] else 1.0) * (
                    1.0 if lat.parity[s] == 1 else -1.0
                )
                phase = np.exp(1j * tilde.values[s, c])
                for spin in (UP, DOWN):
                    mx, my = mode_id(s, spin), mode_id(y, spin)
                    terms.append((kappa * sign * phase, [(mx, True), (my, False)]))
                    terms.append(
                        (kappa * sign * np.conj(phase), [(my, True), (mx, False)])
                    )
        from . import fock

        rhs = fock.assemble(lat.n_modes, terms)
    elif kind == "spin_rotation_int":
        u = build_unitary(lat, "u_odd_pi2")
        lhs = conjugate(model.build_barred_int(lat, tilde, g), u)
        rhs = -1.0 * model.build_barred_int(lat, tilde, g)
    elif kind == "gamma_decomposition":
        zero = zero_field(lat)
        lhs = model.build_barred_int(lat, zero, g)
        rhs = None
        for j in range(1, lat.d + 1):
            part = _pair_quadrature_sum(lat, g, j, (1, -1))
            rhs = part if rhs is None else rhs + part
        rhs = rhs - _onsite_quadrature_sum(lat, lat.d * g / 2.0)
    elif kind == "u1_int_1":
        u = build_unitary(lat, "u_tilde_1")
        lhs = conjugate(_pair_quadrature_sum(lat, g, 1, (1, -1)), u)
        rhs = _pair_quadrature_sum(lat, g, 1, (-1, -1))
    elif kind == "u1_int_j":
        if lat.d < 2:
            raise ValueError("needs d >= 2")
        u = build_unitary(lat, "u_tilde_1")
        err = 0.0
        for j in range(2, lat.d + 1):
            lhs = conjugate(_pair_quadrature_sum(lat, g, j, (1, -1)), u)
            rhs = _pair_quadrature_sum(lat, g, j, (1, 1))
            err = max(err, lhs.max_abs_diff(rhs))
        return {"kind": kind, "max_error": err, "passed": err <= IDENTITY_TOL}
    elif kind == "u1_hop_1":
        u = build_unitary(lat, "u_tilde_1")
        err = 0.0
        for spin in (UP, DOWN):
            lhs = conjugate(
                model.build_barred_hop_component(
                    lat, tilde, kappa, spin, axis=1, eta=ETA[spin]
                ),
                u,
            )
            rhs = _hop_pair_form(lat, tilde, kappa, spin, 1, tables)
            err = max(err, lhs.max_abs_diff(rhs))
        return {"kind": kind, "max_error": err, "passed": err <= IDENTITY_TOL}
    elif kind == "u1_hop_i":
        u = build_unitary(lat, "u_tilde_1")
        err = 0.0
        for i in range(2, lat.d + 1):
            for spin in (UP, DOWN):
                lhs = conjugate(
                    model.build_barred_hop_component(
                        lat, tilde, kappa, spin, axis=i, eta=ETA[spin]
                    ),
                    u,
                )
                rhs = _hop_pair_form(lat, tilde, kappa, spin, i, tables)
                err = max(err, lhs.max_abs_diff(rhs))
        return {"kind": kind, "max_error": err, "passed": err <= IDENTITY_TOL}
    else:
        raise UnknownLabel(f"unknown identity kind {kind!r}")
    err = lhs.max_abs_diff(rhs)
    return {"kind": kind, "max_error": err, "passed": err <= IDENTITY_TOL}


def identity_suite(
    lat: Lattice, params: ModelParams, tilde: GaugeField, kinds=IDENTITY_KINDS
) -> list[dict]:
    return [verify_identity(lat, params, tilde, kind) for kind in kinds]
