"""Exact spectra, log-domain partition functions, and expectations.

Hamiltonians conserve both spin populations, so diagonalization runs as
dense Hermitian eigensolves per (n_up, n_dn) sector. Sector results are
always reduced in fixed key order so repeated runs agree bit for bit, and
partition functions are accumulated in the log domain throughout. The
classical plaquette energy enters every eigenvalue as a scalar shift.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.linalg import eigh as scipy_eigh
from scipy.special import logsumexp

from .errors import DegenerateToleranceAmbiguity
from .fock import FockOperator, dense_sector, sector_entries, sector_tables
from .model import HamiltonianBundle

GROUND_TOL_FLOOR = 1e-9
GROUND_TOL_REL = 1e-9
HERMITICITY_TOL = 1e-13


def default_threads() -> int:
    """FLUXLAB_THREADS when set, else available parallelism."""
    env = os.environ.get("FLUXLAB_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SpectralData:
    """Per-sector eigenvalues (classical shift included) and ground data."""

    n_modes: int
    keys: list[tuple[int, int]]
    sector_eigs: dict[tuple[int, int], np.ndarray] = dc_field(repr=False)
    shift: float
    e0: float
    spectral_width: float
    ground_tol: float
    degeneracy: int
    degeneracy_stable: bool
    ground_sectors: list[tuple[int, int]]
    ground_vectors: np.ndarray | None = dc_field(default=None, repr=False)
    sector_vectors: dict | None = dc_field(default=None, repr=False)

    def all_eigenvalues(self) -> np.ndarray:
        return np.concatenate([self.sector_eigs[k] for k in self.keys])

    @property
    def ground_projector(self) -> np.ndarray | None:
        if self.ground_vectors is None:
            return None
        v = self.ground_vectors
        return v @ v.conj().T


@dataclass(frozen=True)
class ObservableValue:
    value: complex
    beta: float  # math.inf marks the uniform ground-space average
    gauge_tag: str = ""


def _as_operator(ham) -> tuple[FockOperator, float]:
    if isinstance(ham, HamiltonianBundle):
        return ham.fermionic, float(ham.classical_shift)
    return ham, 0.0


def diagonalize(
    ham: HamiltonianBundle | FockOperator,
    vectors: str = "none",
    threads: int | None = None,
    mirror_spin_sectors: bool = False,
) -> SpectralData:
    """Full spectrum via per-sector dense Hermitian eigensolves.

    vectors: 'none' (values only), 'ground' (re-solves ground sectors for
    eigenvectors), or 'all' (keeps every sector's eigenvectors; meant for
    small lattices). mirror_spin_sectors reuses the (a, b) eigenvalues for
    (b, a); valid only when both spins couple identically, as they do for
    every Hamiltonian built here, and only for values-only solves.
    """
    op, shift = _as_operator(ham)
    if not op.is_hermitian(HERMITICITY_TOL):
        raise ValueError("operator is not hermitian within tolerance")
    if mirror_spin_sectors and vectors != "none":
        raise ValueError("mirror_spin_sectors supports values-only solves")
    keys, indices, groups = sector_entries(op)
    n_threads = default_threads() if threads is None else max(1, threads)

    solve_keys = (
        [k for k in keys if k[0] <= k[1]] if mirror_spin_sectors else list(keys)
    )

    # densify one block per worker at a time; peak memory stays at
    # n_threads blocks instead of the whole operator
    def solve(key):
        return key, np.linalg.eigvalsh(dense_sector(indices, groups, key))

    if n_threads > 1 and len(solve_keys) > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            solved = dict(pool.map(solve, solve_keys))
    else:
        solved = dict(solve(k) for k in solve_keys)

    sector_eigs = {}
    for key in keys:  # fixed order reduction
        src = key if key in solved else (key[1], key[0])
        sector_eigs[key] = solved[src] + shift

    all_eigs = np.concatenate([sector_eigs[k] for k in keys])
    e0 = float(all_eigs.min())
    width = float(all_eigs.max() - all_eigs.min())
    tol = max(GROUND_TOL_FLOOR, GROUND_TOL_REL * width)
    degeneracy = int((all_eigs <= e0 + tol).sum())
    stable = degeneracy == int((all_eigs <= e0 + tol / 2).sum())
    ground_sectors = [
        k for k in keys if float(sector_eigs[k].min(initial=np.inf)) <= e0 + tol
    ]

    ground_vectors = None
    sector_vectors = None
    if vectors in ("ground", "all"):
        want = keys if vectors == "all" else ground_sectors
        sector_vectors = {}
        ground_cols = []
        for key in want:
            block = dense_sector(indices, groups, key)
            if vectors == "all" or block.shape[0] <= 512:
                vals, vecs = np.linalg.eigh(block)
            else:
                # ground pass on a large sector: solve only the eigenpairs
                # at or below the ground cut (half-open interval, hi incl.)
                vals, vecs = scipy_eigh(
                    block, subset_by_value=(-np.inf, e0 + tol - shift)
                )
            if vectors == "all":
                sector_vectors[key] = (vals + shift, vecs)
            if key in ground_sectors:
                sel = np.nonzero(vals + shift <= e0 + tol)[0]
                for col in sel:
                    full = np.zeros(op.dim, dtype=complex)
                    full[indices[key]] = vecs[:, col]
                    ground_cols.append(full)
        if ground_cols:
            ground_vectors = np.column_stack(ground_cols)
        if vectors == "ground":
            sector_vectors = None

    return SpectralData(
        n_modes=op.n_modes,
        keys=list(keys),
        sector_eigs=sector_eigs,
        shift=shift,
        e0=e0,
        spectral_width=width,
        ground_tol=tol,
        degeneracy=degeneracy,
        degeneracy_stable=stable,
        ground_sectors=ground_sectors,
        ground_vectors=ground_vectors,
        sector_vectors=sector_vectors,
    )


def partition_function(spec: SpectralData, beta: float) -> float:
    """log Z at inverse temperature beta, accumulated in the log domain."""
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    return float(logsumexp(-beta * spec.all_eigenvalues()))


def free_energy(spec: SpectralData, beta: float) -> float:
    return -partition_function(spec, beta) / beta


def ground_expectation(
    spec: SpectralData, obs: FockOperator, gauge_tag: str = ""
) -> ObservableValue:
    """Uniform average of ``obs`` over the ground space, Tr(P O)/Tr(P)."""
    if not spec.degeneracy_stable:
        raise DegenerateToleranceAmbiguity(
            f"ground degeneracy changes when tolerance {spec.ground_tol:.1e} is halved"
        )
    if spec.ground_vectors is None:
        raise ValueError("diagonalize with vectors='ground' first")
    v = spec.ground_vectors
    val = complex(np.einsum("ik,ik->", v.conj(), obs.matrix @ v) / v.shape[1])
    return ObservableValue(value=val, beta=math.inf, gauge_tag=gauge_tag)


def thermal_expectation(
    spec: SpectralData, obs: FockOperator, beta: float, gauge_tag: str = ""
) -> ObservableValue:
    """Gibbs average Tr(O e^{-beta H})/Z with log-domain weights."""
    if spec.sector_vectors is None:
        raise ValueError("diagonalize with vectors='all' first")
    log_z = partition_function(spec, beta)
    _, _, _, indices = sector_tables(spec.n_modes)
    total = 0.0 + 0.0j
    for key in spec.keys:
        vals, vecs = spec.sector_vectors[key]
        weights = np.exp(-beta * vals - log_z)
        full = np.zeros((1 << spec.n_modes, vecs.shape[1]), dtype=complex)
        full[indices[key]] = vecs
        overlaps = np.einsum("ik,ik->k", full.conj(), obs.matrix @ full)
        total += complex(weights @ overlaps)
    return ObservableValue(value=total, beta=beta, gauge_tag=gauge_tag)


def spectrum_rows(spec: SpectralData):
    """(sector_n_up, sector_n_dn, index, eigenvalue) rows in fixed order."""
    for key in spec.keys:
        for idx, val in enumerate(spec.sector_eigs[key]):
            yield key[0], key[1], idx, float(val)
