"""Fermionic Fock space over lattice modes, as sparse matrices.

Mode m = 2 * site_index + spin with spin 0 for up and 1 for down, so up
modes sit on even bits and down modes on odd bits. Basis state s occupies
mode m iff bit m of s is set; the creation matrix carries the sign
(-1)^(number of occupied modes below m). All operators are scipy CSR
matrices of dimension 2^n_modes wrapped with a little arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import NotBlockDiagonal

UP, DOWN = 0, 1

LEAK_TOL = 1e-12


def mode_id(site_index: int, spin: int) -> int:
    if spin not in (UP, DOWN):
        raise ValueError(f"spin must be {UP} (up) or {DOWN} (down), got {spin}")
    return 2 * site_index + spin


@dataclass(frozen=True)
class FockOperator:
    n_modes: int
    matrix: sp.csr_matrix = dc_field(repr=False)

    @property
    def dim(self) -> int:
        return 1 << self.n_modes

    def __add__(self, other: "FockOperator") -> "FockOperator":
        self._check(other)
        return FockOperator(self.n_modes, (self.matrix + other.matrix).tocsr())

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        self._check(other)
        return FockOperator(self.n_modes, (self.matrix - other.matrix).tocsr())

    def __mul__(self, scalar) -> "FockOperator":
        return FockOperator(self.n_modes, (self.matrix * scalar).tocsr())

    __rmul__ = __mul__

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        self._check(other)
        return FockOperator(self.n_modes, (self.matrix @ other.matrix).tocsr())

    def dagger(self) -> "FockOperator":
        return FockOperator(self.n_modes, self.matrix.conj().T.tocsr())

    def max_abs(self) -> float:
        return float(np.abs(self.matrix.data).max()) if self.matrix.nnz else 0.0

    def max_abs_diff(self, other: "FockOperator") -> float:
        self._check(other)
        diff = self.matrix - other.matrix
        return float(np.abs(diff.data).max()) if diff.nnz else 0.0

    def is_hermitian(self, rel_tol: float = 1e-13) -> bool:
        return self.max_abs_diff(self.dagger()) <= rel_tol * max(self.max_abs(), 1.0)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def _check(self, other: "FockOperator") -> None:
        if self.n_modes != other.n_modes:
            raise ValueError("operators act on different mode counts")


def identity(n_modes: int) -> FockOperator:
    return FockOperator(n_modes, sp.identity(1 << n_modes, dtype=complex, format="csr"))


def zero(n_modes: int) -> FockOperator:
    dim = 1 << n_modes
    return FockOperator(n_modes, sp.csr_matrix((dim, dim), dtype=complex))


def op_string(
    n_modes: int, ops: Sequence[tuple[int, bool]], coeff: complex = 1.0
) -> FockOperator:
    """coeff times a product of mode operators, written left to right.

    ``ops`` lists (mode, dagger) factors in written order; the rightmost
    factor acts first, matching operator composition.
    """
    return assemble(n_modes, [(coeff, ops)])


def assemble(
    n_modes: int, terms: Sequence[tuple[complex, Sequence[tuple[int, bool]]]]
) -> FockOperator:
    """Sum of coeff * operator-string terms as one CSR matrix."""
    dim = 1 << n_modes
    rows, cols, vals = [], [], []
    for coeff, ops in terms:
        if not ops:
            rows.append(np.arange(dim, dtype=np.int64))
            cols.append(np.arange(dim, dtype=np.int64))
            vals.append(np.full(dim, complex(coeff)))
            continue
        modes = np.asarray([m for m, _ in ops], dtype=np.int64)
        daggers = np.asarray([d for _, d in ops], dtype=np.uint8)
        if modes.min() < 0 or modes.max() >= n_modes:
            raise ValueError(f"mode out of range 0..{n_modes - 1}")
        src, dst, amp = kernels.op_string_action(dim, modes, daggers)
        rows.append(dst)
        cols.append(src)
        vals.append(amp.astype(complex) * complex(coeff))
    if not rows:
        return zero(n_modes)
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    ).tocsr()
    mat.sum_duplicates()
    mat.eliminate_zeros()
    return FockOperator(n_modes, mat)


def create(n_modes: int, mode: int) -> FockOperator:
    return op_string(n_modes, [(mode, True)])


def annihilate(n_modes: int, mode: int) -> FockOperator:
    return op_string(n_modes, [(mode, False)])


def number(n_modes: int, mode: int) -> FockOperator:
    return op_string(n_modes, [(mode, True), (mode, False)])


def total_number(n_modes: int, spin: int | None = None) -> FockOperator:
    modes = range(n_modes) if spin is None else range(spin, n_modes, 2)
    return assemble(n_modes, [(1.0, [(m, True), (m, False)]) for m in modes])


@lru_cache(maxsize=None)
def sector_tables(n_modes: int):
    """Particle-number bookkeeping for all 2^n_modes basis states.

    Returns (keys, key_of_state, rank, indices): the ordered (n_up, n_dn)
    sector keys, each state's flattened key, each state's index within its
    sector, and per-key ascending state arrays.
    """
    dim = 1 << n_modes
    n_up, n_dn = kernels.sector_counts(dim, n_modes)
    width = n_modes // 2 + 1
    key_of_state = n_up * width + n_dn
    order = np.argsort(key_of_state, kind="stable")
    rank = np.empty(dim, dtype=np.int64)
    sorted_keys = key_of_state[order]
    starts = np.searchsorted(sorted_keys, np.arange(width * width))
    ends = np.append(starts[1:], dim)
    keys, indices = [], {}
    for flat in range(width * width):
        lo, hi = starts[flat], ends[flat]
        if lo == hi:
            continue
        key = (flat // width, flat % width)
        states = np.sort(order[lo:hi])
        rank[states] = np.arange(hi - lo)
        keys.append(key)
        indices[key] = states
    return keys, key_of_state, rank, indices


@dataclass(frozen=True)
class SectorBlocks:
    """Dense blocks of a number-conserving operator, one per (n_up, n_dn)."""

    n_modes: int
    keys: list[tuple[int, int]]
    indices: dict[tuple[int, int], np.ndarray]
    blocks: dict[tuple[int, int], np.ndarray]


def sector_entries(op: FockOperator, leak_tol: float = LEAK_TOL):
    """Group the operator's entries by (n_up, n_dn) sector.

    Returns (keys, indices, groups) where groups maps a sector key to its
    within-sector (row_rank, col_rank, value) triplets; absent keys hold no
    entries. An entry connecting different keys is exactly the commutator
    defect with the number operators, so the leakage scan is the
    block-diagonality check. Consumers can then densify one sector at a
    time, which keeps peak memory at a single block.
    """
    keys, key_of_state, rank, indices = sector_tables(op.n_modes)
    coo = op.matrix.tocoo()
    r, c, v = coo.row.astype(np.int64), coo.col.astype(np.int64), coo.data
    cross = key_of_state[r] != key_of_state[c]
    if cross.any():
        leak = float(np.abs(v[cross]).max())
        if leak > leak_tol:
            raise NotBlockDiagonal(
                f"operator leaks {leak:.3e} between number sectors (tol {leak_tol:.1e})"
            )
        r, c, v = r[~cross], c[~cross], v[~cross]
    flat_key = key_of_state[r]
    order = np.argsort(flat_key, kind="stable")
    r, c, v, flat_key = r[order], c[order], v[order], flat_key[order]
    present = np.unique(flat_key)
    bounds = np.searchsorted(flat_key, present)
    bounds = np.append(bounds, len(flat_key))
    width = op.n_modes // 2 + 1
    groups = {}
    for pos, flat in enumerate(present):
        key = (int(flat) // width, int(flat) % width)
        lo, hi = bounds[pos], bounds[pos + 1]
        groups[key] = (rank[r[lo:hi]], rank[c[lo:hi]], v[lo:hi])
    return keys, indices, groups


def dense_sector(indices, groups, key) -> np.ndarray:
    """One sector's dense block from sector_entries output.

    Direct assignment is safe because canonical CSR storage holds each
    (row, col) once.
    """
    ns = len(indices[key])
    block = np.zeros((ns, ns), dtype=complex)
    if key in groups:
        lr, lc, v = groups[key]
        block[lr, lc] = v
    return block


def sector_split(op: FockOperator, leak_tol: float = LEAK_TOL) -> SectorBlocks:
    """Split into dense per-sector blocks, all materialized at once."""
    keys, indices, groups = sector_entries(op, leak_tol)
    blocks = {key: dense_sector(indices, groups, key) for key in keys}
    return SectorBlocks(op.n_modes, list(keys), dict(indices), blocks)
