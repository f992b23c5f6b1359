"""Periodic hypercubic lattice with directed bonds and oriented plaquettes.

Sites live on {-L+1, ..., L}^d with periodic wrap L+1 == -L+1, so each axis
has 2L sites. Site order is lexicographic on the coordinates mapped to
{0, ..., 2L-1} via x -> x+L-1, first coordinate most significant. Axis
arguments in the public API are 1-based (i in {1, ..., d}); internal arrays
use 0-based columns.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionTooSmall, SizeExceedsCap

DEFAULT_MODE_CAP = 20


@dataclass(frozen=True)
class Bond:
    """Directed bond from ``base`` one step along 1-based axis ``axis``."""

    base: tuple[int, ...]
    axis: int


@dataclass(frozen=True)
class Plaquette:
    """Oriented unit square at ``base`` spanning axes ``axis_a < axis_b``."""

    base: tuple[int, ...]
    axis_a: int
    axis_b: int


@dataclass(frozen=True, eq=False)
class Lattice:
    d: int
    L: int
    coords: np.ndarray = field(repr=False)  # (n_sites, d) int64
    neighbor_plus: np.ndarray = field(repr=False)  # (n_sites, d) site index of x+e_i
    neighbor_minus: np.ndarray = field(repr=False)  # (n_sites, d) site index of x-e_i
    parity: np.ndarray = field(repr=False)  # (n_sites,) coordinate-sum parity

    @property
    def n_sites(self) -> int:
        return self.coords.shape[0]

    @property
    def n_modes(self) -> int:
        return 2 * self.n_sites

    @property
    def n_bonds(self) -> int:
        return self.d * self.n_sites

    @property
    def n_plaquettes(self) -> int:
        return self.n_sites * self.d * (self.d - 1) // 2

    @property
    def below_paper_dimension(self) -> bool:
        """True for d = 2, admitted for cheap checks below the physical case."""
        return self.d == 2

    def site_index(self, x) -> int:
        """Index of the site with coordinates ``x``, wrapping periodically."""
        side = 2 * self.L
        idx = 0
        for k in range(self.d):
            idx = idx * side + (int(x[k]) + self.L - 1) % side
        return idx

    def site(self, index: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.coords[index])

    def bonds(self):
        """All directed bonds (x, i), site-major, axes ascending."""
        for s in range(self.n_sites):
            base = self.site(s)
            for i in range(1, self.d + 1):
                yield Bond(base, i)

    def plaquettes(self) -> list[Plaquette]:
        out = []
        for s in range(self.n_sites):
            base = self.site(s)
            for i, j in itertools.combinations(range(1, self.d + 1), 2):
                out.append(Plaquette(base, i, j))
        return out


def build_lattice(d: int, L: int, mode_cap: int = DEFAULT_MODE_CAP) -> Lattice:
    """Construct the lattice, refusing sizes whose Fock space is infeasible.

    The cap applies to the fermionic mode count 2*(2L)^d; the default of 20
    admits d=2 and d=3 at L=1 and nothing larger.
    """
    if d < 2:
        raise DimensionTooSmall(f"need d >= 2, got d={d}")
    if L < 1:
        raise ValueError(f"need L >= 1, got L={L}")
    n_sites = (2 * L) ** d
    n_modes = 2 * n_sites
    if n_modes > mode_cap:
        raise SizeExceedsCap(
            f"d={d}, L={L} needs {n_modes} modes, cap is {mode_cap}"
        )

    side = 2 * L
    coords = np.array(
        list(itertools.product(range(-L + 1, L + 1), repeat=d)), dtype=np.int64
    )
    mapped = coords + (L - 1)  # {0, ..., side-1}
    weights = side ** np.arange(d - 1, -1, -1, dtype=np.int64)

    neighbor_plus = np.empty((n_sites, d), dtype=np.int64)
    neighbor_minus = np.empty((n_sites, d), dtype=np.int64)
    for k in range(d):
        for step, table in ((1, neighbor_plus), (-1, neighbor_minus)):
            shifted = mapped.copy()
            shifted[:, k] = (shifted[:, k] + step) % side
            table[:, k] = shifted @ weights

    parity = (coords.sum(axis=1) % 2).astype(np.int64)
    for arr in (coords, neighbor_plus, neighbor_minus, parity):
        arr.setflags(write=False)
    return Lattice(d, L, coords, neighbor_plus, neighbor_minus, parity)


def site_parity(lat: Lattice, x) -> int:
    """0 for even coordinate sum, 1 for odd (the odd sublattice)."""
    return int(lat.parity[lat.site_index(x)])


def neighbor(lat: Lattice, x, i: int) -> tuple[int, ...]:
    """Coordinates of x + e_i with periodic wrap, i 1-based."""
    if not 1 <= i <= lat.d:
        raise ValueError(f"axis must be in 1..{lat.d}, got {i}")
    return lat.site(lat.neighbor_plus[lat.site_index(x), i - 1])
