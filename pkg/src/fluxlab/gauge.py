"""Classical U(1) gauge fields on the directed bonds of the lattice.

A field stores one angle in (-pi, pi] per directed bond (x, i); reading the
reversed bond gives the negated angle. The change of variables that turns
the ferromagnetic plaquette convention into the standard one shifts every
bond angle by pi/2 plus pi times a site-and-axis dependent bit theta_i(x),
which shifts every plaquette flux by exactly pi.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from functools import cache
from typing import Sequence

import numpy as np

from . import rng
from .errors import InvalidPath
from .lattice import Lattice, Plaquette

TWO_PI = 2.0 * math.pi


def normalize_angle(a):
    """Map angles to (-pi, pi]. Values already inside pass through unchanged,
    so normalization is exactly idempotent (needed for byte-exact round trips)."""
    a = np.asarray(a, dtype=np.float64)
    inside = (a > -math.pi) & (a <= math.pi)
    r = np.remainder(a, TWO_PI)
    r = r - TWO_PI * (r > math.pi)
    out = np.where(inside, a, r)
    return float(out) if out.ndim == 0 else out


@cache
def theta_table(lat: Lattice) -> np.ndarray:
    """(n_sites, d) array of theta_i(x) in {0, 1}.

    theta_i(x) is the parity of x^(1) + ... + x^(i-1), flipped when
    x^(i) = L; for i = 1 the sum is empty, leaving only the boundary flip.
    """
    coords = lat.coords
    table = np.zeros((lat.n_sites, lat.d), dtype=np.int64)
    running = np.zeros(lat.n_sites, dtype=np.int64)
    for k in range(lat.d):
        table[:, k] = (running + (coords[:, k] == lat.L)) % 2
        running = running + coords[:, k]
    table.setflags(write=False)
    return table


def theta(lat: Lattice, i: int, x) -> int:
    """theta_i(x) for 1-based axis i."""
    if not 1 <= i <= lat.d:
        raise ValueError(f"axis must be in 1..{lat.d}, got {i}")
    return int(theta_table(lat)[lat.site_index(x), i - 1])


@dataclass(frozen=True, eq=False)
class GaugeField:
    """Angles on directed bonds; ``values[s, k]`` is the bond (site s, axis k+1)."""

    lattice: Lattice
    values: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        expected = (self.lattice.n_sites, self.lattice.d)
        if vals.shape != expected:
            raise ValueError(f"values must have shape {expected}, got {vals.shape}")
        vals = np.asarray(normalize_angle(vals))
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def angle(self, x, y) -> float:
        """Angle on the bond from site x to nearest neighbor y (either
        orientation; on wrap-doubled pairs the forward bond from x wins)."""
        lat = self.lattice
        xi, yi = lat.site_index(x), lat.site_index(y)
        return _step_angle(self, xi, yi)


@dataclass(frozen=True, eq=False)
class SitePhases:
    """One angle per site, the generator of a pure-gauge field."""

    lattice: Lattice
    phi: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.phi, dtype=np.float64)
        if p.shape != (self.lattice.n_sites,):
            raise ValueError(
                f"phi must have shape ({self.lattice.n_sites},), got {p.shape}"
            )
        p.setflags(write=False)
        object.__setattr__(self, "phi", p)


def zero_field(lat: Lattice) -> GaugeField:
    return GaugeField(lat, np.zeros((lat.n_sites, lat.d)))


def pi_flux_field(lat: Lattice) -> GaugeField:
    """The background the all-zeros perturbation composes to; every plaquette
    carries flux pi."""
    return compose(lat, zero_field(lat))


def compose(lat: Lattice, tilde: GaugeField) -> GaugeField:
    """A_{x,x+e_i} = normalize(pi/2 + pi*theta_i(x) + tilde_A_{x,x+e_i})."""
    vals = math.pi / 2 + math.pi * theta_table(lat) + tilde.values
    return GaugeField(lat, normalize_angle(vals))


def decompose(lat: Lattice, a: GaugeField) -> GaugeField:
    """Inverse of ``compose``; exact round trip up to angle normalization."""
    vals = a.values - math.pi / 2 - math.pi * theta_table(lat)
    return GaugeField(lat, normalize_angle(vals))


def add(a: GaugeField, b: GaugeField) -> GaugeField:
    """Bondwise sum, normalized; used for perturbation + pure-gauge shifts."""
    if a.lattice is not b.lattice:
        raise ValueError("fields live on different lattices")
    return GaugeField(a.lattice, normalize_angle(a.values + b.values))


def pure_gauge(lat: Lattice, phases: SitePhases) -> GaugeField:
    """Field with A_{x,y} = phi_x - phi_y on every directed bond."""
    phi = phases.phi
    vals = phi[:, None] - phi[lat.neighbor_plus]
    return GaugeField(lat, normalize_angle(vals))


def random_field(lat: Lattice, seed: int, *stream: int) -> GaugeField:
    """Independent uniform angles on (-pi, pi] from the named Philox stream."""
    g = rng.generator(seed, *stream)
    vals = math.pi - TWO_PI * g.random((lat.n_sites, lat.d))
    return GaugeField(lat, vals)


def random_phases(lat: Lattice, seed: int, *stream: int) -> SitePhases:
    g = rng.generator(seed, *stream)
    return SitePhases(lat, math.pi - TWO_PI * g.random(lat.n_sites))


@cache
def _plaquette_arrays(lat: Lattice):
    """Index arrays (x, x+e_i, x+e_j, col_i, col_j) over lat.plaquettes() order."""
    xs, xis, xjs, cis, cjs = [], [], [], [], []
    for p in lat.plaquettes():
        s = lat.site_index(p.base)
        ci, cj = p.axis_a - 1, p.axis_b - 1
        xs.append(s)
        xis.append(lat.neighbor_plus[s, ci])
        xjs.append(lat.neighbor_plus[s, cj])
        cis.append(ci)
        cjs.append(cj)
    return tuple(np.asarray(v, dtype=np.int64) for v in (xs, xis, xjs, cis, cjs))


def flux_all(field: GaugeField) -> np.ndarray:
    """Normalized flux through every plaquette, in lattice plaquette order."""
    lat = field.lattice
    xs, xis, xjs, cis, cjs = _plaquette_arrays(lat)
    v = field.values
    raw = v[xs, cis] + v[xis, cjs] - v[xjs, cis] - v[xs, cjs]
    return np.asarray(normalize_angle(raw))


def flux(field: GaugeField, p: Plaquette) -> float:
    """Flux through one plaquette, the oriented boundary sum, normalized."""
    lat = field.lattice
    s = lat.site_index(p.base)
    ci, cj = p.axis_a - 1, p.axis_b - 1
    xi = lat.neighbor_plus[s, ci]
    xj = lat.neighbor_plus[s, cj]
    v = field.values
    return float(normalize_angle(v[s, ci] + v[xi, cj] - v[xj, ci] - v[s, cj]))


def _step_angle(field: GaugeField, xi: int, yi: int) -> float:
    lat = field.lattice
    for k in range(lat.d):
        if lat.neighbor_plus[xi, k] == yi:
            return float(field.values[xi, k])
    for k in range(lat.d):
        if lat.neighbor_plus[yi, k] == xi:
            return -float(field.values[yi, k])
    raise InvalidPath(f"sites {lat.site(xi)} and {lat.site(yi)} are not neighbors")


def string_phase(field: GaugeField, path: Sequence) -> float:
    """Sum of bond angles along a site path (not normalized; it only ever
    enters through exp(2i * phase), which is insensitive to 2 pi shifts).
    A single-site path has no edges and phase 0."""
    lat = field.lattice
    if len(path) < 1:
        raise InvalidPath("path needs at least one site")
    idx = [lat.site_index(x) for x in path]
    return float(sum(_step_angle(field, a, b) for a, b in zip(idx[:-1], idx[1:])))


def to_json(field: GaugeField) -> str:
    """Serialize as {d, L, entries: [{x, i, angle}]}; exact float round trip."""
    lat = field.lattice
    entries = []
    for s in range(lat.n_sites):
        x = list(lat.site(s))
        for k in range(lat.d):
            entries.append({"x": x, "i": k + 1, "angle": float(field.values[s, k])})
    return json.dumps({"d": lat.d, "L": lat.L, "entries": entries})


def from_json(text: str, lat: Lattice | None = None) -> GaugeField:
    from .lattice import build_lattice

    payload = json.loads(text)
    d, L = int(payload["d"]), int(payload["L"])
    if lat is None:
        lat = build_lattice(d, L)
    elif (lat.d, lat.L) != (d, L):
        raise ValueError(f"payload is for d={d}, L={L}, not the given lattice")
    vals = np.full((lat.n_sites, lat.d), np.nan)
    for e in payload["entries"]:
        vals[lat.site_index(e["x"]), int(e["i"]) - 1] = float(e["angle"])
    if np.isnan(vals).any():
        raise ValueError("payload does not cover every directed bond")
    return GaugeField(lat, vals)
