"""Torus geometry: site/bond/plaquette counts, parity, wrapping."""

import pytest

from fluxlab.errors import DimensionTooSmall, SizeExceedsCap
from fluxlab.lattice import build_lattice, neighbor, site_parity


def test_counts_d2():
    lat = build_lattice(2, 1)
    assert lat.n_sites == 4
    assert lat.n_modes == 8
    assert lat.n_bonds == 8
    assert lat.n_plaquettes == 4


def test_counts_d3():
    lat = build_lattice(3, 1)
    assert lat.n_sites == 8
    assert lat.n_modes == 16
    assert lat.n_bonds == 24
    assert lat.n_plaquettes == 24


def test_counts_scale_with_l():
    # side 2L: |sites| = (2L)^d, bonds = d |sites|, plaquettes = C(d,2) |sites|
    lat = build_lattice(2, 2, mode_cap=64)
    assert lat.n_sites == 16
    assert lat.n_bonds == 32
    assert lat.n_plaquettes == 16


def test_site_index_round_trip():
    for d, L in ((2, 1), (3, 1)):
        lat = build_lattice(d, L)
        for idx in range(lat.n_sites):
            assert lat.site_index(lat.site(idx)) == idx


def test_site_parity_examples():
    lat = build_lattice(2, 1)
    assert site_parity(lat, (0, 0)) == 0
    assert site_parity(lat, (1, 0)) == 1
    assert site_parity(lat, (1, 1)) == 0
    lat3 = build_lattice(3, 1)
    assert site_parity(lat3, (1, 1, 1)) == 1


def test_neighbor_wraps():
    lat = build_lattice(2, 1)
    assert neighbor(lat, (0, 0), 1) == (1, 0)
    assert neighbor(lat, (1, 0), 1) == (0, 0)  # L+1 identified with -L+1
    assert neighbor(lat, (0, 1), 2) == (0, 0)
    lat3 = build_lattice(3, 1)
    assert neighbor(lat3, (0, 1, 0), 2) == (0, 0, 0)
    # sites live on {-L+1, ..., L}; check the wrap at the lower edge too
    lat22 = build_lattice(2, 2, mode_cap=64)
    assert neighbor(lat22, (2, 0), 1) == (-1, 0)


def test_periodicity_after_full_loop():
    for d, L, cap in ((2, 1, 20), (2, 2, 64), (3, 1, 20)):
        lat = build_lattice(d, L, mode_cap=cap)
        for start_idx in range(lat.n_sites):
            for i in range(1, d + 1):
                x = lat.site(start_idx)
                for _ in range(2 * L):
                    x = neighbor(lat, x, i)
                assert x == lat.site(start_idx)


def test_plaquette_corners_close():
    # x + e_a + e_b reached along either edge order is the same site
    for d, L, cap in ((2, 1, 20), (3, 1, 20), (2, 2, 64)):
        lat = build_lattice(d, L, mode_cap=cap)
        for p in lat.plaquettes():
            assert p.axis_a < p.axis_b
            via_a = neighbor(lat, neighbor(lat, p.base, p.axis_a), p.axis_b)
            via_b = neighbor(lat, neighbor(lat, p.base, p.axis_b), p.axis_a)
            assert via_a == via_b


def test_bond_family_is_directed_and_complete():
    lat = build_lattice(2, 1)
    seen = {(lat.site_index(b.base), b.axis) for b in lat.bonds()}
    assert len(seen) == lat.n_bonds


def test_dimension_too_small():
    with pytest.raises(DimensionTooSmall):
        build_lattice(1, 1)


def test_size_cap():
    with pytest.raises(SizeExceedsCap):
        build_lattice(2, 2)  # 32 modes > default cap
    with pytest.raises(SizeExceedsCap):
        build_lattice(4, 1)
    # the two admitted sizes
    build_lattice(2, 1)
    build_lattice(3, 1)


def test_below_paper_dimension_flag():
    assert build_lattice(2, 1).below_paper_dimension
    assert not build_lattice(3, 1).below_paper_dimension


def test_axis_out_of_range():
    lat = build_lattice(2, 1)
    with pytest.raises(ValueError):
        neighbor(lat, (0, 0), 3)
    with pytest.raises(ValueError):
        neighbor(lat, (0, 0), 0)
