"""Recompute the frozen three-dimensional regression values.

Prints the zero-field ground energy and the on-axis/diagonal pair
quadrature correlations whose repr values are pinned in
tests/test_spectral.py::test_d3_pair_correlator_baseline. Takes a few
minutes; run after any change that is expected to move these numbers,
and update the test only with output from a verified run.
"""

import time

from fluxlab import gauge, model, spectral
from fluxlab.lattice import build_lattice
from fluxlab.model import ModelParams

t0 = time.monotonic()
lat = build_lattice(3, 1)
params = ModelParams(kappa=1.0, g=1.0, K=1.0, beta=2.0)
h = model.build_fermionic(lat, params, gauge.zero_field(lat))
spec = spectral.diagonalize(h, vectors="ground")
print("e0", repr(spec.e0), "deg", spec.degeneracy, "stable", spec.degeneracy_stable)
print("ground sectors", spec.ground_sectors)
for y in ((1, 0, 0), (1, 1, 0), (1, 1, 1)):
    g1x, _ = model.gamma_ops(lat, (0, 0, 0))
    g1y, _ = model.gamma_ops(lat, y)
    val = spectral.ground_expectation(spec, g1x @ g1y)
    print("gamma11", y, repr(val.value))
print("elapsed", time.monotonic() - t0)
