import numpy as np
import pytest

from fluxlab.lattice import build_lattice
from fluxlab.model import ModelParams


@pytest.fixture(scope="session")
def lat2():
    return build_lattice(2, 1)


@pytest.fixture(scope="session")
def lat3():
    return build_lattice(3, 1)


@pytest.fixture
def params():
    return ModelParams(kappa=1.0, g=1.0, K=1.0, beta=2.0)


def assert_close(a, b, tol, msg=""):
    err = np.max(np.abs(np.asarray(a) - np.asarray(b)))
    assert err <= tol, f"{msg} error {err:.3e} > {tol:.1e}"
