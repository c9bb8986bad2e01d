import numpy as np
import pytest

from gradelast.constitutive import FieldJet


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_jet(rng, d):
    """Random displacement jet with a symmetric Hessian."""
    grad = rng.standard_normal((d, d))
    hess = rng.standard_normal((d, d, d))
    hess = 0.5 * (hess + np.swapaxes(hess, 0, 1))
    return FieldJet(u=rng.standard_normal(d), grad=grad, hess=hess)


@pytest.fixture
def make_jet(rng):
    def _make(d):
        return random_jet(rng, d)
    return _make
