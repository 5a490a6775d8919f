import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def sup_rel_err(got, ref):
    """Max absolute deviation scaled by the reference sup-norm."""
    got = np.asarray(got)
    ref = np.asarray(ref)
    scale = max(float(np.abs(ref).max()), 1e-30)
    return float(np.abs(got - ref).max()) / scale


def random_complex(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)
