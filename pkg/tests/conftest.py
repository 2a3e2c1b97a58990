import numpy as np
import pytest

from pdakit import _accel


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    """Run a test under both kernel backends, restoring the default after."""
    previous = _accel.get_backend()
    if request.param == "numba" and not _accel._numba_importable():
        pytest.skip("numba not importable")
    _accel.set_backend(request.param)
    yield request.param
    _accel.set_backend(previous)
