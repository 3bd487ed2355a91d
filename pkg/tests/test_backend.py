import numpy as np
import pytest

from quantspline import _backend, _pykernels
from quantspline.kernel import KernelSpec

ck = pytest.importorskip("quantspline._ckernels")


def test_backend_selected():
    assert _backend.BACKEND in ("cython", "python")


@pytest.mark.parametrize("m", [1, 2, 4])
def test_periodic_even_poly_agrees(m):
    d = np.random.default_rng(m).uniform(-3, 3, 1000)
    coeffs = KernelSpec(m).coeffs_K
    np.testing.assert_allclose(ck.periodic_even_poly(coeffs, d), _pykernels.periodic_even_poly(coeffs, d), rtol=1e-13, atol=1e-17)


def test_kernel_sum_agrees():
    rng = np.random.default_rng(7)
    theta = rng.standard_normal(200)
    x = rng.uniform(-1, 2, 777)
    coeffs = KernelSpec(2).coeffs_K
    np.testing.assert_allclose(ck.kernel_sum(theta, coeffs, x), _pykernels.kernel_sum(theta, coeffs, x), rtol=1e-11, atol=1e-15)


def test_python_fallback_forced(monkeypatch):
    import importlib

    monkeypatch.setenv("QUANTSPLINE_BACKEND", "python")
    mod = importlib.reload(_backend)
    try:
        assert mod.BACKEND == "python"
        assert mod.kernel_sum is _pykernels.kernel_sum
    finally:
        monkeypatch.delenv("QUANTSPLINE_BACKEND")
        importlib.reload(_backend)
