import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from plasmonsr import EmitterParams, moment_matrix
from plasmonsr import _kernels_py

try:
    from plasmonsr import _kernels as _kernels_c
except ImportError:
    _kernels_c = None

KERNELS = [pytest.param(_kernels_py, id="python")]
if _kernels_c is not None:
    KERNELS.append(pytest.param(_kernels_c, id="cython"))

needs_c = pytest.mark.skipif(_kernels_c is None, reason="compiled kernel not built")


def exact_affine(M, c, y0, ts):
    """y(t) = e^{Mt}(y0 - y*) + y* with y* the fixed point."""
    ystar = np.linalg.solve(M, -c)
    return np.array([scipy.linalg.expm(M * t) @ (y0 - ystar) + ystar for t in ts])


@pytest.mark.parametrize("k", KERNELS)
def test_against_matrix_exponential(k):
    p = EmitterParams.dimensionless(4.0, 0.25, 1.0)
    M, c = moment_matrix(p, 0.6, 1.4)
    y0 = np.array([0.3, 0.1, -0.2, 0.4])
    ts = np.linspace(0.0, 5.0, 11)
    ys, status, n_acc, n_rej = k.integrate_affine(M, c, y0, ts, 1e-10, 1e-13)
    assert status == k.STATUS_OK
    assert n_acc > 0
    assert np.max(np.abs(ys - exact_affine(M, c, y0, ts))) < 1e-8


@pytest.mark.parametrize("k", KERNELS)
def test_tolerance_controls_error(k):
    M = np.array([[-1.0, 2.0], [-2.0, -1.0]])
    c = np.array([0.5, 0.0])
    y0 = np.array([1.0, 0.0])
    ts = np.array([0.0, 4.0])
    exact = exact_affine(M, c, y0, ts)[-1]
    errs = []
    for rtol in (1e-4, 1e-7, 1e-10):
        ys, *_ = k.integrate_affine(M, c, y0, ts, rtol, rtol * 1e-3)
        errs.append(np.max(np.abs(ys[-1] - exact)))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-8


@pytest.mark.parametrize("k", KERNELS)
def test_status_codes(k):
    M = np.array([[-1.0]])
    _, status, _, _ = k.integrate_affine(M, np.zeros(1), np.ones(1), np.array([0.0, 1e3]),
                                         1e-12, 1e-14, 5)
    assert status == k.STATUS_MAX_STEPS
    # explicit stability limit forces steps far below the underflow threshold
    M = np.array([[-1e20]])
    _, status, _, _ = k.integrate_affine(M, np.zeros(1), np.ones(1), np.array([0.0, 1.0]),
                                         1e-9, 1e-12)
    assert status == k.STATUS_UNDERFLOW


@pytest.mark.parametrize("k", KERNELS)
def test_single_sample(k):
    ys, status, n_acc, n_rej = k.integrate_affine(np.eye(2), np.zeros(2), np.ones(2),
                                                  np.array([0.0]), 1e-9, 1e-12)
    assert status == k.STATUS_OK and (n_acc, n_rej) == (0, 0)
    assert np.array_equal(ys, [[1.0, 1.0]])


@needs_c
@given(st.floats(0.01, 1e3), st.floats(0.02, 1.0), st.floats(0.0, 10.0),
       st.floats(0.0, 0.99), st.floats(0.0, 0.99), st.floats(0.1, 50.0))
def test_compiled_matches_fallback_bitwise(pump, tb, deph, x1, x2, horizon):
    p = EmitterParams.dimensionless(pump, tb, deph)
    M, c = moment_matrix(p, x1 / tb, x2 / tb)
    y0 = np.array([0.1, 0.05, 0.2, -0.3])
    ts = np.linspace(0.0, horizon, 7)
    a = _kernels_py.integrate_affine(M, c, y0, ts, 1e-9, 1e-12)
    b = _kernels_c.integrate_affine(M, c, y0, ts, 1e-9, 1e-12)
    assert np.array_equal(a[0], b[0])
    assert a[1:] == b[1:]


@needs_c
def test_compiled_dimension_guard():
    n = 9
    with pytest.raises(ValueError):
        _kernels_c.integrate_affine(np.eye(n), np.zeros(n), np.zeros(n), np.array([0.0, 1.0]),
                                    1e-9, 1e-12)


def test_fallback_selected_by_environment():
    import os
    import subprocess
    import sys
    env = dict(os.environ, PLASMONSR_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import plasmonsr; print(plasmonsr.KERNEL)"],
                         env=env, capture_output=True, text=True, check=True).stdout
    assert out.strip() == "python"
