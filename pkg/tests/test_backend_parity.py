"""Compiled kernels against the NumPy fallback.

Polynomial kernels and the tridiagonal matvec follow the same operation
order in both implementations and must agree bit for bit; transcendental
kernels may differ by a few ulp.
"""
import numpy as np
import pytest

from ssopt import _kernels_np as K_np

K_c = pytest.importorskip("ssopt._kernels",
                          reason="compiled kernels not built on this platform")

N_CASES = (2, 3, 17, 1024)


def _rand(n, seed):
    return np.random.default_rng(seed).uniform(-3.0, 3.0, n)


@pytest.mark.parametrize("n", N_CASES)
@pytest.mark.parametrize("name", ["grad_banded_cubic"])
def test_banded_cubic_bitwise(n, name):
    x = _rand(n, n)
    a = np.empty(n)
    b = np.empty(n)
    getattr(K_np, name)(x, a, np.empty(n))
    getattr(K_c, name)(x, b, np.empty(n))
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("n", N_CASES)
@pytest.mark.parametrize("name", ["grad_chained_rosenbrock", "grad_cubic_rosenbrock"])
def test_polynomial_gradients_bitwise(n, name):
    x = _rand(n, n + 1)
    a = np.empty(n)
    b = np.empty(n)
    getattr(K_np, name)(x, a)
    getattr(K_c, name)(x, b)
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("n", N_CASES)
def test_tridiag_matvec_bitwise(n):
    rng = np.random.default_rng(n + 7)
    sub, sup = rng.standard_normal(n - 1), rng.standard_normal(n - 1)
    diag, x = rng.standard_normal(n), rng.standard_normal(n)
    a = np.empty(n)
    b = np.empty(n)
    K_np.tridiag_matvec(sub, diag, sup, x, a)
    K_c.tridiag_matvec(sub, diag, sup, x, b)
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("n", (2, 16, 1024))  # even: the pair kernel needs it
@pytest.mark.parametrize("name", ["grad_expm1", "grad_weighted_expm1", "grad_pair_trig"])
def test_transcendental_gradients_close(n, name):
    x = _rand(n, n + 13)
    a = np.empty(n)
    b = np.empty(n)
    getattr(K_np, name)(x, a)
    getattr(K_c, name)(x, b)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("name", ["obj_exp_linear", "obj_weighted_exp_linear",
                                  "obj_banded_cubic", "obj_chained_rosenbrock",
                                  "obj_cubic_rosenbrock", "obj_pair_trig"])
def test_objectives_close(name):
    x = _rand(256, 5)
    a = getattr(K_np, name)(x)
    b = getattr(K_c, name)(x)
    assert a == pytest.approx(b, rel=1e-12)


def test_quadratic_solves_identical_across_backends(monkeypatch):
    # quadratic problems use only order-matched arithmetic, so whole runs
    # must agree bit for bit between the backends
    import subprocess
    import sys

    code = (
        "from ssopt import make_example, SolverConfig, solve\n"
        "p = make_example('ex9', 80, seed=9)\n"
        "r = solve(p, SolverConfig(method='ss3', max_iter=40))\n"
        "print(repr(r.trace.gnorm))\n"
    )
    outs = {}
    for backend in ("numpy", "compiled"):
        proc = subprocess.run([sys.executable, "-c", code],
                              capture_output=True, text=True,
                              env={"SSOPT_BACKEND": backend, "PATH": "/usr/bin:/bin"})
        assert proc.returncode == 0, proc.stderr
        outs[backend] = proc.stdout
    assert outs["numpy"] == outs["compiled"]


def test_backend_env_rejects_unknown(monkeypatch):
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-c", "import ssopt"],
                          capture_output=True, text=True,
                          env={"SSOPT_BACKEND": "fortran", "PATH": "/usr/bin:/bin"})
    assert proc.returncode != 0
    assert "SSOPT_BACKEND" in proc.stderr
