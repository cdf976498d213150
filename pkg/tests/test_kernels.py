import os
import subprocess
import sys

import numpy as np
import pytest

from dtckit import _pycore, kernels

backends = kernels.available_backends()
needs_core = pytest.mark.skipif("cython" not in backends, reason="compiled core not built")


def random_state(d, n, rng):
    v = rng.normal(size=d**n) + 1j * rng.normal(size=d**n)
    return v / np.linalg.norm(v)


@needs_core
@pytest.mark.parametrize("d,n", [(2, 1), (2, 5), (3, 1), (3, 4)])
def test_apply_local_agree(d, n):
    rng = np.random.default_rng(n)
    psi = random_state(d, n, rng)
    mats = rng.normal(size=(n, d, d)) + 1j * rng.normal(size=(n, d, d))
    a = _pycore.apply_local(psi, mats)
    b = backends["cython"].apply_local(psi, mats)
    assert np.allclose(a, b, atol=1e-12)


def test_apply_local_against_kron():
    rng = np.random.default_rng(0)
    psi = random_state(2, 3, rng)
    mats = rng.normal(size=(3, 2, 2)) + 0j
    full = np.kron(np.kron(mats[0], mats[1]), mats[2])
    for mod in backends.values():
        assert np.allclose(mod.apply_local(psi, mats), full @ psi, atol=1e-12)


@needs_core
def test_x_expectations_agree():
    psi = random_state(2, 6, np.random.default_rng(2))
    assert np.allclose(_pycore.x_expectations(psi, 6), backends["cython"].x_expectations(psi, 6))


@needs_core
def test_hamiltonians_agree():
    rng = np.random.default_rng(4)
    n = 4
    C = rng.normal(size=(n, n))
    C = C + C.T
    np.fill_diagonal(C, 0)
    h = [rng.normal(size=n) for _ in range(3)]
    a = _pycore.spin_half_hamiltonian(n, C, *h, -0.5, -0.5, 1.0)
    b = backends["cython"].spin_half_hamiltonian(n, C, *h, -0.5, -0.5, 1.0)
    assert np.allclose(a, b, atol=1e-12) and np.allclose(a, a.conj().T)
    d = [rng.normal(size=n) for _ in range(2)]
    a = _pycore.spin_one_hamiltonian(n, C, *d)
    b = backends["cython"].spin_one_hamiltonian(n, C, *d)
    assert np.allclose(a, b, atol=1e-12) and np.allclose(a, a.conj().T)


@needs_core
def test_meanfield_kernels_agree():
    rng = np.random.default_rng(6)
    theta = rng.uniform(2.5, 3.8, 300)
    kappa = rng.uniform(-2, 2, 300)
    core = backends["cython"]
    assert np.allclose(_pycore.order_sq(theta, kappa), core.order_sq(theta, kappa), atol=1e-14)
    g = np.array([1.0, 0.5, -0.5])
    for x, y in zip(_pycore.fixed_point_batch(theta, kappa, g, 0.5, 1e-12, 5000),
                    core.fixed_point_batch(theta, kappa, g, 0.5, 1e-12, 5000)):
        assert np.allclose(x, y, atol=1e-10)
    a = _pycore.population_fixed_point(theta, kappa, 1.0, 0.5, 1e-6, 2000)
    b = core.population_fixed_point(theta, kappa, 1.0, 0.5, 1e-6, 2000)
    assert a[0] == pytest.approx(b[0], abs=1e-12) and a[1:] == b[1:]
    assert _pycore.mean_order_sq(theta, kappa, 0.7) == pytest.approx(
        core.mean_order_sq(theta, kappa, 0.7), rel=1e-12)


def test_order_sq_regular_at_pi():
    assert _pycore.order_sq(np.array([np.pi]), np.array([0.0]))[0] == 0.0
    assert _pycore.order_sq(np.array([np.pi]), np.array([0.3]))[0] == pytest.approx(1.0)


def test_forced_python_backend():
    env = dict(os.environ, DTCKIT_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", "import dtckit; print(dtckit.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
