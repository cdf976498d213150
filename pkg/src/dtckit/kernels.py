"""Backend selection for the hot kernels.

The compiled extension ``dtckit._core`` is used when it imports; otherwise
the NumPy versions in ``dtckit._pycore`` are used. ``DTCKIT_BACKEND=python``
forces the fallback.
"""
import os

from dtckit import _pycore

_impl = _pycore
BACKEND = "python"

if os.environ.get("DTCKIT_BACKEND", "").lower() != "python":
    try:
        from dtckit import _core as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

apply_local = _impl.apply_local
x_expectations = _impl.x_expectations
spin_half_hamiltonian = _impl.spin_half_hamiltonian
spin_one_hamiltonian = _impl.spin_one_hamiltonian
order_sq = _impl.order_sq
fixed_point_batch = _impl.fixed_point_batch
population_fixed_point = _impl.population_fixed_point
mean_order_sq = _impl.mean_order_sq


def available_backends():
    """Map of backend name to kernel module for every importable backend."""
    out = {"python": _pycore}
    try:
        from dtckit import _core
    except ImportError:
        return out
    out["cython"] = _core
    return out
