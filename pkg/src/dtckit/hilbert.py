"""Dense state-vector engine for spin-1/2 and spin-1 ensembles.

Spin operators are S = sigma / 2. Local bases: spin-1/2 uses
(|m_s=0>, |m_s=-1>), spin-1 uses (|+1>, |0>, |-1>). Spin 0 is the most
significant digit of a basis index.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from dtckit import kernels
from dtckit.disorder import DisorderRealization

MAX_DIM = 2**14
NORM_TOL = 1e-9
HERMITIAN_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SX, SY, SZ = SIGMA_X / 2, SIGMA_Y / 2, SIGMA_Z / 2

VARIANTS = {"full_z2": 2, "eff_z2": 2, "bare_z3": 3}
# index of m_s = a in the local basis
SPIN_HALF_LEVELS = {0: 0, -1: 1}
SPIN_ONE_LEVELS = {1: 0, 0: 1, -1: 2}


class DimensionError(ValueError):
    """Hilbert space larger than the dense-engine guard."""


def _levels(local_dim):
    return SPIN_HALF_LEVELS if local_dim == 2 else SPIN_ONE_LEVELS


@dataclass
class QuantumState:
    amplitudes: np.ndarray
    local_dim: int
    n_spins: int

    def __post_init__(self):
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.local_dim not in (2, 3):
            raise ValueError("local_dim must be 2 or 3")
        if self.amplitudes.shape != (self.local_dim**self.n_spins,):
            raise ValueError("amplitude length must be local_dim**n_spins")
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized (norm={norm!r})")

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def _replace(self, amplitudes):
        # skip re-validation on the hot path; unitary maps keep the norm
        out = object.__new__(QuantumState)
        out.amplitudes = amplitudes
        out.local_dim = self.local_dim
        out.n_spins = self.n_spins
        return out


def product_state(local, n_spins):
    """|local>^{(x) n_spins} for a single-site vector ``local``."""
    local = np.asarray(local, dtype=complex)
    local = local / np.linalg.norm(local)
    d = len(local)
    if d**n_spins > MAX_DIM:
        raise DimensionError(f"{d}**{n_spins} exceeds {MAX_DIM}")
    amp = np.ones(1, dtype=complex)
    for _ in range(n_spins):
        amp = np.kron(amp, local)
    return QuantumState(amp, d, n_spins)


def plus_x_state(n_spins):
    """(|m_s=0> + |m_s=-1>)/sqrt(2) on every spin."""
    return product_state([1.0, 1.0], n_spins)


def tilted_state(n_spins, tilt):
    """x-polarized state tilted by ``tilt`` towards +z, i.e. a rotation by
    pi/2 - tilt about y applied to |m_s=0>."""
    a = 0.5 * (np.pi / 2 - tilt)
    return product_state([np.cos(a), np.sin(a)], n_spins)


def ms0_state(n_spins):
    """Spin-1 state with every spin in |m_s=0>."""
    return product_state([0.0, 1.0, 0.0], n_spins)


class OperatorMatrix:
    """Dense operator with a lazily cached eigendecomposition."""

    def __init__(self, matrix, kind="hermitian", local_dim=2):
        self.matrix = np.ascontiguousarray(matrix, dtype=np.complex128)
        self.kind = kind
        self.local_dim = local_dim
        self._eig = None
        if kind == "hermitian":
            check_hermitian(self.matrix)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def eigh(self):
        if self._eig is None:
            self._eig = np.linalg.eigh(self.matrix)
        return self._eig

    def propagator(self, t):
        """Dense exp(-i H t)."""
        E, V = self.eigh()
        return (V * np.exp(-1j * E * t)) @ V.conj().T


def check_hermitian(M, tol=HERMITIAN_TOL):
    scale = max(1.0, float(np.max(np.abs(M))) if M.size else 1.0)
    dev = float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0
    if dev > tol * scale:
        raise ValueError(f"operator is not Hermitian (max deviation {dev:.3e})")


@dataclass
class HamiltonianSpec:
    variant: str
    realization: DisorderRealization
    omega_x: float = 0.0
    omega_y: float = 0.0
    onsite_fields: np.ndarray | None = field(default=None)

    @property
    def local_dim(self):
        return VARIANTS[self.variant]


def build_hamiltonian(spec: HamiltonianSpec) -> OperatorMatrix:
    """Assemble the dense Hamiltonian for one of the three model variants.

    ``full_z2``  drive + on-site field + (xx + yy - zz) dipolar coupling,
    ``eff_z2``   spin-lock drive + Ising xx coupling,
    ``bare_z3``  spin-1 on-site shifts + secular spin-1 dipolar coupling.
    Pair sums run over unordered pairs i < j.
    """
    if spec.variant not in VARIANTS:
        raise ValueError(f"unknown variant {spec.variant!r}")
    r = spec.realization
    n = r.n_spins
    d = spec.local_dim
    if d**n > MAX_DIM:
        raise DimensionError(f"{d}**{n} = {d**n} exceeds {MAX_DIM}")
    J = np.asarray(r.couplings, float)

    if spec.variant == "bare_z3":
        if spec.omega_x != 0 or spec.omega_y != 0:
            raise ValueError("bare_z3 is a free-evolution Hamiltonian; drive must be zero")
        z3 = np.asarray(r.z3_fields, float)
        H = kernels.spin_one_hamiltonian(n, J, z3[:, 0], z3[:, 1])
        return OperatorMatrix(H, "hermitian", 3)

    hx = np.full(n, float(spec.omega_x))
    zeros = np.zeros(n)
    if spec.variant == "full_z2":
        hy = np.full(n, float(spec.omega_y))
        hz = r.onsite_fields if spec.onsite_fields is None else spec.onsite_fields
        H = kernels.spin_half_hamiltonian(n, J, hx, hy, np.asarray(hz, float), 1.0, 1.0, -1.0)
    else:
        if spec.omega_y != 0:
            raise ValueError("eff_z2 has no y drive")
        H = kernels.spin_half_hamiltonian(n, J, hx, zeros, zeros, 1.0, 0.0, 0.0)
    return OperatorMatrix(H, "hermitian", 2)


def evolve(state: QuantumState, H: OperatorMatrix, t) -> QuantumState:
    """exp(-i H t) |state> through the cached eigendecomposition of H."""
    if H.kind != "hermitian":
        raise ValueError("evolve needs a Hermitian generator")
    if t < 0:
        raise ValueError("t must be non-negative")
    if H.dim != state.amplitudes.size:
        raise ValueError("operator and state dimensions differ")
    if t == 0:
        return state._replace(state.amplitudes.copy())
    E, V = H.eigh()
    amp = V @ (np.exp(-1j * E * t) * (V.conj().T @ state.amplitudes))
    return state._replace(amp)


def spin_half_rotation(axis, angle):
    """exp(-i angle S^axis) for a single spin-1/2."""
    sigma = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}[axis]
    return np.cos(angle / 2) * np.eye(2) - 1j * np.sin(angle / 2) * sigma


def rotation_pulse(state: QuantumState, axis, angle, per_spin_angle_offsets=None):
    """Apply (x)_i exp(-i (angle + offset_i) S_i^axis)."""
    if state.local_dim != 2:
        raise ValueError("rotation_pulse acts on spin-1/2 states")
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    n = state.n_spins
    angles = np.full(n, float(angle))
    if per_spin_angle_offsets is not None:
        angles = angles + np.asarray(per_spin_angle_offsets, float)
    sigma = SIGMA_X if axis == "x" else SIGMA_Y
    c = np.cos(angles / 2)[:, None, None]
    s = np.sin(angles / 2)[:, None, None]
    mats = c * np.eye(2) - 1j * s * sigma
    return state._replace(kernels.apply_local(state.amplitudes, mats))


def _transition_level(transition):
    if isinstance(transition, str):
        transition = {"minus": (0, -1), "plus": (0, 1)}[transition]
    pair = tuple(sorted(transition))
    if pair == (-1, 0):
        return -1
    if pair == (0, 1):
        return 1
    raise ValueError(f"transition must be (0,-1) or (0,+1), got {transition!r}")


def z3_pulse_matrix(transition, angle):
    """exp(-i (|a><0| + |0><a|) angle/2) on one spin-1, identity on the spectator."""
    a = SPIN_ONE_LEVELS[_transition_level(transition)]
    z = SPIN_ONE_LEVELS[0]
    U = np.eye(3, dtype=complex)
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    U[z, z] = U[a, a] = c
    U[z, a] = U[a, z] = -1j * s
    return U


def z3_pulse(state: QuantumState, transition, angle):
    if state.local_dim != 3:
        raise ValueError("z3_pulse acts on spin-1 states")
    U = z3_pulse_matrix(transition, angle)
    mats = np.broadcast_to(U, (state.n_spins, 3, 3))
    return state._replace(kernels.apply_local(state.amplitudes, mats))


def local_populations(state: QuantumState):
    """(n_spins, local_dim) array of single-site level populations."""
    d, n = state.local_dim, state.n_spins
    prob = np.abs(state.amplitudes) ** 2
    out = np.empty((n, d))
    for i in range(n):
        out[i] = prob.reshape(d**i, d, d ** (n - 1 - i)).sum(axis=(0, 2))
    return out


def measure(state: QuantumState, observable, level=None):
    """Ensemble-averaged observable.

    ``x_polarization``   (2/N) sum_i <S_i^x>, spin-1/2 only
    ``z3_polarization``  population(0) - population(-1), spin-1 only
    ``population``       (1/N) sum_i <|a><a|_i> for ``level`` a
    """
    if observable == "x_polarization":
        if state.local_dim != 2:
            raise ValueError("x_polarization needs spin-1/2")
        return float(np.mean(kernels.x_expectations(state.amplitudes, state.n_spins)))
    if observable == "z3_polarization":
        if state.local_dim != 3:
            raise ValueError("z3_polarization needs spin-1")
        pops = local_populations(state).mean(axis=0)
        return float(pops[SPIN_ONE_LEVELS[0]] - pops[SPIN_ONE_LEVELS[-1]])
    if observable == "population":
        levels = _levels(state.local_dim)
        if level not in levels:
            raise ValueError(f"level {level!r} not defined for local_dim={state.local_dim}")
        return float(local_populations(state)[:, levels[level]].mean())
    raise ValueError(f"unknown observable {observable!r}")


def z3_cyclic_unitary(n_spins):
    """Two ideal pi pulses, first on (0,-1) then on (0,+1), as a dense matrix."""
    U1 = z3_pulse_matrix((0, 1), np.pi) @ z3_pulse_matrix((0, -1), np.pi)
    R = np.ones((1, 1), dtype=complex)
    for _ in range(n_spins):
        R = np.kron(R, U1)
    return R


def z3_average_hamiltonian(H2: OperatorMatrix, R):
    """Three-period average [H2 + R^-1 H2 R + R^-2 H2 R^2] / 3."""
    H = H2.matrix
    Rinv = R.conj().T
    first = Rinv @ H @ R
    second = Rinv @ first @ R
    return (H + first + second) / 3


def z3_average_closed_form(realization: DisorderRealization):
    """sum_{i<j} J_ij [ sum_a s_aa s_aa - (1/3) sum_{a!=b} s_ab s_ba ].

    Equals ``z3_average_hamiltonian`` of the interaction part up to the
    constant -(1/3) sum_{i<j} J_ij times the identity.
    """
    n = realization.n_spins
    dim = 3**n
    if dim > MAX_DIM:
        raise DimensionError(f"3**{n} exceeds {MAX_DIM}")
    J = realization.couplings
    # swap operator on a pair equals sum_{a,b} s_ab (x) s_ba
    H = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim)
    digits = [(idx // 3 ** (n - 1 - i)) % 3 for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if J[i, j] == 0:
                continue
            same = digits[i] == digits[j]
            H[idx, idx] += J[i, j] * same * (1 + 1 / 3)
            swapped = idx + (digits[j] - digits[i]) * 3 ** (n - 1 - i) \
                + (digits[i] - digits[j]) * 3 ** (n - 1 - j)
            H[swapped, idx] += -J[i, j] / 3
    return H
