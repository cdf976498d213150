"""Product-state self-consistency for 2T-periodic orbits.

A spin prepared in |psi_0> = cos(theta_0/2)|+> + sin(theta_0/2) e^{i phi_0}|->
returns to itself after pulse, interaction rotation by +phi, pulse, and
interaction rotation by -phi when

    cos^2 theta_0 = tan^2(theta/2) sin^2(phi/2) / (1 + tan^2(theta/2) sin^2(phi/2)),

and phi is fixed self-consistently by the mean field of the neighbours,
phi = Jbar tau1 <S^x> = Jbar tau1 cos(theta_0) / 2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dtckit import kernels
from dtckit.disorder import DisorderRealization
from dtckit.floquet import effective_rotation_angle

DEFAULT_GUESSES = (1.0, -1.0, 0.5, -0.5, 0.1, -0.1)
DAMPING = 0.5
TOL = 1e-10
POPULATION_TOL = 1e-6
MAX_ITER = 10_000
ZERO_TOL = 1e-6
THRESHOLD = 0.1


class NonConvergenceError(RuntimeError):
    """Fixed-point iteration hit the iteration cap."""


class AnsatzBreakdown(ValueError):
    """The product state has vanishing overlap with its 2T image."""


@dataclass(frozen=True)
class SelfConsistentSolution:
    cos_theta0: float
    phi: float
    exists: bool
    branch: int
    theta_eff: float
    kappa: float
    converged: bool = True
    iterations: int = 0

    @property
    def theta0(self):
        return float(np.arccos(np.clip(self.cos_theta0, -1.0, 1.0)))

    @property
    def phi0(self):
        return self.branch * np.pi - self.phi / 2


def interaction_angle(jbar, tau1, cos_theta0):
    """phi = Jbar tau1 <S^x> with <S^x> = cos(theta_0)/2."""
    return 0.5 * jbar * tau1 * cos_theta0


def orbit_cos_sq(theta, phi):
    """Right-hand side of the cos^2 theta_0 relation."""
    return kernels.order_sq(np.asarray(theta, float), np.asarray(phi, float))


def _branch(c, theta, phi):
    # cot(theta_0) = -(-1)^m tan(theta/2) sin(phi/2) and sign(cot theta_0) = sign(c)
    sign_t = np.sign(np.sin(theta / 2) * np.cos(theta / 2))
    prod = c * sign_t * np.sin(phi / 2)
    return 0 if prod < 0 else 1


def solve_self_consistent(theta, tau1, jbar, delta=0.0, omega_y=None, *,
                          guesses=DEFAULT_GUESSES, damping=DAMPING, tol=TOL,
                          max_iter=MAX_ITER, raise_on_failure=False):
    """Damped fixed-point solve for c = cos(theta_0) of one spin.

    With a finite ``omega_y`` the pulse angle is replaced by the detuned
    angle theta sqrt(1 + ((delta + jbar)/omega_y)^2).
    """
    if not tau1 > 0:
        raise ValueError("tau1 must be positive")
    theta_eff = float(effective_rotation_angle(theta, delta + jbar, omega_y))
    kappa = 0.5 * jbar * tau1
    c, it, ok = kernels.fixed_point_batch(np.array([theta_eff]), np.array([kappa]),
                                          np.asarray(guesses, float), damping, tol, max_iter)
    c, it, ok = float(c[0]), int(it[0]), bool(ok[0])
    if not ok and raise_on_failure:
        raise NonConvergenceError(
            f"no fixed point within {max_iter} iterations (theta={theta}, jbar*tau1={jbar * tau1})")
    exists = ok and abs(c) > ZERO_TOL
    if not exists:
        c = c if not ok else 0.0
    phi = kappa * c
    return SelfConsistentSolution(c, phi, exists, _branch(c, theta_eff, phi),
                                  theta_eff, kappa, ok, it)


def existence_condition(theta, tau1, jbar):
    """|tan(theta/2) jbar tau1 / 4| > 1, written to stay finite at theta = pi."""
    theta = np.asarray(theta, float)
    lhs = np.abs(np.sin(theta / 2) * jbar * tau1)
    rhs = 4.0 * np.abs(np.cos(theta / 2))
    out = lhs > rhs
    return bool(out) if out.ndim == 0 else out


def residual(solution: SelfConsistentSolution):
    """|cos^2 theta_0 - rhs(theta_eff, phi)| for a solution."""
    return float(abs(solution.cos_theta0**2
                     - orbit_cos_sq(solution.theta_eff, solution.phi)))


def _ry(theta):
    return np.array([[np.cos(theta / 2), -np.sin(theta / 2)],
                     [np.sin(theta / 2), np.cos(theta / 2)]], dtype=complex)


def _rx(phi):
    return np.array([[np.cos(phi / 2), -1j * np.sin(phi / 2)],
                     [-1j * np.sin(phi / 2), np.cos(phi / 2)]], dtype=complex)


def orbit_state(solution: SelfConsistentSolution):
    """|psi_0> in the (|m_s=0>, |m_s=-1>) basis.

    phi_0 is an azimuth about x measured from the pulse axis y; in this basis
    a real |+>/|-> superposition lies in the x-z plane, hence the -pi/2.
    """
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    minus = np.array([1.0, -1.0]) / np.sqrt(2)
    t0 = solution.theta0
    return np.cos(t0 / 2) * plus + np.sin(t0 / 2) * np.exp(1j * (solution.phi0 - np.pi / 2)) * minus


def one_period(theta, phi):
    """U_1 = exp(-i theta S^y) exp(-i phi S^x) for a single spin."""
    return _ry(theta) @ _rx(phi)


def two_period(theta, phi):
    """Two periods; the second interaction rotation sees the flipped
    polarization, so its angle is -phi."""
    return one_period(theta, -phi) @ one_period(theta, phi)


@dataclass(frozen=True)
class QuasiEnergy:
    epsilon: float
    overlap: complex
    even: np.ndarray
    odd: np.ndarray


def quasi_energy(solution: SelfConsistentSolution, theta=None, tau1=None, jbar=None):
    """epsilon = arg <psi_0|U_1^2|psi_0> / 2 and the one-period eigenstate pair
    (|psi_0> +- e^{-i epsilon} U_1 |psi_0>) / sqrt(2)."""
    if not solution.exists:
        raise ValueError("quasi_energy needs an existing solution")
    theta = solution.theta_eff if theta is None else theta
    phi = solution.phi if (tau1 is None or jbar is None) else \
        interaction_angle(jbar, tau1, solution.cos_theta0)
    psi = orbit_state(solution)
    overlap = complex(np.vdot(psi, two_period(theta, phi) @ psi))
    if abs(overlap) < 1e-6:
        raise AnsatzBreakdown(f"|<psi_0|U_1^2|psi_0>| = {abs(overlap):.2e}")
    eps = float(np.angle(overlap) / 2)
    image = np.exp(-1j * eps) * (one_period(theta, phi) @ psi)
    even = psi + image
    odd = psi - image
    return QuasiEnergy(eps, overlap, even / np.linalg.norm(even), odd / np.linalg.norm(odd))


@dataclass(frozen=True)
class DisorderSamples:
    """Paired per-spin total couplings and on-site fields (rad/us)."""

    jbar: np.ndarray
    delta: np.ndarray

    def __post_init__(self):
        if len(self.jbar) == 0:
            raise ValueError("empty disorder ensemble")
        if len(self.jbar) != len(self.delta):
            raise ValueError("jbar and delta must pair up")

    def __len__(self):
        return len(self.jbar)

    @classmethod
    def from_realizations(cls, realizations):
        if len(realizations) == 0:
            raise ValueError("empty disorder ensemble")
        rs = list(realizations)
        return cls(np.concatenate([r.jbar for r in rs]),
                   np.concatenate([r.onsite_fields for r in rs]))

    @classmethod
    def uniform(cls, jbar, n=100):
        """n identical clean samples with a single coupling."""
        return cls(np.full(n, float(jbar)), np.zeros(n))


def order_parameter(theta, tau1, samples: DisorderSamples, omega_y=None, closure="population",
                    damping=DAMPING, max_iter=MAX_ITER):
    """Disorder-averaged <cos^2 theta_0> at one (theta, tau1).

    ``population``: every sample feels phi_i = jbar_i tau1 <S^x> with <S^x>
    the mean of the current cos(theta_0) distribution, iterated to 1e-6.
    ``independent``: every sample solves its own self-consistency; samples
    without a nonzero solution count as zero.
    Returns ``(value, converged)``.
    """
    theta_eff = effective_rotation_angle(theta, samples.jbar + samples.delta, omega_y)
    kappa = 0.5 * np.asarray(samples.jbar, float) * tau1
    if closure == "population":
        m, _, ok = kernels.population_fixed_point(theta_eff, kappa, 1.0, damping,
                                                  POPULATION_TOL, max_iter)
        if abs(m) < ZERO_TOL:
            return 0.0, ok
        return float(kernels.mean_order_sq(theta_eff, kappa, m)), ok
    if closure == "independent":
        c, _, ok = kernels.fixed_point_batch(theta_eff, kappa, np.asarray(DEFAULT_GUESSES),
                                             damping, TOL, max_iter)
        exists = ok & (np.abs(c) > ZERO_TOL)
        return float(np.mean(np.where(exists, c * c, 0.0))), bool(ok.all())
    raise ValueError(f"unknown closure {closure!r}")


@dataclass
class PhaseBoundary:
    tau1_grid: np.ndarray
    theta_grid: np.ndarray
    theta_minus: np.ndarray
    theta_plus: np.ndarray
    order_parameter_map: np.ndarray
    status: list
    threshold: float = THRESHOLD
    unconverged: int = 0


def _bisect(fun, lo, hi, f_lo, f_hi, tol):
    """Shrink a sign-changing bracket below ``tol``; linear read-off inside."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = fun(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    if f_hi == f_lo:
        return 0.5 * (lo + hi)
    return lo + (hi - lo) * f_lo / (f_lo - f_hi)


def phase_boundary(tau1_grid, theta_grid, samples: DisorderSamples, omega_y=None,
                   threshold=THRESHOLD, closure="population", refine_tol=1e-3,
                   min_samples=100):
    """Order-parameter map and the threshold crossings theta_-(tau1), theta_+(tau1).

    Crossings are bracketed on the grid, walking outwards from the grid
    maximum, then refined by bisection. A missing crossing inside the grid
    gives NaN with status ``open``; a map that never reaches the threshold
    gives status ``no DTC window``.
    """
    if len(samples) < min_samples:
        raise ValueError(f"need at least {min_samples} disorder samples, got {len(samples)}")
    tau1_grid = np.asarray(tau1_grid, float)
    theta_grid = np.sort(np.asarray(theta_grid, float))
    op_map = np.zeros((len(tau1_grid), len(theta_grid)))
    t_minus = np.full(len(tau1_grid), np.nan)
    t_plus = np.full(len(tau1_grid), np.nan)
    status = []
    bad = 0

    for a, tau1 in enumerate(tau1_grid):
        def excess(th, tau1=tau1):
            nonlocal bad
            v, ok = order_parameter(th, tau1, samples, omega_y, closure)
            bad += not ok
            return v - threshold

        for b, th in enumerate(theta_grid):
            op_map[a, b] = excess(th) + threshold
        row = op_map[a] - threshold
        k = int(np.argmax(row))
        if row[k] < 0:
            status.append("no DTC window")
            continue
        flags = []
        up = next((j for j in range(k + 1, len(row)) if row[j] < 0), None)
        if up is None:
            flags.append("open+")
        else:
            t_plus[a] = _bisect(excess, theta_grid[up - 1], theta_grid[up], row[up - 1], row[up], refine_tol)
        down = next((j for j in range(k - 1, -1, -1) if row[j] < 0), None)
        if down is None:
            flags.append("open-")
        else:
            t_minus[a] = _bisect(excess, theta_grid[down], theta_grid[down + 1], row[down], row[down + 1], refine_tol)
        status.append("ok" if not flags else ",".join(flags))

    return PhaseBoundary(tau1_grid, theta_grid, t_minus, t_plus, op_map, status, threshold, bad)


def samples_from_ensemble(params_list):
    """Pool jbar/delta samples from freshly drawn realizations."""
    from dtckit.disorder import make_realization
    return DisorderSamples.from_realizations([make_realization(p) for p in params_list])


__all__ = [
    "DisorderRealization", "DisorderSamples", "NonConvergenceError", "AnsatzBreakdown",
    "PhaseBoundary", "QuasiEnergy", "SelfConsistentSolution", "existence_condition",
    "interaction_angle", "order_parameter", "orbit_cos_sq", "phase_boundary",
    "quasi_energy", "residual", "solve_self_consistent", "samples_from_ensemble",
]
