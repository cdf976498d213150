"""Stroboscopic drive protocols.

Z2: spin lock along x for tau1, then a theta pulse about y.
Z3: free spin-1 dipolar evolution for tau1, then theta pulses on the
(0,-1) and (0,+1) transitions.
"""
from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from dtckit import hilbert, kernels
from dtckit.disorder import DisorderRealization
from dtckit.hilbert import HamiltonianSpec, build_hamiltonian, measure

OMEGA_X_DEFAULT = 2 * np.pi * 54.6
OMEGA_Y_DEFAULT = 2 * np.pi * 41.7
_JITTER_STREAM = 7


class CommensurabilityWarning(UserWarning):
    """Spin-lock duration is not a whole number of Rabi periods."""


@dataclass
class ProtocolConfig:
    realization: DisorderRealization
    theta: float
    tau1: float
    variant: str = "Z2"
    omega_x: float = OMEGA_X_DEFAULT
    omega_y: float | None = OMEGA_Y_DEFAULT
    n_cycles: int = 100
    pulse_mode: str = "physical"
    hamiltonian: str = "full"
    initial_state: str = "plus_x"
    tilt: float = np.pi / 6
    envelope_t1rho: float | None = None
    pulse_errors: bool = False
    angle_jitter: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.variant not in ("Z2", "Z3"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if not self.tau1 > 0:
            raise ValueError("tau1 must be positive")
        if self.n_cycles < 1:
            raise ValueError("n_cycles must be >= 1")
        if self.pulse_mode not in ("ideal", "physical"):
            raise ValueError(f"unknown pulse_mode {self.pulse_mode!r}")
        if self.hamiltonian not in ("full", "effective"):
            raise ValueError(f"unknown hamiltonian {self.hamiltonian!r}")
        if self.initial_state not in ("plus_x", "tilted", "ms0"):
            raise ValueError(f"unknown initial_state {self.initial_state!r}")
        if self.envelope_t1rho is not None and not self.envelope_t1rho > 0:
            raise ValueError("envelope_t1rho must be positive")
        if self.angle_jitter < 0:
            raise ValueError("angle_jitter must be non-negative")
        if self.variant == "Z2" and self.pulse_mode == "physical" and not self.omega_y:
            raise ValueError("physical pulses need a finite omega_y")

    @property
    def tau2(self):
        return self.theta / self.omega_y if self.omega_y else 0.0

    @property
    def period(self):
        if self.variant == "Z2":
            return self.tau1 + self.tau2
        return self.tau1 + 2 * self.tau2

    def echo(self):
        """Scalar fields only, for trace metadata."""
        out = {k: getattr(self, k) for k in (
            "variant", "theta", "tau1", "omega_x", "omega_y", "n_cycles", "pulse_mode",
            "hamiltonian", "initial_state", "tilt", "envelope_t1rho", "pulse_errors",
            "angle_jitter", "seed")}
        out["n_spins"] = self.realization.n_spins
        out["tau2"] = self.tau2
        out["period"] = self.period
        return out


@dataclass
class PolarizationTrace:
    values: np.ndarray
    period: float
    config: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    populations: dict | None = None

    @property
    def n(self):
        return np.arange(len(self.values))

    @property
    def times(self):
        return self.n * self.period


def commensurate_tau1(tau1, omega_x=OMEGA_X_DEFAULT):
    """Nearest positive whole number of Rabi periods 2 pi / omega_x."""
    period = 2 * np.pi / omega_x
    return max(1, int(round(tau1 / period))) * period


def interaction_strength(realization: DisorderRealization):
    """Typical total coupling: median of |J-bar_i| (rad/us)."""
    return float(np.median(np.abs(realization.jbar)))


def effective_rotation_angle(theta, detuning, omega_y):
    """Rotation angle of a pulse of length theta/omega_y seen by a spin with
    extra longitudinal field ``detuning``. ``omega_y=None`` means ideal pulses."""
    detuning = np.asarray(detuning, dtype=float)
    if omega_y is None or np.isinf(omega_y):
        return np.broadcast_to(np.asarray(theta, float), detuning.shape).copy()
    tau2 = theta / omega_y
    return tau2 * np.sqrt(omega_y**2 + detuning**2)


def pulse_error_offsets(realization: DisorderRealization, omega_y, theta):
    """theta_i - theta with theta_i = tau2 sqrt(omega_y^2 + (Delta_i + Jbar_i)^2)."""
    detuning = np.asarray(realization.onsite_fields) + np.asarray(realization.jbar)
    return effective_rotation_angle(theta, detuning, omega_y) - theta


def _envelope(config, n):
    if config.envelope_t1rho is None:
        return np.ones_like(n, dtype=float)
    return np.exp(-n * config.period / config.envelope_t1rho)


def _jitter(config):
    """Per-pulse fractional angle errors, one global draw per pulse."""
    n_pulses = config.n_cycles * (1 if config.variant == "Z2" else 2)
    if config.angle_jitter == 0:
        return np.zeros(n_pulses)
    rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(_JITTER_STREAM,)))
    return rng.normal(0.0, config.angle_jitter, size=n_pulses)


def _check_commensurate(config):
    k = config.omega_x * config.tau1 / (2 * np.pi)
    if abs(k - round(k)) > 1e-6:
        warnings.warn(
            f"omega_x * tau1 = {k:.4f} x 2pi is not a whole number of Rabi periods",
            CommensurabilityWarning, stacklevel=3)


def run_z2(config: ProtocolConfig) -> PolarizationTrace:
    """x-polarization after every spin-lock + theta-pulse cycle."""
    if config.variant != "Z2":
        raise ValueError("run_z2 needs variant Z2")
    _check_commensurate(config)
    start = time.perf_counter()
    r = config.realization
    n = r.n_spins

    if config.hamiltonian == "full":
        lock = build_hamiltonian(HamiltonianSpec("full_z2", r, omega_x=config.omega_x))
    else:
        lock = build_hamiltonian(HamiltonianSpec("eff_z2", r, omega_x=config.omega_x))
    U_lock = lock.propagator(config.tau1)

    jitter = _jitter(config)
    if config.pulse_mode == "physical":
        pulse_H = build_hamiltonian(HamiltonianSpec("full_z2", r, omega_y=config.omega_y))
        U_pulse = pulse_H.propagator(config.tau2) if not jitter.any() else None
        offsets = None
    else:
        pulse_H = U_pulse = None
        offsets = pulse_error_offsets(r, config.omega_y, config.theta) if config.pulse_errors else None

    if config.initial_state == "plus_x":
        state = hilbert.plus_x_state(n)
    elif config.initial_state == "tilted":
        state = hilbert.tilted_state(n, config.tilt)
    else:
        raise ValueError("Z2 protocol starts from plus_x or tilted")

    psi = state.amplitudes
    values = np.empty(config.n_cycles + 1)
    values[0] = np.mean(kernels.x_expectations(psi, n))
    for k in range(config.n_cycles):
        psi = U_lock @ psi
        angle = config.theta * (1.0 + jitter[k])
        if config.pulse_mode == "physical":
            if U_pulse is not None:
                psi = U_pulse @ psi
            else:
                psi = hilbert.evolve(state._replace(psi), pulse_H, angle / config.omega_y).amplitudes
        else:
            psi = hilbert.rotation_pulse(state._replace(psi), "y", angle, offsets).amplitudes
        values[k + 1] = np.mean(kernels.x_expectations(psi, n))

    values *= _envelope(config, np.arange(config.n_cycles + 1))
    meta = {"wall_time_s": time.perf_counter() - start, "final_norm": float(np.linalg.norm(psi)),
            "backend": kernels.BACKEND}
    return PolarizationTrace(values, config.period, config.echo(), meta)


def run_z3(config: ProtocolConfig) -> PolarizationTrace:
    """Population difference P = p(0) - p(-1) after every Z3 cycle, plus
    the three level populations."""
    if config.variant != "Z3":
        raise ValueError("run_z3 needs variant Z3")
    if config.initial_state != "ms0":
        raise ValueError("Z3 protocol starts from ms0")
    start = time.perf_counter()
    r = config.realization
    n = r.n_spins
    H2 = build_hamiltonian(HamiltonianSpec("bare_z3", r))
    U = H2.propagator(config.tau1)
    jitter = _jitter(config)
    state = hilbert.ms0_state(n)
    psi = state.amplitudes

    levels = hilbert.SPIN_ONE_LEVELS
    pops = {a: np.empty(config.n_cycles + 1) for a in (1, 0, -1)}
    values = np.empty(config.n_cycles + 1)

    def record(k, amp):
        p = hilbert.local_populations(state._replace(amp)).mean(axis=0)
        for a in pops:
            pops[a][k] = p[levels[a]]
        values[k] = p[levels[0]] - p[levels[-1]]

    record(0, psi)
    for k in range(config.n_cycles):
        psi = U @ psi
        first = hilbert.z3_pulse_matrix((0, -1), config.theta * (1.0 + jitter[2 * k]))
        second = hilbert.z3_pulse_matrix((0, 1), config.theta * (1.0 + jitter[2 * k + 1]))
        mats = np.broadcast_to(second @ first, (n, 3, 3))
        psi = kernels.apply_local(psi, mats)
        record(k + 1, psi)

    values *= _envelope(config, np.arange(config.n_cycles + 1))
    meta = {"wall_time_s": time.perf_counter() - start, "final_norm": float(np.linalg.norm(psi)),
            "backend": kernels.BACKEND}
    return PolarizationTrace(values, config.period, config.echo(), meta,
                             {str(a): v for a, v in pops.items()})


def run(config: ProtocolConfig) -> PolarizationTrace:
    return run_z2(config) if config.variant == "Z2" else run_z3(config)
