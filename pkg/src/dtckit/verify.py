"""Fast invariant suite behind ``dtckit verify``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dtckit import analysis, hilbert, meanfield
from dtckit.disorder import DisorderRealization, EnsembleParams, make_realization
from dtckit.fitting import (double_exponential, fit_double_exponential, fit_super_gaussian,
                            super_gaussian, super_gaussian_boundary)
from dtckit.floquet import ProtocolConfig, commensurate_tau1, run


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _small_realization(n, seed=1, scale=5.0):
    return make_realization(EnsembleParams(n, seed=seed)).scaled(scale)


def check_z2_identity():
    r = DisorderRealization.noninteracting(4)
    tr = run(ProtocolConfig(r, np.pi, commensurate_tau1(0.1), pulse_mode="ideal", n_cycles=100))
    err = float(np.max(np.abs(tr.values - (-1.0) ** np.arange(101))))
    return Check("z2 ideal flips equal (-1)^n", err < 1e-10, f"max error {err:.2e}")


def check_z3_periodicity():
    r = DisorderRealization.noninteracting(3)
    tr = run(ProtocolConfig(r, np.pi, 0.1, variant="Z3", initial_state="ms0", n_cycles=30,
                            pulse_mode="ideal"))
    err = 0.0
    for v in tr.populations.values():
        err = max(err, float(np.max(np.abs(v[3:] - v[:-3]))))
    seq = float(np.max(np.abs(tr.values[:3] - [1.0, -1.0, 0.0])))
    ok = err < 1e-12 and seq < 1e-12
    return Check("z3 ideal populations 3-periodic", ok, f"max drift {err:.2e}, P sequence {seq:.2e}")


def check_norm():
    r = _small_realization(6)
    tau1 = commensurate_tau1(0.5)
    worst = 0.0
    for cfg in (ProtocolConfig(r, 1.034 * np.pi, tau1, n_cycles=100),
                ProtocolConfig(r, 1.1 * np.pi, 0.5, variant="Z3", initial_state="ms0",
                               n_cycles=100, pulse_mode="ideal")):
        worst = max(worst, abs(run(cfg).metadata["final_norm"] - 1.0))
    return Check("norm drift over 100 cycles", worst < 1e-9, f"max |norm - 1| {worst:.2e}")


def check_population_conservation():
    r = _small_realization(5, seed=2).with_fields(
        z3_fields=np.random.default_rng(0).normal(0, 2 * np.pi * 4, (5, 2)))
    H = hilbert.build_hamiltonian(hilbert.HamiltonianSpec("bare_z3", r))
    rng = np.random.default_rng(3)
    local = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
    local /= np.linalg.norm(local, axis=1, keepdims=True)
    psi = local[0]
    for v in local[1:]:
        psi = np.kron(psi, v)
    state = hilbert.QuantumState(psi, 3, 5)
    U = H.propagator(0.3)
    p0 = hilbert.local_populations(state).sum(axis=0)
    worst = 0.0
    for _ in range(100):
        state = state._replace(U @ state.amplitudes)
        worst = max(worst, float(np.max(np.abs(hilbert.local_populations(state).sum(axis=0) - p0))))
    return Check("bare_z3 level populations conserved", worst < 1e-10, f"max drift {worst:.2e}")


def check_parseval():
    rng = np.random.default_rng(4)
    worst = 0.0
    for N in (2, 3, 48, 50, 51):
        P = rng.uniform(-1, 1, N + 7)
        sp = analysis.spectrum(P, (6, 6 + N))
        x = P[7:7 + N]
        worst = max(worst, abs(sp.total_power - N * np.sum(x**2)) / (N * np.sum(x**2)))
    return Check("Parseval identity", worst < 1e-9, f"max relative error {worst:.2e}")


def check_self_consistency():
    worst = 0.0
    count = 0
    for th in np.linspace(0.5 * np.pi, 1.5 * np.pi, 25):
        for x in np.linspace(0.05, 4.0, 25):
            sol = meanfield.solve_self_consistent(th, 1.0, x)
            if sol.exists:
                count += 1
                worst = max(worst, abs(meanfield.residual(sol)))
    return Check("self-consistency residual", worst < 1e-8,
                 f"{count} solutions, max residual {worst:.2e}")


def check_fits():
    x = np.arange(200.0)
    y = double_exponential(x, 0.5, 5.0, 0.3, 60.0)
    f = fit_double_exponential(x, y, power=False)
    e1 = max(abs(f.A1 / 0.5 - 1), abs(f.n1 / 5 - 1), abs(f.A2 / 0.3 - 1), abs(f.n2 / 60 - 1))
    th = np.linspace(np.pi - 0.4, np.pi + 0.4, 41)
    b = fit_super_gaussian(th, super_gaussian(th, np.pi, 0.1, 0.1, 4.0, 0.9))
    e2 = max(abs(b.theta0 / np.pi - 1), abs(b.sigma_minus / 0.1 - 1), abs(b.sigma_plus / 0.1 - 1),
             abs(b.p / 4 - 1), abs(b.f_max / 0.9 - 1))
    tm, tp = super_gaussian_boundary(b.theta0, b.sigma_minus, b.sigma_plus, b.p, b.f_max)
    e3 = max(abs(tm - b.theta_minus), abs(tp - b.theta_plus))
    ok = e1 < 1e-4 and e2 < 1e-4 and e3 < 1e-10
    return Check("fit round trips", ok, f"double-exp {e1:.1e}, super-Gaussian {e2:.1e}, "
                                        f"boundary {e3:.1e}")


CHECKS = (check_z2_identity, check_z3_periodicity, check_norm, check_population_conservation,
          check_parseval, check_self_consistency, check_fits)


def run_all():
    out = []
    for fn in CHECKS:
        try:
            out.append(fn())
        except Exception as exc:  # a crash is a failed check
            out.append(Check(fn.__name__, False, f"{type(exc).__name__}: {exc}"))
    return out
