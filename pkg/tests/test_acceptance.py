"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` or
``python tests/test_acceptance.py``.
"""
import sys
import time

import numpy as np
import pytest
import yaml

from dtckit import verify
from dtckit.analysis import (CrystallineFraction, crystalline_fraction, disorder_average,
                             dtc_lifetime, fraction_error, spectrum)
from dtckit.cli import main as cli_main
from dtckit.disorder import EnsembleParams, make_realization
from dtckit.fitting import (double_exponential, fit_double_exponential, fit_super_gaussian,
                            super_gaussian, super_gaussian_boundary)
from dtckit.floquet import ProtocolConfig, commensurate_tau1, interaction_strength, run
from dtckit.meanfield import (DisorderSamples, existence_condition, phase_boundary, residual,
                              solve_self_consistent)

THETA = 1.034 * np.pi
OMEGA_Y = 2 * np.pi * 41.7
N_REAL = 20


@pytest.fixture
def report(capsys):
    def _report(n, name, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {n:2d}] {'PASS' if ok else 'FAIL'}  {name}: {detail}")
        return ok
    return _report


def late_power(P):
    return spectrum(P, (50, 100)).power


def z2_traces(jt, seeds=N_REAL):
    out = []
    for s in range(seeds):
        r = make_realization(EnsembleParams(8, seed=s))
        tau = commensurate_tau1(jt / interaction_strength(r))
        out.append(run(ProtocolConfig(r, THETA, tau, n_cycles=100)).values)
    return out


def test_1_subharmonic_rigidity(report):
    t0 = time.time()
    weak = late_power(disorder_average(z2_traces(0.06)))
    top2 = set(np.argsort(weak)[-2:].tolist())
    nu = THETA / (2 * np.pi)
    near = {int(round(nu * 50)), int(round((1 - nu) * 50))}
    f_weak = weak[25] / weak.sum()
    strong = []
    for jt in (1.0, 2.0):
        hits = 0
        for P in z2_traces(jt):
            p = late_power(P)
            hits += bool(p[25] > np.max(np.delete(p, 25)))
        strong.append(hits / N_REAL)
    dt = time.time() - t0
    ok = top2 == near and f_weak < 0.1 and min(strong) >= 0.8 and dt < 600
    report(1, "subharmonic rigidity", ok,
           f"weak top bins {sorted(top2)} (expect {sorted(near)}), f={f_weak:.4f}; "
           f"strong nu=1/2 argmax share {strong}; {dt:.0f} s")
    assert ok


def test_2_meanfield_linearized_bound(report):
    t0 = time.time()
    thetas = np.linspace(np.pi - 0.4, np.pi + 0.4, 81)
    worst = 0.0
    for x in (0.1, 0.2, 0.4):
        pb = phase_boundary([1.0], thetas, DisorderSamples.uniform(x))
        for edge in (np.pi - pb.theta_minus[0], pb.theta_plus[0] - np.pi):
            worst = max(worst, abs(edge / (x / 2) - 1))
    dt = time.time() - t0
    ok = worst < 0.1 and dt < 60
    report(2, "mean-field boundary vs J tau1 / 2", ok,
           f"max relative deviation {worst:.3f}; {dt:.1f} s")
    assert ok


def test_3_exact_identities(report):
    checks = [verify.check_z2_identity(), verify.check_z3_periodicity()]
    ok = all(c.passed for c in checks)
    report(3, "exact-case identities", ok, "; ".join(c.detail for c in checks))
    assert ok


def test_4_conservation(report):
    checks = [verify.check_norm(), verify.check_population_conservation(),
              verify.check_parseval()]
    # Parseval on every late-window spectrum of a real run as well
    worst = 0.0
    for P in z2_traces(1.0, seeds=5):
        sp = spectrum(P, (50, 100))
        x = P[51:101]
        worst = max(worst, abs(sp.total_power / (50 * np.sum(x**2)) - 1))
    ok = all(c.passed for c in checks) and worst < 1e-9
    report(4, "conservation and normalization", ok,
           "; ".join(c.detail for c in checks) + f"; trace Parseval {worst:.1e}")
    assert ok


def root_scan_exists(theta, x, n=20000):
    c = np.linspace(1e-6, 1.0, n)
    t2s2 = np.sin(theta / 2) ** 2 * np.sin(x * c / 4) ** 2
    h = np.sqrt(t2s2 / (np.cos(theta / 2) ** 2 + t2s2)) - c
    return bool(np.any(np.sign(h[:-1]) * np.sign(h[1:]) <= 0))


def test_5_self_consistency(report):
    thetas = np.linspace(np.pi - 1.0, np.pi + 1.0, 50)
    xs = np.linspace(0.05, 5.0, 50)
    worst, n_sol, bad = 0.0, 0, 0
    cond = existence_condition(thetas[:, None], 1.0, xs[None, :])
    for a, th in enumerate(thetas):
        for b, x in enumerate(xs):
            sol = solve_self_consistent(th, 1.0, x)
            if sol.exists:
                n_sol += 1
                worst = max(worst, residual(sol))
            if sol.exists != root_scan_exists(th, x):
                nb = cond[max(a - 1, 0):a + 2, max(b - 1, 0):b + 2]
                bad += not (nb.any() and not nb.all())
    ok = worst < 1e-8 and bad == 0
    report(5, "self-consistency residual", ok,
           f"{n_sol} solutions, max residual {worst:.1e}, "
           f"{bad} disagreements away from the threshold")
    assert ok


def test_6_fit_round_trips(report):
    x = np.arange(200.0)
    f = fit_double_exponential(x, double_exponential(x, 0.5, 5.0, 0.3, 60.0), power=False)
    e1 = max(abs(f.A1 / 0.5 - 1), abs(f.n1 / 5 - 1), abs(f.A2 / 0.3 - 1), abs(f.n2 / 60 - 1))
    th = np.linspace(np.pi - 0.4, np.pi + 0.4, 41)
    b = fit_super_gaussian(th, super_gaussian(th, np.pi, 0.1, 0.13, 4.0, 0.9))
    e2 = max(abs(b.theta0 / np.pi - 1), abs(b.sigma_minus / 0.1 - 1),
             abs(b.sigma_plus / 0.13 - 1), abs(b.p / 4 - 1), abs(b.f_max / 0.9 - 1))
    g = (2 * np.log(9.0)) ** 0.25
    exact = (np.pi - 0.1 * g, np.pi + 0.13 * g)
    e3 = max(abs(a - c) for a, c in zip(super_gaussian_boundary(np.pi, 0.1, 0.13, 4.0, 0.9),
                                         exact))
    e4 = max(abs(b.theta_minus - exact[0]), abs(b.theta_plus - exact[1]))
    ok = e1 < 1e-4 and e2 < 1e-4 and e3 < 1e-10
    report(6, "fit round trips", ok,
           f"double-exp {e1:.1e}, super-Gaussian {e2:.1e}, closed form {e3:.1e}, "
           f"fitted crossings {e4:.1e}")
    assert ok


def test_7_fraction_error(report):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for A, B, N in [(20.0, 50.0, 50), (5.0, 30.0, 50), (40.0, 45.0, 48), (2.0, 80.0, 100)]:
        s = 1e-3 * B / N
        eps = rng.normal(0.0, s, 10**4)
        f_mc = (A + eps) / (B + N * eps)
        fc = CrystallineFraction(A / B, np.nan, s, N, 0.5, A, B)
        worst = max(worst, abs(f_mc.std() / fraction_error(fc, s) - 1))
    # same check with the noise injected into the bins of a real spectrum
    P = disorder_average(z2_traces(1.0, seeds=5))
    sp = spectrum(P, (50, 100))
    fc = crystalline_fraction(sp)
    s = 1e-3 * sp.total_power / sp.N
    eps = rng.normal(0.0, s, 10**4)
    f_mc = (fc.peak_power + eps) / (fc.total_power + sp.N * eps)
    worst = max(worst, abs(f_mc.std() / fraction_error(fc, s) - 1))
    ok = worst < 0.2
    report(7, "delta f vs Monte Carlo", ok, f"max relative deviation {worst:.3f}")
    assert ok


def test_8_envelope_lifetime(report):
    tau = commensurate_tau1(1.0)
    lifetimes = []
    for jt in (1.0, 2.0):
        traces = []
        for s in range(N_REAL):
            r = make_realization(EnsembleParams(8, seed=s))
            r = r.scaled(jt / (interaction_strength(r) * tau))
            tr = run(ProtocolConfig(r, THETA, tau, n_cycles=400, envelope_t1rho=60.0))
            traces.append(tr.values)
        lt = dtc_lifetime(disorder_average(traces), 20, 0.5, period=tr.period)
        lifetimes.append(float(lt.lifetime_us))
    ok = all(abs(v / 60.0 - 1) < 0.15 for v in lifetimes)
    report(8, "envelope lifetime ceiling", ok,
           "lifetimes " + ", ".join(f"{v:.1f} us" for v in lifetimes) + " vs 60 us")
    assert ok


def test_9_boundary_asymmetry(report):
    rs = [make_realization(EnsembleParams(1000, seed=s)) for s in range(2)]
    samples = DisorderSamples.from_realizations(rs)
    thetas = np.linspace(0.6 * np.pi, 1.4 * np.pi, 81)
    tau1 = [0.5, 1.0, 2.0]
    pb = phase_boundary(tau1, thetas, samples, OMEGA_Y)
    up = pb.theta_plus - np.pi
    down = np.pi - pb.theta_minus
    ok = bool(np.all(up < down)) and pb.status == ["ok"] * 3
    report(9, "boundary asymmetry sign", ok,
           "theta+ - pi = " + ", ".join(f"{v:.3f}" for v in up)
           + "; pi - theta- = " + ", ".join(f"{v:.3f}" for v in down))
    assert ok


def test_10_determinism(report, tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    cfg = {"protocol": {"n_spins": 4, "n_cycles": 40, "angle_jitter": 0.01},
           "sweep": {"theta": ["0.98 pi", "1.0 pi", "1.02 pi", "1.04 pi", "1.06 pi", "1.08 pi"],
                     "tau1": ["1.0 us"], "seeds": 2, "master_seed": 11},
           "analysis": {"window": [20, 40], "stft_window": 4},
           "meanfield": {"theta": {"start": "0.9 pi", "stop": "1.1 pi", "num": 21},
                         "tau1": ["0.5 us"], "n_spins": 200}}
    path = tmp_path / "c.yaml"
    path.write_text(yaml.safe_dump(cfg))
    trees = []
    for name in ("a", "b"):
        out = tmp_path / name
        codes = [cli_main(["simulate", "--config", str(path), "--out", str(out)]),
                 cli_main(["meanfield", "--config", str(path), "--out", str(out)]),
                 cli_main(["plotdata", "--out", str(out), "--figure", "fig3"])]
        assert codes == [0, 0, 0]
        trees.append({str(p.relative_to(out)): p.read_bytes()
                      for p in sorted(out.rglob("*")) if p.is_file()})
    same = trees[0] == trees[1]
    ok = same and len(trees[0]) > 5
    report(10, "determinism", ok, f"{len(trees[0])} files, byte-identical={same}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
