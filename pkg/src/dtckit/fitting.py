"""Nonlinear least squares for the decay and boundary models.

Damped Gauss-Newton (Levenberg-Marquardt) with central finite-difference
Jacobians and a fixed iteration cap, so identical input gives identical
output.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_ITER = 200
# admissible super-Gaussian powers
P_RANGE = (0.2, 50.0)


@dataclass
class LSQResult:
    params: np.ndarray
    cov: np.ndarray
    cost: float
    n_iter: int
    converged: bool
    jac: np.ndarray = field(repr=False)


def fd_jacobian(fun, p, rel_step=1e-6):
    p = np.asarray(p, float)
    cols = []
    for j in range(len(p)):
        h = rel_step * max(abs(p[j]), 1.0)
        up = p.copy()
        dn = p.copy()
        up[j] += h
        dn[j] -= h
        cols.append((fun(up) - fun(dn)) / (2 * h))
    return np.column_stack(cols)


def levenberg_marquardt(fun, p0, max_iter=MAX_ITER, xtol=1e-13, ftol=1e-16, lam0=1e-3):
    """Minimize 0.5 * ||fun(p)||^2 from ``p0``.

    ``cov`` is (J^T J)^-1 at the solution, unscaled; callers decide whether to
    scale it by the residual variance.
    """
    p = np.asarray(p0, float).copy()
    r = fun(p)
    cost = 0.5 * float(r @ r)
    lam = lam0
    converged = False
    it = 0
    J = fd_jacobian(fun, p)
    for it in range(1, max_iter + 1):
        g = J.T @ r
        A = J.T @ J
        scale = np.diag(A).copy()
        scale[scale <= 0] = 1.0
        improved = False
        while lam < 1e16:
            try:
                step = np.linalg.solve(A + lam * np.diag(scale), -g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            p_new = p + step
            r_new = fun(p_new)
            cost_new = 0.5 * float(r_new @ r_new)
            if np.isfinite(cost_new) and cost_new < cost:
                improved = True
                break
            lam *= 10
        if not improved:
            converged = True
            break
        small_step = np.all(np.abs(step) <= xtol * (np.abs(p) + xtol))
        small_gain = (cost - cost_new) <= ftol * max(cost, 1e-300)
        p, r, cost = p_new, r_new, cost_new
        lam = max(lam / 10, 1e-15)
        J = fd_jacobian(fun, p)
        if small_step or small_gain or cost == 0.0:
            converged = True
            break
    try:
        cov = np.linalg.inv(J.T @ J)
    except np.linalg.LinAlgError:
        cov = np.full((len(p), len(p)), np.nan)
    return LSQResult(p, cov, cost, it, converged, J)


def double_exponential(x, A1, n1, A2, n2):
    return A1 * np.exp(-x / n1) + A2 * np.exp(-x / n2)


def single_exponential(x, A, n):
    return A * np.exp(-x / n)


@dataclass
class DoubleExpFit:
    A1: float
    n1: float
    A2: float
    n2: float
    fallback: bool
    converged: bool
    errors: dict
    lifetime_cycles: float
    lifetime_us: float | None

    def curve(self, x):
        x = np.asarray(x, float)
        if self.fallback:
            return single_exponential(x, self.A2, self.n2)
        return double_exponential(x, self.A1, self.n1, self.A2, self.n2)


def _loglinear(x, y):
    slope, icpt = np.polyfit(x, np.log(y), 1)
    return float(slope), float(icpt)


def _lifetime(n2, period, power):
    cycles = n2 * (2.0 if power else 1.0)
    return cycles, (cycles * period if period is not None else None)


def fit_double_exponential(x, y, period=None, power=True):
    """Fit A1 exp(-x/n1) + A2 exp(-x/n2) with n1 < n2.

    Initial values come from log-linear fits on the last third (slow part)
    and on the first third after removing it (fast part). The DTC lifetime
    is the slow constant n2; when ``power`` is set the series is a squared
    amplitude and the amplitude lifetime is 2 n2. ``period`` converts cycles
    to microseconds.

    Degenerate data (constant, single exponential, merged timescales)
    returns a flagged single-exponential fit.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if len(x) < 8:
        raise ValueError("need at least 8 points")
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise ValueError("series must be positive and finite")

    if np.ptp(y) == 0:
        cyc, us = _lifetime(np.inf, period, power)
        return DoubleExpFit(0.0, np.nan, float(y[0]), np.inf, True, True, {}, cyc, us)

    third = max(len(x) // 3, 2)
    s2, c2 = _loglinear(x[-third:], y[-third:])
    n2 = -1.0 / s2 if s2 < 0 else (x[-1] - x[0]) * 10
    A2 = float(np.exp(c2))
    rest = y[:third] - A2 * np.exp(-x[:third] / n2)
    ok = rest > 0
    if ok.sum() >= 2:
        s1, c1 = _loglinear(x[:third][ok], rest[ok])
    else:
        s1, c1 = 0.0, 0.0
    if s1 < 0 and -1.0 / s1 < n2:
        n1, A1 = -1.0 / s1, float(np.exp(c1))
    else:
        n1, A1 = n2 / 10, max(float(y[0]) - A2, 1e-3 * float(y[0]))

    lo, hi = _timescale_wall(x)
    n1, n2 = np.clip(n1, lo * 1.01, hi / 1.01), np.clip(n2, lo * 1.01, hi / 1.01)

    def resid(q):
        if not (lo < np.exp(q[1]) < hi and lo < np.exp(q[3]) < hi):
            return np.full_like(y, np.inf)
        return double_exponential(x, q[0], np.exp(q[1]), q[2], np.exp(q[3])) - y

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        res = levenberg_marquardt(resid, [A1, np.log(n1), A2, np.log(n2)])
    a1, m1, a2, m2 = res.params
    t1, t2 = np.exp(m1), np.exp(m2)
    if t1 > t2:
        a1, t1, a2, t2 = a2, t2, a1, t1
    total = abs(a1) + abs(a2)
    degenerate = (not res.converged or not np.isfinite(total) or total == 0
                  or min(a1, a2) < 1e-3 * total or abs(t2 - t1) < 0.05 * t2
                  or t1 < 1.02 * lo or t2 > hi / 1.02)
    if degenerate:
        return _single_fit(x, y, period, power)

    dof = max(len(x) - 4, 1)
    s2_res = 2 * res.cost / dof
    D = np.diag([1.0, t1, 1.0, t2])
    cov = D @ res.cov @ D * s2_res
    err = np.sqrt(np.clip(np.diag(cov), 0, None))
    # the swap above also swaps error order
    if res.params[1] > res.params[3]:
        err = err[[2, 3, 0, 1]]
    errors = dict(zip(("A1", "n1", "A2", "n2"), map(float, err)))
    cyc, us = _lifetime(t2, period, power)
    return DoubleExpFit(float(a1), float(t1), float(a2), float(t2), False, True, errors, cyc, us)


def _timescale_wall(x):
    """Admissible decay constants: a tenth of the sampling step up to a
    hundred times the record length."""
    return float(np.min(np.diff(x))) / 10, float(x[-1] - x[0]) * 100


def _single_fit(x, y, period, power):
    s, c = _loglinear(x, y)
    n0 = -1.0 / s if s < 0 else (x[-1] - x[0]) * 10

    lo, hi = _timescale_wall(x)
    n0 = float(np.clip(n0, lo * 1.01, hi / 1.01))

    def resid(q):
        if not lo < np.exp(q[1]) < hi:
            return np.full_like(y, np.inf)
        return single_exponential(x, q[0], np.exp(q[1])) - y

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        res = levenberg_marquardt(resid, [float(np.exp(c)), np.log(n0)])
    A, n = float(res.params[0]), float(np.exp(res.params[1]))
    cyc, us = _lifetime(n, period, power)
    return DoubleExpFit(0.0, np.nan, A, n, True, res.converged, {}, cyc, us)


def super_gaussian(theta, theta0, sigma_minus, sigma_plus, p, f_max):
    """Two-sided super-Gaussian with separate widths below and above theta0."""
    theta = np.asarray(theta, float)
    sigma = np.where(theta <= theta0, sigma_minus, sigma_plus)
    return f_max * np.exp(-0.5 * (np.abs(theta - theta0) / sigma) ** p)


def super_gaussian_boundary(theta0, sigma_minus, sigma_plus, p, f_max, threshold=0.1):
    """(theta_-, theta_+) where the super-Gaussian equals ``threshold``."""
    if f_max < threshold:
        return np.nan, np.nan
    g = (2.0 * np.log(f_max / threshold)) ** (1.0 / p)
    return theta0 - sigma_minus * g, theta0 + sigma_plus * g


def boundary_gradients(theta0, sigma_minus, sigma_plus, p, f_max, threshold=0.1):
    """d theta_-/d q and d theta_+/d q for q = (theta0, s-, s+, p, f_max)."""
    L = 2.0 * np.log(f_max / threshold)
    if not L > 0:
        nan = np.full(5, np.nan)
        return nan, nan
    g = L ** (1.0 / p)
    dg_dp = -g * np.log(L) / p**2
    dg_df = (1.0 / p) * L ** (1.0 / p - 1.0) * 2.0 / f_max
    d_minus = np.array([1.0, -g, 0.0, -sigma_minus * dg_dp, -sigma_minus * dg_df])
    d_plus = np.array([1.0, 0.0, g, sigma_plus * dg_dp, sigma_plus * dg_df])
    return d_minus, d_plus


@dataclass
class BoundaryFit:
    theta0: float
    sigma_minus: float
    sigma_plus: float
    p: float
    f_max: float
    theta_minus: float
    theta_plus: float
    theta_minus_err: float
    theta_plus_err: float
    errors: dict
    status: str
    cost: float
    threshold: float = 0.1

    def curve(self, theta):
        return super_gaussian(theta, self.theta0, self.sigma_minus, self.sigma_plus,
                              self.p, self.f_max)


def _half_width(theta, f, k, level, direction):
    j = k
    while 0 <= j + direction < len(f) and f[j + direction] > level:
        j += direction
    nxt = j + direction
    if not 0 <= nxt < len(f):
        return abs(theta[j] - theta[k]) or abs(theta[-1] - theta[0]) / 4
    # linear interpolation between j and nxt
    t = (f[j] - level) / (f[j] - f[nxt])
    edge = theta[j] + t * (theta[nxt] - theta[j])
    return abs(edge - theta[k]) or abs(theta[nxt] - theta[j]) / 2


def fit_super_gaussian(theta, f, delta_f=None, threshold=0.1):
    """Weighted fit of the two-sided super-Gaussian and its threshold crossings.

    Weights are 1/delta_f when every delta_f is positive (errors then taken
    as absolute); otherwise the fit is unweighted and errors are scaled by
    the residual variance.
    """
    theta = np.asarray(theta, float)
    f = np.asarray(f, float)
    order = np.argsort(theta)
    theta, f = theta[order], f[order]
    if len(theta) < 6:
        raise ValueError("need at least 6 points")
    k = int(np.argmax(f))
    if k == 0 or k == len(f) - 1:
        raise ValueError("points must span both sides of the maximum")

    weighted = False
    if delta_f is not None:
        df = np.asarray(delta_f, float)[order]
        weighted = bool(np.all(np.isfinite(df)) and np.all(df > 0))
    w = 1.0 / df if weighted else np.ones_like(f)

    level = f[k] * np.exp(-0.5)
    sm0 = _half_width(theta, f, k, level, -1)
    sp0 = _half_width(theta, f, k, level, +1)

    def resid(q):
        if not P_RANGE[0] < np.exp(q[3]) < P_RANGE[1]:
            return np.full_like(f, np.inf)
        return w * (super_gaussian(theta, q[0], np.exp(q[1]), np.exp(q[2]),
                                   np.exp(q[3]), q[4]) - f)

    best = None
    for p0 in (2.0, 4.0, 8.0):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            res = levenberg_marquardt(resid, [theta[k], np.log(sm0), np.log(sp0), np.log(p0), f[k]])
        if best is None or res.cost < best.cost:
            best = res
    t0, ls_m, ls_p, lp, fm = best.params
    sm, sp, p = np.exp(ls_m), np.exp(ls_p), np.exp(lp)

    D = np.diag([1.0, sm, sp, p, 1.0])
    cov = D @ best.cov @ D
    if not weighted:
        cov = cov * (2 * best.cost / max(len(f) - 5, 1))
    err = np.sqrt(np.clip(np.diag(cov), 0, None))
    errors = dict(zip(("theta0", "sigma_minus", "sigma_plus", "p", "f_max"), map(float, err)))

    if fm < threshold:
        return BoundaryFit(t0, sm, sp, p, fm, np.nan, np.nan, np.nan, np.nan, errors,
                           "no DTC window", best.cost, threshold)
    tm, tp = super_gaussian_boundary(t0, sm, sp, p, fm, threshold)
    g_minus, g_plus = boundary_gradients(t0, sm, sp, p, fm, threshold)
    tm_err = float(np.sqrt(max(g_minus @ cov @ g_minus, 0.0))) if np.all(np.isfinite(g_minus)) else np.nan
    tp_err = float(np.sqrt(max(g_plus @ cov @ g_plus, 0.0))) if np.all(np.isfinite(g_plus)) else np.nan
    return BoundaryFit(float(t0), float(sm), float(sp), float(p), float(fm), float(tm), float(tp),
                       tm_err, tp_err, errors, "ok", best.cost, threshold)
