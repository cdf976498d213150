"""Pure NumPy implementations of the hot kernels.

Every function here has a compiled twin in ``_core.pyx`` with the same
signature and semantics; ``dtckit.kernels`` picks one at import time.

Basis conventions shared by both backends: spin 0 is the most significant
digit of a basis index. For spin-1/2 the local digit 0 is |m_s=0> (S^z=+1/2)
and 1 is |m_s=-1>; for spin-1 the digits 0, 1, 2 are m_s = +1, 0, -1.
"""
import numpy as np


def apply_local(psi, mats):
    """Apply one ``d x d`` matrix per site, ``mats`` of shape ``(n, d, d)``."""
    n, d, _ = mats.shape
    out = np.ascontiguousarray(psi, dtype=np.complex128).copy()
    for i in range(n):
        view = out.reshape(d**i, d, d ** (n - 1 - i))
        out = np.einsum("ab,xby->xay", mats[i], view).reshape(-1)
    return out


def x_expectations(psi, n):
    """Per-site <sigma^x_i> for a spin-1/2 state vector."""
    vals = np.empty(n)
    for i in range(n):
        a = psi.reshape(2**i, 2, 2 ** (n - 1 - i))
        vals[i] = 2.0 * np.real(np.vdot(a[:, 0, :], a[:, 1, :]))
    return vals


def spin_half_hamiltonian(n, coup, hx, hy, hz, cxx, cyy, czz):
    """Dense spin-1/2 Hamiltonian.

    H = sum_i hx_i S^x_i + hy_i S^y_i + hz_i S^z_i
        + sum_{i<j} coup_ij (cxx S^x S^x + cyy S^y S^y + czz S^z S^z)
    with S = sigma / 2.
    """
    dim = 2**n
    idx = np.arange(dim)
    H = np.zeros((dim, dim), dtype=np.complex128)
    bits = [(idx >> (n - 1 - i)) & 1 for i in range(n)]
    zsign = [1.0 - 2.0 * b for b in bits]

    diag = np.zeros(dim)
    for i in range(n):
        diag += 0.5 * hz[i] * zsign[i]
        mask = 1 << (n - 1 - i)
        # <flip|S^x|b> = 1/2, <flip|S^y|b> = i(-1)^b / 2
        H[idx ^ mask, idx] += 0.5 * hx[i] + 0.5j * hy[i] * zsign[i]
    for i in range(n):
        for j in range(i + 1, n):
            J = coup[i, j]
            if J == 0.0:
                continue
            par = zsign[i] * zsign[j]
            diag += 0.25 * czz * J * par
            mask = (1 << (n - 1 - i)) | (1 << (n - 1 - j))
            H[idx ^ mask, idx] += 0.25 * J * (cxx - cyy * par)
    H[idx, idx] += diag
    return H


def spin_one_hamiltonian(n, coup, dplus, dminus):
    """Dense spin-1 Hamiltonian: on-site shifts of m=+1 and m=-1 plus the
    secular dipolar term -(exchange 0<->+1, 0<->-1)/2 + m_i m_j."""
    dim = 3**n
    idx = np.arange(dim)
    H = np.zeros((dim, dim), dtype=np.complex128)
    digits = [(idx // 3 ** (n - 1 - i)) % 3 for i in range(n)]
    mvals = [1 - d for d in digits]

    diag = np.zeros(dim)
    for i in range(n):
        diag += np.where(digits[i] == 0, dplus[i], 0.0)
        diag += np.where(digits[i] == 2, dminus[i], 0.0)
    for i in range(n):
        pi = 3 ** (n - 1 - i)
        for j in range(i + 1, n):
            J = coup[i, j]
            if J == 0.0:
                continue
            pj = 3 ** (n - 1 - j)
            diag += J * mvals[i] * mvals[j]
            for a in (0, 2):
                # (m_i, m_j) = (0, a) -> (a, 0), and its conjugate partner
                src = idx[(digits[i] == 1) & (digits[j] == a)]
                dst = src + (a - 1) * pi + (1 - a) * pj
                H[dst, src] += -0.5 * J
                H[src, dst] += -0.5 * J
    H[idx, idx] += diag
    return H


def order_sq(theta, phi):
    """cos^2(theta_0) of the 2T orbit for pulse angle ``theta`` and
    interaction angle ``phi``; multiplied through by cos^2(theta/2) so that
    theta = pi is regular."""
    sh = np.sin(0.5 * theta)
    ch = np.cos(0.5 * theta)
    s = np.sin(0.5 * phi)
    num = sh * sh * s * s
    den = ch * ch + num
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), 0.0)


def fixed_point_batch(theta, kappa, guesses, damping, tol, maxiter):
    """Damped fixed-point iteration on c = cos(theta_0), one per sample.

    Each sample runs from every guess; the converged run with the largest
    |c| wins (first guess on ties). Returns ``(c, iters, converged)``.
    """
    theta = np.asarray(theta, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    guesses = np.asarray(guesses, dtype=float)
    n, G = theta.size, guesses.size

    C = np.broadcast_to(guesses, (n, G)).copy()
    T = np.broadcast_to(theta[:, None], (n, G))
    K = np.broadcast_to(kappa[:, None], (n, G))
    iters = np.full((n, G), maxiter, dtype=np.int64)
    conv = np.zeros((n, G), dtype=bool)
    active = np.ones((n, G), dtype=bool)

    for k in range(maxiter):
        if not active.any():
            break
        c = C[active]
        f = np.sign(c) * np.sqrt(order_sq(T[active], K[active] * c))
        cn = (1.0 - damping) * c + damping * f
        done = np.abs(cn - c) < tol
        C[active] = cn
        rows, cols = np.nonzero(active)
        iters[rows[done], cols[done]] = k + 1
        conv[rows[done], cols[done]] = True
        active[rows[done], cols[done]] = False

    c_out = np.zeros(n)
    it_out = np.zeros(n, dtype=np.int64)
    ok_out = np.zeros(n, dtype=bool)
    best = np.full(n, -1.0)
    for g in range(G):
        # converged runs always beat non-converged ones
        score = np.abs(C[:, g]) + np.where(conv[:, g], 2.0, 0.0)
        take = score > best
        best = np.where(take, score, best)
        c_out = np.where(take, C[:, g], c_out)
        it_out = np.where(take, iters[:, g], it_out)
        ok_out = np.where(take, conv[:, g], ok_out)
    return c_out, it_out, ok_out


def population_fixed_point(theta, kappa, m0, damping, tol, maxiter):
    """Damped iteration on the population mean m of cos(theta_0).

    Each sample feels phi_i = kappa_i * m and sits on its own orbit with
    cos(theta_0) = sign(m) sqrt(order_sq). Returns ``(m, iters, converged)``.
    """
    theta = np.asarray(theta, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    m = float(m0)
    for k in range(maxiter):
        f = np.sign(m) * np.sqrt(order_sq(theta, kappa * m)).mean()
        mn = (1.0 - damping) * m + damping * f
        if abs(mn - m) < tol:
            return mn, k + 1, True
        m = mn
    return m, maxiter, False


def mean_order_sq(theta, kappa, m):
    return float(order_sq(np.asarray(theta, dtype=float),
                          np.asarray(kappa, dtype=float) * m).mean())
