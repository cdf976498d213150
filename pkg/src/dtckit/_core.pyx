# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; see ``_pycore`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, sqrt, fabs

cnp.import_array()


cdef inline Py_ssize_t ipow(Py_ssize_t base, Py_ssize_t e) nogil:
    cdef Py_ssize_t r = 1
    while e > 0:
        r *= base
        e -= 1
    return r


def apply_local(psi, mats):
    cdef const double complex[:, :, ::1] M = np.ascontiguousarray(mats, dtype=np.complex128)
    out = np.array(psi, dtype=np.complex128, copy=True, order="C")
    cdef double complex[::1] v = out
    cdef Py_ssize_t n = M.shape[0], d = M.shape[1], dim = v.shape[0]
    cdef Py_ssize_t i, stride, block, base, off, a, b
    cdef double complex acc
    cdef double complex tmp[3]
    if d > 3:
        raise ValueError("local dimension must be 2 or 3")
    with nogil:
        for i in range(n):
            stride = ipow(d, n - 1 - i)
            block = stride * d
            base = 0
            while base < dim:
                for off in range(stride):
                    for a in range(d):
                        tmp[a] = v[base + off + a * stride]
                    for a in range(d):
                        acc = 0
                        for b in range(d):
                            acc = acc + M[i, a, b] * tmp[b]
                        v[base + off + a * stride] = acc
                base += block
    return out


def x_expectations(psi, Py_ssize_t n):
    cdef const double complex[::1] v = np.ascontiguousarray(psi, dtype=np.complex128)
    vals = np.zeros(n)
    cdef double[::1] out = vals
    cdef Py_ssize_t i, s, stride, dim = v.shape[0]
    cdef double acc
    with nogil:
        for i in range(n):
            stride = ipow(2, n - 1 - i)
            acc = 0.0
            for s in range(dim):
                if (s // stride) % 2 == 0:
                    acc += (v[s].real * v[s + stride].real
                            + v[s].imag * v[s + stride].imag)
            out[i] = 2.0 * acc
    return vals


def spin_half_hamiltonian(Py_ssize_t n, coup, hx, hy, hz,
                          double cxx, double cyy, double czz):
    cdef double[:, ::1] Jm = np.ascontiguousarray(coup, dtype=np.float64)
    cdef double[::1] Hx = np.ascontiguousarray(hx, dtype=np.float64)
    cdef double[::1] Hy = np.ascontiguousarray(hy, dtype=np.float64)
    cdef double[::1] Hz = np.ascontiguousarray(hz, dtype=np.float64)
    cdef Py_ssize_t dim = ipow(2, n)
    H = np.zeros((dim, dim), dtype=np.complex128)
    cdef double complex[:, ::1] h = H
    cdef Py_ssize_t s, i, j, mi, mj
    cdef double zi, zj, J, diag
    with nogil:
        for s in range(dim):
            diag = 0.0
            for i in range(n):
                mi = ipow(2, n - 1 - i)
                zi = 1.0 - 2.0 * ((s // mi) % 2)
                diag += 0.5 * Hz[i] * zi
                h[s ^ mi, s] = h[s ^ mi, s] + (0.5 * Hx[i] + 0.5j * Hy[i] * zi)
                for j in range(i + 1, n):
                    J = Jm[i, j]
                    if J == 0.0:
                        continue
                    mj = ipow(2, n - 1 - j)
                    zj = 1.0 - 2.0 * ((s // mj) % 2)
                    diag += 0.25 * czz * J * zi * zj
                    h[s ^ (mi | mj), s] = h[s ^ (mi | mj), s] + 0.25 * J * (cxx - cyy * zi * zj)
            h[s, s] = h[s, s] + diag
    return H


def spin_one_hamiltonian(Py_ssize_t n, coup, dplus, dminus):
    cdef double[:, ::1] Jm = np.ascontiguousarray(coup, dtype=np.float64)
    cdef double[::1] Dp = np.ascontiguousarray(dplus, dtype=np.float64)
    cdef double[::1] Dm = np.ascontiguousarray(dminus, dtype=np.float64)
    cdef Py_ssize_t dim = ipow(3, n)
    H = np.zeros((dim, dim), dtype=np.complex128)
    cdef double complex[:, ::1] h = H
    cdef Py_ssize_t s, i, j, pi, pj, di, dj, dst
    cdef double J, diag
    with nogil:
        for s in range(dim):
            diag = 0.0
            for i in range(n):
                pi = ipow(3, n - 1 - i)
                di = (s // pi) % 3
                if di == 0:
                    diag += Dp[i]
                elif di == 2:
                    diag += Dm[i]
                for j in range(i + 1, n):
                    J = Jm[i, j]
                    if J == 0.0:
                        continue
                    pj = ipow(3, n - 1 - j)
                    dj = (s // pj) % 3
                    diag += J * (1 - di) * (1 - dj)
                    if di == 1 and dj != 1:
                        dst = s + (dj - 1) * pi + (1 - dj) * pj
                        h[dst, s] = h[dst, s] - 0.5 * J
                        h[s, dst] = h[s, dst] - 0.5 * J
            h[s, s] = h[s, s] + diag
    return H


cdef inline double _order_sq(double theta, double phi) nogil:
    cdef double sh = sin(0.5 * theta)
    cdef double ch = cos(0.5 * theta)
    cdef double s = sin(0.5 * phi)
    cdef double num = sh * sh * s * s
    cdef double den = ch * ch + num
    if den > 0.0:
        return num / den
    return 0.0


cdef inline double _sign(double x) nogil:
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


def order_sq(theta, phi):
    t = np.asarray(theta, dtype=np.float64)
    p = np.asarray(phi, dtype=np.float64)
    t, p = np.broadcast_arrays(t, p)
    shape = t.shape
    cdef double[::1] tv = np.ascontiguousarray(t).reshape(-1)
    cdef double[::1] pv = np.ascontiguousarray(p).reshape(-1)
    res = np.empty(tv.shape[0])
    cdef double[::1] r = res
    cdef Py_ssize_t k
    with nogil:
        for k in range(tv.shape[0]):
            r[k] = _order_sq(tv[k], pv[k])
    return res.reshape(shape)


def fixed_point_batch(theta, kappa, guesses, double damping, double tol, long maxiter):
    cdef double[::1] T = np.ascontiguousarray(theta, dtype=np.float64).reshape(-1)
    cdef double[::1] K = np.ascontiguousarray(kappa, dtype=np.float64).reshape(-1)
    cdef double[::1] Gs = np.ascontiguousarray(guesses, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t n = T.shape[0], G = Gs.shape[0]
    c_arr = np.zeros(n)
    it_arr = np.zeros(n, dtype=np.int64)
    ok_arr = np.zeros(n, dtype=bool)
    cdef double[::1] c_out = c_arr
    cdef cnp.int64_t[::1] it_out = it_arr
    cdef cnp.npy_bool[::1] ok_out = ok_arr
    cdef Py_ssize_t i, g
    cdef long k, used
    cdef double c, cn, f, best, score
    cdef bint conv
    with nogil:
        for i in range(n):
            best = -1.0
            for g in range(G):
                c = Gs[g]
                conv = False
                used = maxiter
                for k in range(maxiter):
                    f = _sign(c) * sqrt(_order_sq(T[i], K[i] * c))
                    cn = (1.0 - damping) * c + damping * f
                    if fabs(cn - c) < tol:
                        c = cn
                        conv = True
                        used = k + 1
                        break
                    c = cn
                score = fabs(c) + (2.0 if conv else 0.0)
                if score > best:
                    best = score
                    c_out[i] = c
                    it_out[i] = used
                    ok_out[i] = conv
    return c_arr, it_arr, ok_arr


cdef double _pop_map(double[::1] T, double[::1] K, double m) nogil:
    cdef Py_ssize_t i, n = T.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += sqrt(_order_sq(T[i], K[i] * m))
    return _sign(m) * acc / n


def population_fixed_point(theta, kappa, double m0, double damping, double tol, long maxiter):
    cdef double[::1] T = np.ascontiguousarray(theta, dtype=np.float64).reshape(-1)
    cdef double[::1] K = np.ascontiguousarray(kappa, dtype=np.float64).reshape(-1)
    cdef double m = m0, mn
    cdef long k, used = maxiter
    cdef bint conv = False
    with nogil:
        for k in range(maxiter):
            mn = (1.0 - damping) * m + damping * _pop_map(T, K, m)
            if fabs(mn - m) < tol:
                m = mn
                used = k + 1
                conv = True
                break
            m = mn
    return m, used, bool(conv)


def mean_order_sq(theta, kappa, double m):
    cdef double[::1] T = np.ascontiguousarray(theta, dtype=np.float64).reshape(-1)
    cdef double[::1] K = np.ascontiguousarray(kappa, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t i, n = T.shape[0]
    cdef double acc = 0.0
    with nogil:
        for i in range(n):
            acc += _order_sq(T[i], K[i] * m)
    return acc / n
