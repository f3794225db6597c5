# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled steady-state chain solver.

Same contract as ``_kernel_py.solve_chain``; the parity test holds the
two to 1e-12.  The matrix is factored once with partial pivoting and
each cluster costs two 18x18 matvecs plus the substitutions, all without
entering the interpreter.
"""

from libc.math cimport sqrt

import numpy as np

cimport cython

NAME = "c"

DEF DIM = 18


cdef inline double _mag2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef int _lu_factor(double complex[:, ::1] a, Py_ssize_t[::1] piv) noexcept nogil:
    """In-place LU with partial pivoting; returns -1, or the failing column."""
    cdef Py_ssize_t i, j, k, p
    cdef double best, cand
    cdef double complex tmp, factor
    for k in range(DIM):
        p = k
        best = _mag2(a[k, k])
        for i in range(k + 1, DIM):
            cand = _mag2(a[i, k])
            if cand > best:
                best = cand
                p = i
        if best == 0.0:
            return <int> k
        piv[k] = p
        if p != k:
            for j in range(DIM):
                tmp = a[k, j]
                a[k, j] = a[p, j]
                a[p, j] = tmp
        for i in range(k + 1, DIM):
            factor = a[i, k] / a[k, k]
            a[i, k] = factor
            for j in range(k + 1, DIM):
                a[i, j] = a[i, j] - factor * a[k, j]
    return -1


cdef void _lu_solve(double complex[:, ::1] lu, Py_ssize_t[::1] piv,
                    double complex* b) noexcept nogil:
    cdef Py_ssize_t i, j, p
    cdef double complex acc, tmp
    for i in range(DIM):
        p = piv[i]
        if p != i:
            tmp = b[i]
            b[i] = b[p]
            b[p] = tmp
    for i in range(DIM):
        acc = b[i]
        for j in range(i):
            acc = acc - lu[i, j] * b[j]
        b[i] = acc
    for i in range(DIM - 1, -1, -1):
        acc = b[i]
        for j in range(i + 1, DIM):
            acc = acc - lu[i, j] * b[j]
        b[i] = acc / lu[i, i]


def solve_chain(m, source, k_ann, k_cre, n_max, xi):
    """Solve M u_{p,q} = -(rhs) for every cluster in level order.

    rhs collects the identity source (diagonal clusters only) and the
    drive coupling to the two lower neighbors; neighbors outside the
    |p - q| <= 2 band are structurally zero and skipped.
    """
    cdef double complex[:, ::1] lu = np.array(m, dtype=complex, order="C")
    cdef double complex[::1] src = np.ascontiguousarray(source, dtype=complex)
    cdef double complex[:, ::1] ann = np.ascontiguousarray(k_ann, dtype=complex)
    cdef double complex[:, ::1] cre = np.ascontiguousarray(k_cre, dtype=complex)
    cdef Py_ssize_t[::1] piv = np.zeros(DIM, dtype=np.intp)
    cdef int fail
    with nogil:
        fail = _lu_factor(lu, piv)
    if fail >= 0:
        raise ValueError(f"chain matrix is singular at column {fail}")

    cdef Py_ssize_t nd = <Py_ssize_t> n_max + 1
    u_arr = np.zeros((nd, nd, DIM), dtype=complex)
    cdef double complex[:, :, ::1] u = u_arr
    cdef double complex cxi = xi
    cdef double complex cxic = cxi.conjugate()
    cdef double complex rhs[DIM]
    cdef double complex acc, wq, wp
    cdef Py_ssize_t s, p, q, i, j, lo, hi
    cdef bint diag, use_ann, use_cre

    with nogil:
        for s in range(2 * (nd - 1) + 1):
            lo = s - (nd - 1)
            if lo < 0:
                lo = 0
            hi = s if s < nd - 1 else nd - 1
            for p in range(lo, hi + 1):
                q = s - p
                if p - q > 2 or q - p > 2:
                    continue
                diag = p == q
                use_ann = q >= 1 and (p - (q - 1) <= 2 and (q - 1) - p <= 2)
                use_cre = p >= 1 and ((p - 1) - q <= 2 and q - (p - 1) <= 2)
                wq = sqrt(<double> q) * cxi
                wp = sqrt(<double> p) * cxic
                for i in range(DIM):
                    acc = src[i] if diag else 0.0
                    if use_ann:
                        for j in range(DIM):
                            acc = acc + wq * ann[i, j] * u[p, q - 1, j]
                    if use_cre:
                        for j in range(DIM):
                            acc = acc + wp * cre[i, j] * u[p - 1, q, j]
                    rhs[i] = -acc
                _lu_solve(lu, piv, rhs)
                for i in range(DIM):
                    u[p, q, i] = rhs[i]
    return u_arr
