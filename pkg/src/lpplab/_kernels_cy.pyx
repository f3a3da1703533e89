# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: lattice max-plus recurrences, path backtracking,
and Sturm-sequence bisection for tridiagonal largest eigenvalues.

Mirrors lpplab._kernels_py operation-for-operation; arithmetic order is
identical so both backends produce bit-identical results.
"""

from libc.math cimport INFINITY


def lpp_first_row(double[::1] w, double[::1] out):
    """Row r=1 of the passage-time recurrence: running sum of the weights."""
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double acc = w[0]
    out[0] = acc
    for i in range(1, n):
        acc = acc + w[i]
        out[i] = acc


def lpp_row_update(double[::1] tprev, double[::1] w, double[::1] out):
    """T(i,r) = w_i + max(T(i-1,r), T(i,r-1)) for one row, left to right."""
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double left = tprev[0] + w[0]
    cdef double below
    out[0] = left
    for i in range(1, n):
        below = tprev[i]
        if left > below:
            left = left + w[i]
        else:
            left = below + w[i]
        out[i] = left


def lpp_first_row_path(double[::1] w, double[::1] out, unsigned char[::1] bits):
    """First row with backpointers; every step except i=0 is horizontal."""
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double acc = w[0]
    out[0] = acc
    for i in range(1, n):
        acc = acc + w[i]
        out[i] = acc
        bits[i >> 3] |= <unsigned char> (1 << (i & 7))


def lpp_row_update_path(double[::1] tprev, double[::1] w, double[::1] out,
                        unsigned char[::1] bits):
    """Row update recording 1 bit per cell: 1 = predecessor to the left,
    0 = predecessor below. Exact ties choose below (lowest maximizing path).
    """
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double left = tprev[0] + w[0]
    cdef double below
    out[0] = left
    for i in range(1, n):
        below = tprev[i]
        if left > below:
            left = left + w[i]
            bits[i >> 3] |= <unsigned char> (1 << (i & 7))
        else:
            left = below + w[i]
        out[i] = left


def backtrack_profile(unsigned char[:, ::1] bits, Py_ssize_t n, Py_ssize_t k,
                      long long[::1] profile):
    """Recover v_i (lowest path row in column i) from packed backpointers."""
    cdef Py_ssize_t i = n, r = k
    while i > 0:
        if r == 1:
            profile[i] = 1
            i -= 1
        elif bits[r - 1, i >> 3] & (1 << (i & 7)):
            profile[i] = r
            i -= 1
        else:
            r -= 1
    profile[0] = 1


def partition_row_update(double[::1] dprev, double[::1] x, double[::1] out):
    """D(m,r) = max(D(m-1,r) + x_m, D(m,r-1)): row update of the
    breakpoint-partition recurrence (each column in exactly one row).
    dprev and out have length len(x)+1; column 0 is the empty prefix.
    """
    cdef Py_ssize_t m, M = x.shape[0]
    cdef double run = dprev[0]
    cdef double other
    out[0] = run
    for m in range(1, M + 1):
        run = run + x[m - 1]
        other = dprev[m]
        if other > run:
            run = other
        out[m] = run


cdef Py_ssize_t _sturm_count(double[::1] d, double[::1] e, double x) nogil:
    """Number of eigenvalues of the symmetric tridiagonal (d, e) below x."""
    cdef Py_ssize_t i, cnt = 0, k = d.shape[0]
    cdef double q = d[0] - x
    if q < 0:
        cnt += 1
    for i in range(1, k):
        if q == 0.0:
            q = 1e-300
        q = d[i] - x - e[i - 1] * e[i - 1] / q
        if q < 0:
            cnt += 1
    return cnt


def sturm_count(double[::1] d, double[::1] e, double x):
    return _sturm_count(d, e, x)


def sturm_lambda_max(double[::1] d, double[::1] e, double tol, int maxit):
    """Largest eigenvalue by bisection within the Gershgorin interval.

    Returns (value, iterations); iterations == -1 flags non-convergence.
    """
    cdef Py_ssize_t i, k = d.shape[0]
    cdef double lo, hi, r, mid
    cdef int it
    if k == 1:
        return d[0], 0
    lo = d[0] - abs(e[0])
    hi = d[0] + abs(e[0])
    for i in range(1, k):
        r = abs(e[i - 1])
        if i < k - 1:
            r += abs(e[i])
        if d[i] - r < lo:
            lo = d[i] - r
        if d[i] + r > hi:
            hi = d[i] + r
    for it in range(maxit):
        if hi - lo <= tol:
            return 0.5 * (lo + hi), it
        mid = 0.5 * (lo + hi)
        if _sturm_count(d, e, mid) >= k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi), -1
