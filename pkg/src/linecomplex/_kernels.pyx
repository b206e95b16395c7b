# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_kernels_py.py`` (same semantics)."""

cimport cython


def run_plan(list vals, const long long[:, ::1] plan):
    cdef Py_ssize_t row, nrows = plan.shape[0]
    cdef long long dst, ik, il, lk, ll
    cdef object piv
    for row in range(nrows):
        dst = plan[row, 0]
        ik = plan[row, 1]
        il = plan[row, 2]
        lk = plan[row, 3]
        ll = plan[row, 4]
        piv = vals[ll]
        if piv == 0:
            return row
        vals[dst] = vals[ik] - vals[il] * vals[lk] / piv
    return -1


def run_plan_complex(double complex[::1] vals, const long long[:, ::1] plan, double pivot_tol):
    cdef Py_ssize_t row, nrows = plan.shape[0]
    cdef double complex piv
    cdef double mag
    for row in range(nrows):
        piv = vals[plan[row, 4]]
        mag = (piv.real * piv.real + piv.imag * piv.imag) ** 0.5
        if mag <= pivot_tol:
            return row
        vals[plan[row, 0]] = vals[plan[row, 1]] - vals[plan[row, 2]] * vals[plan[row, 3]] / piv
    return -1


def det_bareiss(rows):
    cdef Py_ssize_t n = len(rows)
    cdef Py_ssize_t i, j, k
    cdef int sign = 1
    cdef list m, rk, ri
    cdef object prev, mkk, mik
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return m[k][k] * 0
        rk = <list>m[k]
        mkk = rk[k]
        for i in range(k + 1, n):
            ri = <list>m[i]
            mik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * mkk - mik * rk[j]) / prev
        prev = mkk
    d = m[n - 1][n - 1]
    return d if sign > 0 else -d


def det_complex(a):
    cdef Py_ssize_t n = len(a)
    cdef Py_ssize_t i, j, k, p
    cdef double best, mag
    cdef double complex det = 1.0, pivot, f
    cdef double complex[:, ::1] m
    import numpy as np
    arr = np.array(a, dtype=np.complex128)
    if n == 0:
        return 1 + 0j
    m = arr
    for k in range(n):
        p = k
        best = -1.0
        for i in range(k, n):
            mag = (m[i, k].real * m[i, k].real + m[i, k].imag * m[i, k].imag)
            if mag > best:
                best = mag
                p = i
        if best == 0.0:
            return 0j
        if p != k:
            for j in range(n):
                m[k, j], m[p, j] = m[p, j], m[k, j]
            det = -det
        pivot = m[k, k]
        det = det * pivot
        for i in range(k + 1, n):
            f = m[i, k] / pivot
            for j in range(k + 1, n):
                m[i, j] = m[i, j] - f * m[k, j]
    return complex(det)


def rref(rows, Py_ssize_t ncols):
    cdef list m = [list(row) for row in rows]
    cdef Py_ssize_t nrows = len(m)
    cdef Py_ssize_t r = 0, c, i, p
    cdef list pivots = []
    cdef list rr, mi
    cdef object inv, f
    for c in range(ncols):
        if r == nrows:
            break
        p = -1
        for i in range(r, nrows):
            if m[i][c] != 0:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        rr = [x * inv for x in m[r]]
        m[r] = rr
        for i in range(nrows):
            if i != r:
                mi = <list>m[i]
                f = mi[c]
                if f != 0:
                    m[i] = [a - f * b for a, b in zip(mi, rr)]
        pivots.append(c)
        r += 1
    return m[:r], pivots
