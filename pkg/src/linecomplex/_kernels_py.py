"""Pure-Python kernels; reference semantics for ``_kernels.pyx``.

Every function here has a compiled twin with the same signature.  The
compiled module is preferred at import time (see :mod:`linecomplex.kernels`).
"""


def run_plan(vals, plan):
    """Execute M-system update instructions in order.

    ``vals`` is a flat mutable sequence of scalars; each plan row
    ``(dst, ik, il, lk, ll)`` holds flat offsets and performs
    ``vals[dst] = vals[ik] - vals[il] * vals[lk] / vals[ll]``.

    Returns -1 on success or the index of the first row with a zero pivot
    (nothing past that row is written).
    """
    if hasattr(plan, "tolist"):
        plan = plan.tolist()
    for row, (dst, ik, il, lk, ll) in enumerate(plan):
        piv = vals[ll]
        if piv == 0:
            return row
        vals[dst] = vals[ik] - vals[il] * vals[lk] / piv
    return -1


def run_plan_complex(vals, plan, pivot_tol):
    """Complex-double variant of :func:`run_plan`; |pivot| <= pivot_tol fails."""
    if hasattr(plan, "tolist"):
        plan = plan.tolist()
    for row in range(len(plan)):
        dst, ik, il, lk, ll = plan[row]
        piv = vals[ll]
        if abs(piv) <= pivot_tol:
            return row
        vals[dst] = vals[ik] - vals[il] * vals[lk] / piv
    return -1


def det_bareiss(rows):
    """Determinant by fraction-free (Bareiss) elimination over an exact field."""
    n = len(rows)
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    sign = 1
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
        mkk = m[k][k]
        rk = m[k]
        for i in range(k + 1, n):
            ri = m[i]
            mik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * mkk - mik * rk[j]) / prev
        prev = mkk
    d = m[n - 1][n - 1]
    return d if sign > 0 else -d


def det_complex(a):
    """Determinant of a square complex matrix by partial-pivot elimination."""
    n = len(a)
    m = [[complex(x) for x in row] for row in a]
    det = 1 + 0j
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(m[i][k]))
        if m[p][k] == 0:
            return 0j
        if p != k:
            m[k], m[p] = m[p], m[k]
            det = -det
        pivot = m[k][k]
        det *= pivot
        rk = m[k]
        for i in range(k + 1, n):
            f = m[i][k] / pivot
            if f != 0:
                ri = m[i]
                for j in range(k + 1, n):
                    ri[j] -= f * rk[j]
    return det


def rref(rows, ncols):
    """Reduced row echelon form over an exact field.

    Returns ``(nonzero_rows, pivot_columns)``; the input is not modified.
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    pivots = []
    r = 0
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
                f = m[i][c]
                if f != 0:
                    m[i] = [a - f * b for a, b in zip(m[i], rr)]
        pivots.append(c)
        r += 1
    return m[:r], pivots
