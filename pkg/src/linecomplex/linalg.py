"""Field-generic dense linear algebra on small matrices.

Exact fields use Bareiss determinants and reduced row echelon forms; the
complex-double field uses partial-pivot elimination for determinants and
singular values for ranks and nullspaces.
"""
from __future__ import annotations

from functools import reduce
from typing import Sequence

import gmpy2
import numpy as np

from . import kernels
from .field import Field, GaussRational

Vector = tuple


def det(rows: Sequence[Sequence], field: Field):
    if not rows:
        return field.one
    if field.exact:
        return kernels.det_bareiss(rows)
    return kernels.det_complex(rows)


def _svd(rows, ncols):
    a = np.array([[complex(x) for x in r] for r in rows], dtype=np.complex128).reshape(len(rows), ncols)
    return np.linalg.svd(a)


def _float_rank(s, field) -> int:
    if s.size == 0:
        return 0
    top = float(s[0])
    cut = field.tol_abs + field.tol_rel * top
    return int(np.sum(s > cut))


def rank(rows: Sequence[Sequence], field: Field, ncols: int | None = None) -> int:
    if not rows:
        return 0
    ncols = len(rows[0]) if ncols is None else ncols
    if field.exact:
        return len(kernels.rref(rows, ncols)[1])
    _, s, _ = _svd(rows, ncols)
    return _float_rank(s, field)


def nullspace(rows: Sequence[Sequence], field: Field, ncols: int | None = None) -> list:
    """Basis of {x : rows @ x = 0} as a list of tuples."""
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return [tuple(field.one if i == j else field.zero for i in range(ncols)) for j in range(ncols)]
    if field.exact:
        reduced, pivots = kernels.rref(rows, ncols)
        free = [c for c in range(ncols) if c not in pivots]
        basis = []
        for f in free:
            v = [field.zero] * ncols
            v[f] = field.one
            for r, pc in enumerate(pivots):
                v[pc] = -reduced[r][f]
            basis.append(tuple(v))
        return basis
    _, s, vh = _svd(rows, ncols)
    r = _float_rank(s, field)
    # rows of vh beyond the rank span the (numerical) nullspace; conj for A x = 0
    return [tuple(complex(x) for x in np.conj(vh[i])) for i in range(r, ncols)]


def smallest_singular_ratio(rows: Sequence[Sequence], ncols: int | None = None) -> float:
    """sigma_min / sigma_max (0 for an exactly rank-deficient matrix)."""
    ncols = len(rows[0]) if ncols is None else ncols
    _, s, _ = _svd(rows, ncols)
    k = min(len(rows), ncols)
    if s[0] == 0:
        return 0.0
    return float(s[k - 1] / s[0])


def dot(u, v):
    return reduce(lambda acc, t: acc + t[0] * t[1], zip(u[1:], v[1:]), u[0] * v[0])


def mat_vec(m, v):
    return tuple(dot(row, v) for row in m)


def transpose(m):
    return [list(col) for col in zip(*m)]


def vec_norm(v) -> float:
    return max((abs(complex(x)) for x in v), default=0.0)


def add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def scale(c, v):
    return tuple(c * x for x in v)


def lincomb(coeffs, vecs):
    out = None
    for c, v in zip(coeffs, vecs):
        term = scale(c, v)
        out = term if out is None else add(out, term)
    return out


def is_zero_vector(v, field: Field, scale_: float | None = None) -> bool:
    if field.exact:
        return all(x == 0 for x in v)
    s = 1.0 if scale_ is None else scale_
    return all(field.is_zero(x, s) for x in v)


def proportional(u, v, field: Field) -> bool:
    """Projective equality of two nonzero coordinate vectors."""
    if len(u) != len(v):
        return False
    if field.exact:
        n = len(u)
        return all(u[i] * v[j] == u[j] * v[i] for i in range(n) for j in range(i + 1, n))
    s = vec_norm(u) * vec_norm(v)
    n = len(u)
    return all(field.is_zero(u[i] * v[j] - u[j] * v[i], s) for i in range(n) for j in range(i + 1, n))


def proportionality_residual(u, v) -> float:
    """max |u_i v_j - u_j v_i| / (|u| |v|), a scale-free projective distance."""
    s = vec_norm(u) * vec_norm(v)
    if s == 0:
        return float("inf")
    n = len(u)
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            worst = max(worst, abs(complex(u[i] * v[j] - u[j] * v[i])))
    return worst / s


def normalize(v, field: Field) -> tuple:
    """Canonical projective representative.

    rational: primitive integer vector with first nonzero entry positive;
    gauss: first nonzero entry scaled to 1;
    f64: divided by the entry of largest modulus.
    """
    if field.name == "rational":
        nz = [x for x in v if x != 0]
        if not nz:
            raise ValueError("zero vector has no projective representative")
        den = reduce(gmpy2.lcm, (x.denominator for x in nz))
        ints = [x * den for x in v]
        g = reduce(gmpy2.gcd, (abs(x.numerator) for x in ints if x != 0))
        if nz[0] < 0:
            g = -g
        return tuple(x / g for x in ints)
    if field.exact:
        for x in v:
            if x != 0:
                inv = 1 / x
                return tuple(GaussRational(0, 0) + y * inv for y in v)
        raise ValueError("zero vector has no projective representative")
    big = max(v, key=lambda x: abs(complex(x)))
    if big == 0:
        raise ValueError("zero vector has no projective representative")
    return tuple(complex(x) / big for x in v)


def inverse(rows: Sequence[Sequence], field: Field) -> list:
    """Inverse of a square matrix; ValueError if singular."""
    n = len(rows)
    if field.exact:
        aug = [list(r) + [field.one if i == j else field.zero for j in range(n)] for i, r in enumerate(rows)]
        reduced, pivots = kernels.rref(aug, 2 * n)
        if pivots[:n] != list(range(n)) or len(pivots) < n:
            raise ValueError("matrix is singular")
        return [list(r[n:]) for r in reduced[:n]]
    a = np.array([[complex(x) for x in r] for r in rows], dtype=np.complex128)
    if rank(rows, field) < n:
        raise ValueError("matrix is singular")
    return [[complex(x) for x in r] for r in np.linalg.inv(a)]


def coefficients(p, u, v, field: Field):
    """(s, t) with p = s u + t v; ValueError if p is not in the span."""
    ns = nullspace(transpose([u, v, scale(-1, p)]), field, 3)
    if len(ns) != 1 or (ns[0][2] == 0 if field.exact else abs(ns[0][2]) <= field.tol_abs):
        raise ValueError("point is not uniquely expressed in the given pair")
    s, t, w = ns[0]
    return s / w, t / w
