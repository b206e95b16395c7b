"""Projective linear algebra in CP^3 and CP^4.

Points and planes are plain coordinate tuples.  Lines of CP^3 are Plücker
vectors ordered (g01, g23, g02, g13, g03, g12); lines (and other linear
subspaces) of CP^4 are :class:`Subspace` objects holding a basis.
"""
from __future__ import annotations

from typing import Sequence

from . import linalg
from .errors import (
    CollinearTriple,
    DegeneratePair,
    IdenticalLines,
    LineInPlane,
    NonGenericPosition,
    SkewLines,
)
from .field import RATIONAL, Field
from .msystem import inner, inner_scale

PLUCKER_PAIRS = ((0, 1), (2, 3), (0, 2), (1, 3), (0, 3), (1, 2))
_SLOT = {pair: s for s, pair in enumerate(PLUCKER_PAIRS)}


def basis_point(mu: int, dim: int = 4, field: Field = RATIONAL) -> tuple:
    return tuple(field.one if j == mu else field.zero for j in range(dim))


def _is_zero(x, field: Field, scale: float = 1.0) -> bool:
    return x == 0 if field.exact else field.is_zero(x, scale)


def is_zero_point(p, field: Field) -> bool:
    if field.exact:
        return all(x == 0 for x in p)
    return linalg.vec_norm(p) <= field.tol_abs


def points_equal(p, q, field: Field = RATIONAL) -> bool:
    """Projective equality of two points (or planes, or Plücker vectors)."""
    return linalg.proportional(p, q, field)


# -- lines of CP^3 ------------------------------------------------------------


def line_from_points(a, b, field: Field = RATIONAL) -> tuple:
    """Plücker coordinates g^{mu nu} = a^mu b^nu - a^nu b^mu."""
    V = tuple(a[m] * b[n] - a[n] * b[m] for m, n in PLUCKER_PAIRS)
    if field.exact:
        if all(x == 0 for x in V):
            raise DegeneratePair(f"points {a} and {b} coincide projectively")
    elif linalg.rank([a, b], field) < 2:
        raise DegeneratePair(f"points {a} and {b} coincide projectively")
    return V


join = line_from_points


def plucker_matrix(V) -> list:
    """Antisymmetric P with P[mu][nu] = g^{mu nu}; its columns lie on the line."""
    P = [[V[0] * 0 for _ in range(4)] for _ in range(4)]
    for (m, n), s in _SLOT.items():
        P[m][n] = V[s]
        P[n][m] = -V[s]
    return P


def plucker_identity(V):
    """g01 g23 - g02 g13 + g03 g12, zero exactly for lines."""
    return V[0] * V[1] - V[2] * V[3] + V[4] * V[5]


def is_line(V, field: Field = RATIONAL) -> bool:
    if is_zero_point(V, field):
        return False
    return _is_zero(plucker_identity(V), field, inner_scale(V, V))


def points_on_line(V, field: Field = RATIONAL) -> tuple:
    """Two distinct points spanning the line V."""
    cols = linalg.transpose(plucker_matrix(V))
    if field.exact:
        nz = [c for c in cols if any(x != 0 for x in c)]
        if not nz:
            raise DegeneratePair("zero Plücker vector")
        a = tuple(nz[0])
        for c in nz[1:]:
            if not linalg.proportional(a, c, field):
                return a, tuple(c)
        raise NonGenericPosition(f"{V} is not a line (rank-1 Plücker matrix)")
    cols = [c for c in cols if linalg.vec_norm(c) > 0]
    if len(cols) < 2:
        raise NonGenericPosition(f"{V} is not a line")
    a = tuple(max(cols, key=linalg.vec_norm))
    best = max(cols, key=lambda c: linalg.proportionality_residual(a, c) * linalg.vec_norm(c))
    if linalg.rank([a, best], field) < 2:
        raise NonGenericPosition(f"{V} is not a line")
    return a, tuple(best)


def lines_intersect(V, W, field: Field = RATIONAL) -> bool:
    """Two lines of CP^3 meet iff their Plücker vectors are orthogonal."""
    return _is_zero(inner(V, W), field, inner_scale(V, W))


def lines_equal(V, W, field: Field = RATIONAL) -> bool:
    return linalg.proportional(V, W, field)


def point_on_line(p, V, field: Field = RATIONAL) -> bool:
    a, b = points_on_line(V, field)
    return linalg.rank([a, b, p], field) <= 2


def meet_point(V, W, field: Field = RATIONAL) -> tuple:
    """The common point of two distinct intersecting lines."""
    if lines_equal(V, W, field):
        raise IdenticalLines(f"lines {V} and {W} coincide")
    if not lines_intersect(V, W, field):
        raise SkewLines(f"lines {V} and {W} do not meet")
    a, b = points_on_line(V, field)
    c, d = points_on_line(W, field)
    if not field.exact:
        # unit spanning points, so the rank test sees both lines on one scale
        a, b, c, d = (linalg.scale(1 / linalg.vec_norm(x), x) for x in (a, b, c, d))
    # s a + t b - u c - v d = 0
    system = linalg.transpose([a, b, linalg.scale(-1, c), linalg.scale(-1, d)])
    ns = linalg.nullspace(system, field, 4)
    if len(ns) != 1:
        raise NonGenericPosition(f"meet of {V} and {W} is not a single point")
    s, t = ns[0][0], ns[0][1]
    return linalg.add(linalg.scale(s, a), linalg.scale(t, b))


def plane_from_points(p, q, r, field: Field = RATIONAL) -> tuple:
    ns = linalg.nullspace([p, q, r], field, len(p))
    if len(ns) != 1:
        raise CollinearTriple(f"points {p}, {q}, {r} do not span a plane")
    return ns[0]


def plane_through_line_and_point(V, p, field: Field = RATIONAL) -> tuple:
    a, b = points_on_line(V, field)
    return plane_from_points(a, b, p, field)


def point_in_plane(p, plane, field: Field = RATIONAL) -> bool:
    val = linalg.dot(plane, p)
    return _is_zero(val, field, linalg.vec_norm(plane) * linalg.vec_norm(p))


def plane_line_meet(plane, V, field: Field = RATIONAL) -> tuple:
    a, b = points_on_line(V, field)
    pa, pb = linalg.dot(plane, a), linalg.dot(plane, b)
    x = linalg.sub(linalg.scale(pb, a), linalg.scale(pa, b))
    s = linalg.vec_norm(plane) * linalg.vec_norm(a) * linalg.vec_norm(b)
    if linalg.is_zero_vector(x, field, s):
        raise LineInPlane(f"line {V} lies in plane {plane}")
    return x


def line_from_planes(u, w, field: Field = RATIONAL) -> tuple:
    """The line in which two distinct planes of CP^3 meet."""
    ns = linalg.nullspace([u, w], field, 4)
    if len(ns) != 2:
        raise DegeneratePair(f"planes {u} and {w} coincide")
    return line_from_points(ns[0], ns[1], field)


def collinear(points: Sequence, field: Field = RATIONAL) -> bool:
    return linalg.rank(list(points), field) <= 2


def coplanar(points: Sequence, field: Field = RATIONAL) -> bool:
    return linalg.rank(list(points), field) <= 3


def transversal_family_cp3(L1, L2, L3, t, field: Field = RATIONAL) -> tuple:
    """The line through t on L1 that meets L2 and L3 (a generator of their regulus)."""
    for X, Y, name in ((L1, L2, "L1,L2"), (L1, L3, "L1,L3"), (L2, L3, "L2,L3")):
        if lines_intersect(X, Y, field):
            raise NonGenericPosition(f"{name} are not skew")
    if not point_on_line(t, L1, field):
        raise NonGenericPosition("parameter point does not lie on L1")
    try:
        plane = plane_through_line_and_point(L2, t, field)
        z = plane_line_meet(plane, L3, field)
        return line_from_points(t, z, field)
    except (CollinearTriple, LineInPlane, DegeneratePair) as exc:
        raise NonGenericPosition(f"transversal construction collapsed: {exc}") from exc


# -- CP^4 ---------------------------------------------------------------------


class Subspace:
    """A projective subspace given by a linearly independent basis."""

    def __init__(self, basis, field: Field = RATIONAL, check: bool = True):
        self.basis = [tuple(v) for v in basis]
        self.field = field
        if check and self.basis and linalg.rank(self.basis, field) != len(self.basis):
            raise NonGenericPosition("subspace basis is linearly dependent")

    @classmethod
    def span(cls, vectors, field: Field = RATIONAL) -> "Subspace":
        vectors = [tuple(v) for v in vectors]
        if not vectors:
            return cls([], field, check=False)
        if field.exact:
            from . import kernels

            reduced, _ = kernels.rref(vectors, len(vectors[0]))
            return cls([tuple(r) for r in reduced], field, check=False)
        # keep a well-conditioned subset: greedy by rank growth
        out = []
        for v in sorted(vectors, key=linalg.vec_norm, reverse=True):
            if linalg.rank(out + [v], field) > len(out):
                out.append(v)
        return cls(out, field, check=False)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def ambient(self) -> int:
        return len(self.basis[0])

    def annihilator(self) -> list:
        return linalg.nullspace(self.basis, self.field, self.ambient)

    def contains(self, p) -> bool:
        return linalg.rank(self.basis + [tuple(p)], self.field) == self.rank

    def contains_subspace(self, other: "Subspace") -> bool:
        return linalg.rank(self.basis + other.basis, self.field) == self.rank

    def join(self, other) -> "Subspace":
        other_basis = other.basis if isinstance(other, Subspace) else [tuple(other)]
        return Subspace.span(self.basis + other_basis, self.field)

    def meet(self, other: "Subspace") -> "Subspace":
        n = self.ambient
        constraints = self.annihilator() + other.annihilator()
        if not constraints:
            return Subspace(self.basis, self.field, check=False)
        return Subspace(linalg.nullspace(constraints, self.field, n), self.field, check=False)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.rank == other.rank and self.contains_subspace(other)

    def __repr__(self):
        return f"Subspace(rank={self.rank}, basis={self.basis})"


def line_cp4(a, b, field: Field = RATIONAL) -> Subspace:
    if linalg.rank([a, b], field) < 2:
        raise DegeneratePair(f"points {a} and {b} coincide projectively")
    return Subspace([a, b], field, check=False)


def lines_meet_cp4(X: Subspace, Y: Subspace) -> bool:
    return linalg.rank(X.basis + Y.basis, X.field) <= 3


def meet_point_cp4(X: Subspace, Y: Subspace) -> tuple:
    m = X.meet(Y)
    if m.rank == 2:
        raise IdenticalLines("lines coincide")
    if m.rank != 1:
        raise SkewLines("lines in CP^4 do not meet")
    return m.basis[0]


def transversal_cp4(L1: Subspace, L2: Subspace, L3: Subspace) -> Subspace:
    """The unique line meeting three lines of CP^4 in general position."""
    field = L1.field
    if L1 == L2 and L2 == L3:
        return L1
    H = L1.join(L2)
    if H.rank != 4:
        raise NonGenericPosition(f"L1 and L2 span a subspace of rank {H.rank}, not a hyperplane")
    xs = L3.meet(H)
    if xs.rank != 1:
        raise NonGenericPosition("L3 does not meet span(L1, L2) in a single point")
    x = xs.basis[0]
    A = L1.join(x)
    B = L2.join(x)
    if A.rank != 3 or B.rank != 3:
        raise NonGenericPosition("the meet point of L3 lies on L1 or L2")
    T = A.meet(B)
    if T.rank != 2:
        raise NonGenericPosition(f"transversal planes meet in rank {T.rank}")
    for L in (L1, L2, L3):
        if not lines_meet_cp4(T, L):  # pragma: no cover - guaranteed by construction
            raise NonGenericPosition("transversal misses an input line")
    return Subspace(T.basis, field, check=False)


def project_point(p) -> tuple:
    """Central projection CP^4 -> CP^3 from e4: drop the last coordinate."""
    return tuple(p[:4])


def project_line(X: Subspace) -> tuple:
    a, b = X.basis
    return line_from_points(project_point(a), project_point(b), X.field)


def lift_point_on_line(X: Subspace, p) -> tuple:
    """The point of X projecting to p (X must not pass through the centre)."""
    a, b = X.basis
    system = linalg.transpose([project_point(a), project_point(b), linalg.scale(-1, p)])
    ns = linalg.nullspace(system, X.field, 3)
    if len(ns) != 1:
        raise NonGenericPosition(f"point {p} has no unique lift on {X}")
    s, t, _ = ns[0]
    return linalg.add(linalg.scale(s, a), linalg.scale(t, b))
