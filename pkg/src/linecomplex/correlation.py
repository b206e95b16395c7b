"""Polarities of spatial hexagons and the opposite-line map on cubes.

For six points x1..x6 of CP^3 in general position there is a unique
correlation sending each vertex x^i to the plane pi^{i+3} through
x^{i+2}, x^{i+3}, x^{i+4}; it is a polarity y^T B x = 0 with B symmetric.
On a fundamental cube it swaps opposite lines.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Sequence

from . import linalg
from . import projective as pg
from .complexes import CORNERS, _common_point, check_fundamental_cube, corner, eighth_line
from .errors import DegeneratePolarity, NonGenericPosition, RankDeficiency
from .field import RATIONAL, Field

SYM_PARAMS = ((0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3))
ANTI_PARAMS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def _pairs():
    """Vertex index pairs (0-based) that must be conjugate: cyclic distance 2 and 3."""
    out = [(i, (i + 2) % 6) for i in range(6)]
    out += [(i, i + 3) for i in range(3)]
    return out


def hexagon_planes(xs: Sequence, field: Field = RATIONAL) -> list:
    """pi^i = plane(x^{i-1}, x^i, x^{i+1})."""
    return [pg.plane_from_points(xs[i - 1], xs[i], xs[(i + 1) % 6], field) for i in range(6)]


def hexagon_edges(xs: Sequence, field: Field = RATIONAL) -> list:
    """l^{i,i+1}, i = 1..6."""
    return [pg.line_from_points(xs[i], xs[(i + 1) % 6], field) for i in range(6)]


def polarity_system(xs: Sequence) -> list:
    """The 9 x 10 linear system for the symmetric entries of B."""
    rows = []
    for i, j in _pairs():
        y, x = xs[j], xs[i]
        rows.append([y[m] * x[m] if m == n else y[m] * x[n] + y[n] * x[m] for m, n in SYM_PARAMS])
    return rows


def _sym_matrix(params, field) -> list:
    B = [[field.zero] * 4 for _ in range(4)]
    for (m, n), v in zip(SYM_PARAMS, params):
        B[m][n] = v
        B[n][m] = v
    return B


@dataclass
class Polarity:
    B: list
    field: Field = RATIONAL

    def plane(self, x) -> tuple:
        """kappa(x) as a covector."""
        return linalg.mat_vec(self.B, x)

    def form(self, y, x):
        return linalg.dot(y, linalg.mat_vec(self.B, x))

    def line(self, V) -> tuple:
        return apply_polarity_to_line(self, V)


def polarity_from_hexagon(xs: Sequence, field: Field = RATIONAL, verify: bool = True) -> Polarity:
    if len(xs) != 6:
        raise ValueError("a hexagon has six vertices")
    ns = linalg.nullspace(polarity_system(xs), field, 10)
    if len(ns) != 1:
        raise RankDeficiency(f"polarity system has nullity {len(ns)}, expected 1")
    B = _sym_matrix(ns[0], field)
    if field.exact and linalg.det(B, field) == 0 or (not field.exact and linalg.rank(B, field) < 4):
        raise DegeneratePolarity("the hexagon's correlation is singular")
    pol = Polarity(B, field)
    if verify:
        planes = hexagon_planes(xs, field)
        for i in range(6):
            if not linalg.proportional(pol.plane(xs[i]), planes[(i + 3) % 6], field):
                raise NonGenericPosition(f"kappa(x{i + 1}) is not the opposite plane")
    return pol


def polarity_nullity(xs: Sequence, field: Field = RATIONAL) -> int:
    return len(linalg.nullspace(polarity_system(xs), field, 10))


def antisymmetric_candidates(xs: Sequence, field: Field = RATIONAL) -> list:
    """Skew matrices satisfying the same nine conjugacy conditions."""
    rows = []
    for i, j in _pairs():
        y, x = xs[j], xs[i]
        rows.append([y[m] * x[n] - y[n] * x[m] for m, n in ANTI_PARAMS])
    out = []
    for v in linalg.nullspace(rows, field, 6):
        B = [[field.zero] * 4 for _ in range(4)]
        for (m, n), c in zip(ANTI_PARAMS, v):
            B[m][n] = c
            B[n][m] = -c
        out.append(B)
    return out


def maps_hexagon(B, xs, field: Field = RATIONAL) -> bool:
    """kappa(x^i) = pi^{i+3} for all i (a nonzero covector each time)."""
    planes = hexagon_planes(xs, field)
    for i in range(6):
        img = linalg.mat_vec(B, xs[i])
        if pg.is_zero_point(img, field) or not linalg.proportional(img, planes[(i + 3) % 6], field):
            return False
    return True


def apply_polarity_to_line(pol: Polarity, V) -> tuple:
    """The meet of the polar planes of two points of V."""
    f = pol.field
    a, b = pg.points_on_line(V, f)
    u, w = pol.plane(a), pol.plane(b)
    try:
        return pg.line_from_planes(u, w, f)
    except Exception as exc:
        raise DegeneratePolarity(f"polar planes of {V} do not meet in a line") from exc


# -- the normalized chart ---------------------------------------------------


@dataclass
class NormalizedHexagon:
    """x1 = e2, x2 = e0, x4 = e3, x5 = e1; x3 = a and x6 = b free."""

    a: tuple
    b: tuple
    A: list          # chart map: normalized = A @ original
    A_inv: list
    field: Field = RATIONAL

    @property
    def vertices(self) -> list:
        e = [pg.basis_point(j, 4, self.field) for j in range(4)]
        return [e[2], e[0], self.a, e[3], e[1], self.b]

    def gamma(self, m, n):
        return self.a[m] * self.b[n] - self.a[n] * self.b[m]

    def to_original(self, p) -> tuple:
        return linalg.mat_vec(self.A_inv, p)


def normalize_hexagon(xs: Sequence, field: Field = RATIONAL) -> NormalizedHexagon:
    cols = [xs[1], xs[4], xs[0], xs[3]]
    A_inv = linalg.transpose(cols)
    try:
        A = linalg.inverse(A_inv, field)
    except ValueError:
        raise NonGenericPosition("x1, x2, x4, x5 are not a projective frame") from None
    return NormalizedHexagon(linalg.mat_vec(A, xs[2]), linalg.mat_vec(A, xs[5]), A, A_inv, field)


def closed_form_polarity(nh: NormalizedHexagon) -> list:
    """B in the normalized chart from the two free vertices."""
    a, b, f = nh.a, nh.b, nh.field
    if any(x == 0 for x in (a[1], a[2], b[0], b[3])):
        raise NonGenericPosition("closed form needs a1, a2, b0, b3 nonzero")
    B02, B13 = nh.gamma(1, 3), nh.gamma(0, 2)
    B = [[f.zero] * 4 for _ in range(4)]
    B[0][2] = B[2][0] = B02
    B[1][3] = B[3][1] = B13
    B[0][0] = -b[2] / b[0] * B02
    B[1][1] = -a[3] / a[1] * B13
    B[2][2] = -a[0] / a[2] * B02
    B[3][3] = -b[1] / b[3] * B13
    return B


def _matmul(X, Y) -> list:
    cols = linalg.transpose(Y)
    return [[linalg.dot(r, c) for c in cols] for r in X]


def pull_back_form(B_norm, A) -> list:
    """B_orig = A^T B_norm A for normalized = A @ original."""
    return _matmul(_matmul(linalg.transpose(A), B_norm), A)


def transversal_coefficients(nh: NormalizedHexagon, mu1, mu2) -> tuple:
    """(mu1, ..., mu6) with x12 + x34 + x56 = 0 on the three alternate edges."""
    g = nh.gamma
    g02 = g(0, 2)
    if g02 == 0:
        raise NonGenericPosition("gamma02 vanishes in the normalized chart")
    a, b = nh.a, nh.b
    mu3 = (b[0] * mu1 - b[2] * mu2) / g02
    mu4 = (g(0, 3) * mu1 - g(2, 3) * mu2) / g02
    mu5 = (g(0, 1) * mu1 + g(1, 2) * mu2) / g02
    mu6 = -(a[0] * mu1 - a[2] * mu2) / g02
    return (mu1, mu2, mu3, mu4, mu5, mu6)


def transversal_points(nh: NormalizedHexagon, mu) -> tuple:
    x = nh.vertices
    x12 = linalg.add(linalg.scale(mu[0], x[0]), linalg.scale(mu[1], x[1]))
    x34 = linalg.add(linalg.scale(mu[2], x[2]), linalg.scale(mu[3], x[3]))
    x56 = linalg.add(linalg.scale(mu[4], x[4]), linalg.scale(mu[5], x[5]))
    return x12, x34, x56


def hexagon_transversal(nh: NormalizedHexagon, mu1, mu2) -> tuple:
    """The line (in normalized coordinates) meeting l12, l34, l56 through mu1 x1 + mu2 x2."""
    x12, x34, x56 = transversal_points(nh, transversal_coefficients(nh, mu1, mu2))
    s = linalg.add(linalg.add(x12, x34), x56)
    if not linalg.is_zero_vector(s, nh.field, linalg.vec_norm(x12) + linalg.vec_norm(x34) + 1.0):
        raise NonGenericPosition("alternate-edge points are not collinear")
    return pg.line_from_points(x12, x34, nh.field)


def opposite_coefficients(nh: NormalizedHexagon, Vp) -> tuple:
    """(nu1, ..., nu6) of the points where V' meets l23, l45, l61, scaled to sum to zero."""
    f = nh.field
    x = nh.vertices
    edges = hexagon_edges(x, f)
    pts = [pg.meet_point(Vp, edges[j], f) for j in (1, 3, 5)]
    ns = linalg.nullspace(linalg.transpose(pts), f, 3)
    if len(ns) != 1:
        raise NonGenericPosition("meets of the image line are not in general position")
    c = ns[0]
    q = [linalg.scale(c[j], pts[j]) for j in range(3)]
    nu2, nu3 = linalg.coefficients(q[0], x[1], x[2], f)
    nu4, nu5 = linalg.coefficients(q[1], x[3], x[4], f)
    nu6, nu1 = linalg.coefficients(q[2], x[5], x[0], f)
    return (nu1, nu2, nu3, nu4, nu5, nu6)


# -- cubes ------------------------------------------------------------------


def hexagon_from_cube(lines: Dict[tuple, tuple], field: Field = RATIONAL) -> tuple:
    """Vertices and edge lines of the hexagon formed by the six middle lines of a cube.

    Edges in order: l1, l12, l2, l23, l3, l13.
    """
    L = lambda *d: lines[corner(*d)]
    m = lambda X, Y: pg.meet_point(X, Y, field)
    xs = [
        m(L(1), L(1, 3)),   # p^3_1
        m(L(1), L(1, 2)),   # p^2_1
        m(L(2), L(1, 2)),   # p^1_2
        m(L(2), L(2, 3)),   # p^3_2
        m(L(3), L(2, 3)),   # p^2_3
        m(L(3), L(1, 3)),   # p^1_3
    ]
    edges = [L(1), L(1, 2), L(2), L(2, 3), L(3), L(1, 3)]
    return xs, edges


@dataclass
class PolarityCubeReport:
    checks: Dict[str, bool] = dc_field(default_factory=dict)
    residuals: Dict[str, float] = dc_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def _line_eq(V, W, field, rep=None, key=None):
    ok = pg.lines_equal(V, W, field)
    if rep is not None and not field.exact:
        r = linalg.proportionality_residual(V, W)
        rep.residuals[key] = max(rep.residuals.get(key, 0.0), r)
    return ok


def verify_polarity_cube(xs: Sequence, V, field: Field = RATIONAL, stored=None) -> PolarityCubeReport:
    """Check that kappa(V) is the eighth line of the cube spanned by the hexagon and V.

    V must meet l12, l34, l56.  ``stored`` optionally gives the known eighth line.
    """
    rep = PolarityCubeReport()
    f = field
    edges = hexagon_edges(xs, f)
    rep.checks["line_meets_alternate_edges"] = all(pg.lines_intersect(V, edges[j], f) for j in (0, 2, 4))
    pol = polarity_from_hexagon(xs, f)
    rep.checks["edges_swapped"] = all(_line_eq(pol.line(edges[i]), edges[(i + 3) % 6], f, rep, "edges") for i in range(6))
    Vp = pol.line(V)
    rep.checks["involution"] = _line_eq(pol.line(Vp), V, f, rep, "involution")
    rep.checks["image_meets_other_edges"] = all(pg.lines_intersect(Vp, edges[j], f) for j in (1, 3, 5))
    # coplanarity of x2, x34, x5, x61
    x34 = pg.meet_point(V, edges[2], f)
    x61 = pg.meet_point(Vp, edges[5], f)
    pts = [xs[1], x34, xs[4], x61]
    if f.exact:
        rep.checks["coplanarity"] = linalg.det(pts, f) == 0
    else:
        rep.residuals["coplanarity"] = linalg.smallest_singular_ratio(pts, 4)
        rep.checks["coplanarity"] = linalg.rank(pts, f) <= 3
    hat = eighth_line(V, edges[0], edges[2], edges[4], edges[1], edges[3], edges[5], f)
    rep.checks["equals_eighth_line"] = _line_eq(Vp, hat, f, rep, "eighth")
    if stored is not None:
        rep.checks["equals_stored_line"] = _line_eq(Vp, stored, f, rep, "stored")
    try:
        nh = normalize_hexagon(xs, f)
    except NonGenericPosition:
        return rep
    Vn = _transform_line(V, nh.A, f)
    mu1, mu2 = linalg.coefficients(pg.meet_point(Vn, pg.line_from_points(nh.vertices[0], nh.vertices[1], f), f),
                                   nh.vertices[0], nh.vertices[1], f)
    mu = transversal_coefficients(nh, mu1, mu2)
    rep.checks["transversal_closed_form"] = pg.lines_equal(hexagon_transversal(nh, mu1, mu2), Vn, f)
    nu = opposite_coefficients(nh, _transform_line(Vp, nh.A, f))
    rep.checks["nu_equals_mu"] = linalg.proportional(mu, nu, f)
    return rep


def _transform_line(V, A, field):
    a, b = pg.points_on_line(V, field)
    return pg.line_from_points(linalg.mat_vec(A, a), linalg.mat_vec(A, b), field)


def cube_polarity(lines: Dict[tuple, tuple], field: Field = RATIONAL) -> Polarity:
    xs, _ = hexagon_from_cube(lines, field)
    return polarity_from_hexagon(xs, field)


def verify_cube_polarity(lines: Dict[tuple, tuple], field: Field = RATIONAL) -> PolarityCubeReport:
    """Polarity checks on the hexagon of a fundamental cube, with l123 as the stored eighth line."""
    xs, _ = hexagon_from_cube(lines, field)
    return verify_polarity_cube(xs, lines[(0, 0, 0)], field, stored=lines[(1, 1, 1)])


def cube_diagonals(lines: Dict[tuple, tuple], field: Field = RATIONAL) -> tuple:
    """Edge points and diagonal lines of a fundamental cube.

    Returns (points keyed (corner, direction), {type m: [4 diagonals]}, {direction l: [4 diagonals in the p^l plane]}).
    """
    pts = {}
    for eps in CORNERS:
        for l in (1, 2, 3):
            if eps[l - 1] == 0:
                top = tuple(e + (1 if j == l - 1 else 0) for j, e in enumerate(eps))
                pts[(eps, l)] = pg.meet_point(lines[eps], lines[top], field)
    by_type = {}
    for m in (1, 2, 3):
        others = [x for x in (1, 2, 3) if x != m]
        diag = []
        for l in others:
            (p,) = [x for x in others if x != l]
            diag.append(pg.line_from_points(pts[(corner(), l)], pts[(corner(m), l)], field))
            diag.append(pg.line_from_points(pts[(corner(p), l)], pts[(corner(p, m), l)], field))
        by_type[m] = diag
    by_plane = {}
    for l in (1, 2, 3):
        m, p = [x for x in (1, 2, 3) if x != l]
        q = lambda *d: pts[(corner(*d), l)]
        by_plane[l] = [
            pg.line_from_points(q(), q(m), field),
            pg.line_from_points(q(p), q(p, m), field),
            pg.line_from_points(q(), q(p), field),
            pg.line_from_points(q(m), q(m, p), field),
        ]
    return pts, by_type, by_plane


def _coplanar_lines(lines, field) -> bool:
    pts = [p for V in lines for p in pg.points_on_line(V, field)]
    return linalg.rank(pts, field) <= 3


def verify_concurrency_exchange(lines: Dict[tuple, tuple], field: Field = RATIONAL) -> Dict[str, bool]:
    """kappa maps each concurrent quadruple of diagonals to a coplanar one and vice versa."""
    pol = cube_polarity(lines, field)
    _, by_type, by_plane = cube_diagonals(lines, field)
    all_diag = [D for ds in by_type.values() for D in ds]

    def is_diagonal(V):
        return any(pg.lines_equal(V, D, field) for D in all_diag)

    out = {}
    for m, ds in by_type.items():
        imgs = [pol.line(D) for D in ds]
        out[f"concurrent_{m}_to_coplanar"] = _coplanar_lines(imgs, field) and all(is_diagonal(V) for V in imgs)
    for l, ds in by_plane.items():
        imgs = [pol.line(D) for D in ds]
        try:
            concurrent = _common_point(imgs, 3, field) is not None
        except NonGenericPosition:
            concurrent = False
        out[f"coplanar_{l}_to_concurrent"] = concurrent and all(is_diagonal(V) for V in imgs)
    return out


def random_hexagon(field: Field = RATIONAL, rng=None) -> list:
    from .complexes import random_point
    import random as _random

    rng = rng if rng is not None else _random.Random()
    while True:
        xs = [random_point(4, field, rng) for _ in range(6)]
        try:
            hexagon_planes(xs, field)
            if polarity_nullity(xs, field) == 1:
                return xs
        except Exception:
            continue


def random_line_meeting_alternate_edges(xs, field: Field = RATIONAL, rng=None) -> tuple:
    """A member of the family of lines meeting l12, l34, l56."""
    from .complexes import random_point_on

    edges = hexagon_edges(xs, field)
    t = random_point_on((xs[0], xs[1]), field, rng)
    return pg.transversal_family_cp3(edges[0], edges[2], edges[4], t, field)
