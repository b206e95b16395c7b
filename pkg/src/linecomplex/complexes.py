"""Fundamental line complexes.

A line complex assigns a line to every site of a box in Z^3.  It is
fundamental when neighbouring lines meet and, on each elementary cube, the
four intersection points on the parallel edges of any direction are
coplanar.  This module converts M-system solutions into complexes and
back, builds complexes from Cauchy data by the eighth-line construction,
and lifts complexes of CP^3 to CP^4.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from typing import Dict, Optional

from . import linalg
from . import projective as pg
from .errors import (
    CollinearityViolation,
    CollinearTriple,
    DegeneratePair,
    IdenticalLines,
    LineInPlane,
    NonGenericPosition,
    NormalizationFailure,
    SkewLines,
)
from .field import RATIONAL, Field
from .lattice import Box, Index, LatticeField, shift, sweep_order
from .msystem import (
    MatrixLattice,
    MSystemShape,
    SiteMatrix,
    fill_from_cauchy,
    inner,
    inner_scale,
    wvec,
)
from .report import Report, Tally

DIRS = (1, 2, 3)
CORNERS = tuple(itertools.product((0, 1), repeat=3))


def unit(l: int) -> tuple:
    return tuple(1 if j == l - 1 else 0 for j in range(3))


def corner(*dirs) -> tuple:
    e = [0, 0, 0]
    for l in dirs:
        e[l - 1] = 1
    return tuple(e)


def offset(n, eps) -> Index:
    return tuple(a + b for a, b in zip(n, eps))


class LineComplexLattice:
    """Lines of CP^3 (Plücker 6-tuples) or CP^4 (rank-2 subspaces) on a box."""

    def __init__(self, dim: int, box: Box, field: Field = RATIONAL, metadata: Optional[dict] = None):
        if dim not in (3, 4):
            raise ValueError(f"ambient dimension must be 3 or 4, got {dim}")
        self.dim = dim
        self.box = box
        self.field = field
        self.lines = LatticeField(box)
        self.edge_points: Dict[tuple, tuple] = {}
        self.metadata = dict(metadata or {})

    def __getitem__(self, n):
        return self.lines[tuple(n)]

    def __setitem__(self, n, line):
        self.lines[tuple(n)] = line

    def __contains__(self, n):
        return tuple(n) in self.lines

    def sites(self):
        return self.lines.sites()

    def points(self, n) -> tuple:
        line = self[n]
        if self.dim == 3:
            return pg.points_on_line(line, self.field)
        return tuple(line.basis)

    def cube(self, base) -> Dict[tuple, object]:
        return {eps: self[offset(base, eps)] for eps in CORNERS}

    def cubes(self):
        """Base corners of elementary cubes whose 8 lines are all present."""
        for b in self.box.cubes():
            if all(offset(b, e) in self for e in CORNERS):
                yield b

    def lines_equal(self, n, other_line) -> bool:
        if self.dim == 3:
            return pg.lines_equal(self[n], other_line, self.field)
        return self[n] == other_line

    def same_lines(self, other: "LineComplexLattice") -> bool:
        if self.dim != other.dim or set(self.sites()) != set(other.sites()):
            return False
        return all(self.lines_equal(n, other[n]) for n in self.sites())

    def mismatches(self, other: "LineComplexLattice") -> list:
        return [n for n in self.sites() if n not in other or not self.lines_equal(n, other[n])]

    def project(self) -> "LineComplexLattice":
        """Central projection CP^4 -> CP^3 from the last basis point."""
        if self.dim == 3:
            return self
        out = LineComplexLattice(3, self.box, self.field, self.metadata)
        for n in sweep_order(self.box):
            if n in self:
                out[n] = pg.project_line(self[n])
        for key, p in self.edge_points.items():
            out.edge_points[key] = pg.project_point(p)
        return out

    def compute_edge_points(self) -> "LineComplexLattice":
        """Cache the meet of every pair of distinct neighbouring lines."""
        for n in self.sites():
            for l in DIRS:
                m = shift(n, l)
                if m not in self or (n, l) in self.edge_points:
                    continue
                try:
                    if self.dim == 3:
                        p = pg.meet_point(self[n], self[m], self.field)
                    else:
                        p = pg.meet_point_cp4(self[n], self[m])
                except IdenticalLines:
                    continue
                self.edge_points[(n, l)] = p
        return self

    def __repr__(self):
        return f"LineComplexLattice(dim={self.dim}, box={self.box}, lines={len(self.lines)})"


# -- algebra -> geometry ------------------------------------------------------


def v_from_matrix(M: SiteMatrix) -> tuple:
    """Plücker vector (1, M^{45,45}, M44, M55, M54, M45) of the site's line."""
    m44, m45, m54, m55 = M[4, 4], M[4, 5], M[5, 4], M[5, 5]
    return (m44 * 0 + 1, m44 * m55 - m54 * m45, m44, m55, m54, m45)


def lift_points(M: SiteMatrix) -> tuple:
    """The two points a = (0,1,M44,M54), b = (-1,0,M45,M55) spanning the line."""
    one = M[4, 4] * 0 + 1
    return (one * 0, one, M[4, 4], M[5, 4]), (-one, one * 0, M[4, 5], M[5, 5])


def edge_point_formula(M: SiteMatrix, l: int) -> tuple:
    """p^l ~ M^{l5} a - M^{l4} b, the meet of the lines at n and n + e_l."""
    return (
        M[l, 4],
        M[l, 5],
        M[l, 5] * M[4, 4] - M[l, 4] * M[4, 5],
        M[l, 5] * M[5, 4] - M[l, 4] * M[5, 5],
    )


def diagonal_line(M: SiteMatrix, l: int, m: int, field: Field = RATIONAL) -> tuple:
    """V^{l,m} built from minors; the line through p^l and p^l_m."""
    return wvec(M, (l,), (m,), 4, 5, 4, 5, field)


def _check_complex_shape(lat: MatrixLattice):
    sh = lat.shape
    if sh.L != DIRS:
        raise ValueError("line complexes need N = 3")
    for k in (4, 5):
        if k not in sh.Ul or k not in sh.Ur:
            raise ValueError("line complexes need indices 4 and 5 in both label sets")


def complex_from_msystem(lat: MatrixLattice, edge_points: bool = True) -> LineComplexLattice:
    _check_complex_shape(lat)
    out = LineComplexLattice(3, lat.box, lat.field)
    for n in sweep_order(lat.box):
        out[n] = v_from_matrix(lat[n])
    if edge_points:
        for n in lat.sites():
            for l in DIRS:
                if shift(n, l) in lat.box:
                    out.edge_points[(n, l)] = edge_point_formula(lat[n], l)
    return out


def _record_null(t: Tally, v, w, field: Field, where):
    val = inner(v, w)
    if field.exact:
        return t.record(val == 0, where)
    s = inner_scale(v, w)
    return t.record(field.is_zero(val, s), where, abs(val) / s if s else 0.0)


def check_diagonals(lat: MatrixLattice, report: Report | None = None) -> Report:
    """Orthogonality relations of the diagonal vectors and the diagonal/edge-point lemma."""
    _check_complex_shape(lat)
    report = report if report is not None else Report()
    field = lat.field
    t26 = report.tally("diagonal_orthogonality")
    t30 = report.tally("opposite_diagonals")
    t31 = report.tally("diagonals_same_type")
    tjoin = report.tally("diagonal_through_edge_points")
    for n in lat.sites():
        M = lat[n]
        V = wvec(M, (), (), 4, 5, 4, 5, field)
        for l, m in itertools.permutations(DIRS, 2):
            (p,) = [x for x in DIRS if x not in (l, m)]
            D = diagonal_line(M, l, m, field)
            for other, tag in (
                (V, "V"),
                (wvec(M, (l,), (l,), 4, 5, 4, 5, field), "V^ll"),
                (wvec(M, (m,), (m,), 4, 5, 4, 5, field), "V^mm"),
                (wvec(M, (l, m), (l, m), 4, 5, 4, 5, field), "V^lm,lm"),
            ):
                _record_null(t26, D, other, field, (n, l, m, tag))
            _record_null(t31, D, diagonal_line(M, p, m, field), field, (n, l, m, p))
            np_ = shift(n, p)
            if np_ in lat:
                _record_null(t30, D, diagonal_line(lat[np_], l, m, field), field, (n, l, m, p))
            nm = shift(n, m)
            if nm in lat:
                a = edge_point_formula(M, l)
                b = edge_point_formula(lat[nm], l)
                try:
                    J = pg.line_from_points(a, b, field)
                except DegeneratePair:
                    # the join is undefined; the shared point must still lie on D
                    tjoin.record(pg.point_on_line(a, D, field), (n, l, m, "coincident edge points"))
                    continue
                ok = pg.lines_equal(J, D, field)
                tjoin.record(ok, (n, l, m), None if field.exact else linalg.proportionality_residual(J, D))
    return report


# -- the elementary cube ------------------------------------------------------


@dataclass
class CubeReport:
    edges: Dict[tuple, bool] = dc_field(default_factory=dict)
    coplanarity: Dict[int, bool] = dc_field(default_factory=dict)
    concurrency: Dict[int, Optional[tuple]] = dc_field(default_factory=dict)
    concurrent: Dict[int, bool] = dc_field(default_factory=dict)
    census: Optional[tuple] = None
    degenerate: bool = False
    residuals: Dict[str, float] = dc_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.edges.values()) and all(self.coplanarity.values()) and all(self.concurrent.values())


def cube_edges():
    """The 12 edges of the unit cube as (start corner, direction)."""
    for eps in CORNERS:
        for l in DIRS:
            if eps[l - 1] == 0:
                yield eps, l


def _meet(X, Y, dim, field):
    if dim == 3:
        return pg.meet_point(X, Y, field)
    return pg.meet_point_cp4(X, Y)


def _rank(points, field):
    return linalg.rank(list(points), field)


def check_fundamental_cube(lines: Dict[tuple, object], field: Field = RATIONAL, dim: int = 3, census: bool = True) -> CubeReport:
    """Incidence report for the 8 lines of a cube keyed by corner offsets."""
    rep = CubeReport()
    pts: Dict[tuple, Optional[tuple]] = {}
    identical = False
    for eps, l in cube_edges():
        X, Y = lines[eps], lines[offset(eps, unit(l))]
        if dim == 3:
            ok = pg.lines_intersect(X, Y, field)
            if not field.exact:
                s = inner_scale(X, Y)
                rep.residuals["edge"] = max(rep.residuals.get("edge", 0.0), abs(inner(X, Y)) / s if s else 0.0)
        else:
            ok = pg.lines_meet_cp4(X, Y)
        rep.edges[(eps, l)] = ok
        p = None
        if ok:
            try:
                p = _meet(X, Y, dim, field)
            except IdenticalLines:
                identical = True
            except (SkewLines, NonGenericPosition):
                rep.edges[(eps, l)] = False
        pts[(eps, l)] = p
    rep.degenerate = identical
    for l in DIRS:
        group = [pts[(eps, l)] for eps in CORNERS if eps[l - 1] == 0]
        if any(p is None for p in group):
            # coincident neighbours make the condition vacuous; skew ones fail it
            rep.coplanarity[l] = identical and all(rep.edges.values())
            continue
        rep.coplanarity[l] = _rank(group, field) <= 3
        if not field.exact:
            rep.residuals["coplanarity"] = max(rep.residuals.get("coplanarity", 0.0), _coplanarity_residual(group))
    diagonals = {}
    for m in DIRS:
        others = [x for x in DIRS if x != m]
        diag = []
        for l in others:
            (p,) = [x for x in others if x != l]
            diag.append((pts[(corner(), l)], pts[(corner(m), l)]))
            diag.append((pts[(corner(p), l)], pts[(corner(p, m), l)]))
        diagonals[m] = diag
        rep.concurrency[m] = None
        if any(a is None or b is None for a, b in diag):
            rep.concurrent[m] = rep.coplanarity[others[0]] and rep.coplanarity[others[1]] and identical
            continue
        rep.concurrent[m] = False
        # a diagonal through two coincident edge points is undefined and drops out
        live = [(a, b) for a, b in diag if not _same_point(a, b, dim, field)]
        if len(live) < len(diag):
            rep.degenerate = True
        if len(live) < 2:
            rep.concurrent[m] = True
            continue
        try:
            joins = [_join(a, b, dim, field) for a, b in live]
            c = _common_point(joins, dim, field)
        except (DegeneratePair, NonGenericPosition, IdenticalLines, SkewLines):
            continue
        if c is not None:
            rep.concurrency[m] = c
            rep.concurrent[m] = True
    if census and dim == 3 and not rep.degenerate and rep.ok:
        rep.census = _census(lines, pts, diagonals, rep.concurrency, field)
    return rep


def _same_point(a, b, dim, field) -> bool:
    return _rank([a, b], field) < 2


def _coplanarity_residual(points) -> float:
    return linalg.smallest_singular_ratio(points, len(points[0]))


def _join(a, b, dim, field):
    if dim == 3:
        return pg.line_from_points(a, b, field)
    return pg.line_cp4(a, b, field)


def _common_point(joins, dim, field):
    first, rest = joins[0], joins[1:]
    for j in rest:
        try:
            c = _meet(first, j, dim, field)
        except IdenticalLines:
            continue
        if dim == 3:
            return c if all(pg.point_on_line(c, x, field) for x in joins) else None
        return c if all(x.contains(c) for x in joins) else None
    raise NonGenericPosition("all diagonals coincide")


def _census(lines, pts, diagonals, concurrency, field):
    """(points, lines, lines per point, points per line) of the cube configuration."""
    points = [p for p in pts.values()] + [concurrency[m] for m in DIRS]
    all_lines = [lines[eps] for eps in CORNERS]
    for m in DIRS:
        all_lines.extend(pg.line_from_points(a, b, field) for a, b in diagonals[m])
    inc = [[pg.point_on_line(p, L, field) for L in all_lines] for p in points]
    per_point = {sum(row) for row in inc}
    per_line = {sum(inc[i][j] for i in range(len(points))) for j in range(len(all_lines))}
    distinct_points = len({linalg.normalize(p, field) for p in points}) if field.exact else len(points)
    distinct_lines = len({linalg.normalize(L, field) for L in all_lines}) if field.exact else len(all_lines)
    lpp = per_point.pop() if len(per_point) == 1 else None
    ppl = per_line.pop() if len(per_line) == 1 else None
    return (distinct_points, distinct_lines, lpp, ppl)


def verify_complex(cx: LineComplexLattice, report: Report | None = None, census: bool = False) -> Report:
    """Edge intersections on every edge and cube conditions on every cube."""
    report = report if report is not None else Report()
    field = cx.field
    t_edge = report.tally("edge_intersections")
    for n in cx.sites():
        for l in DIRS:
            m = shift(n, l)
            if m not in cx:
                continue
            if cx.dim == 3:
                X, Y = cx[n], cx[m]
                if field.exact:
                    t_edge.record(pg.lines_intersect(X, Y, field), (n, l))
                else:
                    s = inner_scale(X, Y)
                    t_edge.record(pg.lines_intersect(X, Y, field), (n, l), abs(inner(X, Y)) / s if s else 0.0)
            else:
                t_edge.record(pg.lines_meet_cp4(cx[n], cx[m]), (n, l))
    t_cop = report.tally("coplanarity")
    t_con = report.tally("concurrency")
    t_cen = report.tally("census") if census and cx.dim == 3 else None
    for b in cx.cubes():
        rep = check_fundamental_cube(cx.cube(b), field, cx.dim, census=t_cen is not None)
        res = rep.residuals.get("coplanarity")
        for l in DIRS:
            t_cop.record(rep.coplanarity[l], {"cube": list(b), "direction": l}, res)
            t_con.record(rep.concurrent[l], {"cube": list(b), "diagonal_type": l})
        if t_cen is not None and not rep.degenerate:
            t_cen.record(rep.census == (15, 20, 4, 3), {"cube": list(b), "census": rep.census})
    return report


# the six edge points where the middle lines of a cube meet, in hexagon order
HEXAGON_EDGE_POINTS = (((1, 0, 0), 3), ((1, 0, 0), 2), ((0, 1, 0), 1), ((0, 1, 0), 3), ((0, 0, 1), 2), ((0, 0, 1), 1))


def cube_in_general_position(lines: Dict[tuple, object], field: Field = RATIONAL) -> bool:
    """Full incidence census and no four vertices of the middle hexagon coplanar.

    The eighth-line construction and the hexagon polarity are only defined
    for such cubes; special position shows up as coincident edge points or
    a singular polarity.
    """
    rep = check_fundamental_cube(lines, field, 3, census=True)
    if not rep.ok or rep.degenerate or rep.census != (15, 20, 4, 3):
        return False
    try:
        xs = [pg.meet_point(lines[eps], lines[offset(eps, unit(l))], field) for eps, l in HEXAGON_EDGE_POINTS]
    except (IdenticalLines, SkewLines, NonGenericPosition):
        return False
    return all(_rank(list(q), field) == 4 for q in itertools.combinations(xs, 4))


def general_position(cx: LineComplexLattice) -> bool:
    return cx.dim == 3 and all(cube_in_general_position(cx.cube(b), cx.field) for b in cx.cubes())


# -- the eighth line ----------------------------------------------------------


def _all_equal(lines, field) -> bool:
    return all(pg.lines_equal(lines[0], x, field) for x in lines[1:])


def eighth_points(l, l1, l2, l3, l12, l23, l13, field: Field = RATIONAL) -> tuple:
    """The points p3_12, p1_23, p2_13 where l123 must meet l12, l23, l13."""
    f = field

    def mp(X, Y):
        return pg.meet_point(X, Y, f)

    p1, p2, p3 = mp(l, l1), mp(l, l2), mp(l, l3)
    q3_12 = pg.plane_line_meet(pg.plane_from_points(p3, mp(l1, l13), mp(l2, l23), f), l12, f)
    q1_23 = pg.plane_line_meet(pg.plane_from_points(p1, mp(l2, l12), mp(l3, l13), f), l23, f)
    q2_13 = pg.plane_line_meet(pg.plane_from_points(p2, mp(l1, l12), mp(l3, l23), f), l13, f)
    return q3_12, q1_23, q2_13


def eighth_line(l, l1, l2, l3, l12, l23, l13, field: Field = RATIONAL, site=None) -> tuple:
    """The unique line completing seven lines to a fundamental cube."""
    seven = [l, l1, l2, l3, l12, l23, l13]
    if _all_equal(seven, field):
        return l
    try:
        a, b, c = eighth_points(l, l1, l2, l3, l12, l23, l13, field)
    except (SkewLines, IdenticalLines, CollinearTriple, LineInPlane, NonGenericPosition) as exc:
        raise NonGenericPosition(f"eighth-line construction failed: {exc}", site) from exc
    if not pg.collinear([a, b, c], field):
        if field.exact:  # pragma: no cover - excluded by Desargues' theorem
            raise NonGenericPosition("constructed points are not collinear", site)
        raise CollinearityViolation(f"constructed points not collinear within tolerance at {site}")
    try:
        if field.exact:
            for x, y in ((a, b), (a, c), (b, c)):
                if not linalg.proportional(x, y, field):
                    return pg.line_from_points(x, y, field)
            raise DegeneratePair("constructed points coincide")
        x, y = max(((a, b), (a, c), (b, c)), key=lambda pq: linalg.proportionality_residual(*pq))
        return pg.line_from_points(x, y, field)
    except DegeneratePair as exc:
        raise NonGenericPosition(f"eighth line undetermined: {exc}", site) from exc


def desargues_determinant(l, l1, l2, l3, l12, l23, l13, field: Field = RATIONAL):
    """Sum of squared 3x3 minors of the three constructed points (zero iff collinear)."""
    pts = eighth_points(l, l1, l2, l3, l12, l23, l13, field)
    total = field.zero
    for cols in itertools.combinations(range(4), 3):
        d = linalg.det([[p[c] for c in cols] for p in pts], field)
        total = total + d * d
    return total


def eighth_from_cube(lines: Dict[tuple, object], missing: tuple, field: Field = RATIONAL, site=None):
    """The line at corner ``missing`` from the other seven (by reflecting the cube)."""
    def at(eps):
        return lines[tuple(abs(e + m - 1) for e, m in zip(eps, missing))]

    return eighth_line(
        at((0, 0, 0)), at((1, 0, 0)), at((0, 1, 0)), at((0, 0, 1)),
        at((1, 1, 0)), at((0, 1, 1)), at((1, 0, 1)), field, site,
    )


# -- geometric Cauchy problems ------------------------------------------------


def face_sites(box: Box):
    """Sites on the three coordinate faces through the lower corner."""
    return [n for n in sweep_order(box) if any(x == lo for x, (lo, _) in zip(n, box.bounds))]


def _fill(cauchy, box, field, dim, step, targets=None, rng=None):
    cx = LineComplexLattice(dim, box, field)
    for n, line in cauchy.items():
        cx[n] = line
    wanted = set(box.sites()) if targets is None else set(targets)
    levels: Dict[int, list] = {}
    for n in sweep_order(box):
        if n not in cx:
            levels.setdefault(sum(n), []).append(n)
    for lev in sorted(levels):
        sites = list(levels[lev])
        if rng is not None:
            rng.shuffle(sites)
        for n in sites:
            base = tuple(x - 1 for x in n)
            if base in box and all(offset(base, e) in cx for e in CORNERS if e != (1, 1, 1)):
                cx[n] = step(cx, base, n)
    for lev in sorted(levels, reverse=True):
        for n in levels[lev]:
            if n in cx or n not in wanted or dim == 4:
                continue
            top = offset(n, (1, 1, 1))
            if top in box and all(offset(n, e) in cx for e in CORNERS if e != (0, 0, 0)):
                lines = {e: cx[offset(n, e)] for e in CORNERS if e != (0, 0, 0)}
                cx[n] = eighth_from_cube(lines, (0, 0, 0), field, n)
    missing = sorted(wanted - set(cx.sites()))
    if missing:
        raise ValueError(f"Cauchy data do not determine {len(missing)} site(s), e.g. {missing[0]}")
    return cx


def fill_geometric_cp3(cauchy: Dict[Index, tuple], box: Box, field: Field = RATIONAL, targets=None, rng=None) -> LineComplexLattice:
    """Complete Cauchy lines to a fundamental complex by repeated eighth-line steps."""
    def step(cx, base, n):
        lines = {e: cx[offset(base, e)] for e in CORNERS if e != (1, 1, 1)}
        return eighth_from_cube(lines, (1, 1, 1), field, n)

    return _fill(cauchy, box, field, 3, step, targets, rng)


def fill_geometric_cp4(cauchy: Dict[Index, pg.Subspace], box: Box, field: Field = RATIONAL, targets=None, rng=None) -> LineComplexLattice:
    """Each new line of CP^4 is the transversal of its three lower neighbours."""
    def step(cx, base, n):
        try:
            return pg.transversal_cp4(*(cx[shift(n, l, -1)] for l in DIRS))
        except NonGenericPosition as exc:
            raise NonGenericPosition(str(exc), n) from exc

    return _fill(cauchy, box, field, 4, step, targets, rng)


# -- random data --------------------------------------------------------------


def random_point(dim: int, field: Field, rng) -> tuple:
    while True:
        p = tuple(field.random(rng) for _ in range(dim))
        if not pg.is_zero_point(p, field):
            return p


def random_point_on(points, field: Field, rng) -> tuple:
    a, b = points
    return linalg.add(linalg.scale(field.random(rng), a), linalg.scale(field.random(rng), b))


def _line(dim, a, b, field):
    return pg.line_from_points(a, b, field) if dim == 3 else pg.line_cp4(a, b, field)


def _points(dim, line, field):
    return pg.points_on_line(line, field) if dim == 3 else tuple(line.basis)


def random_cauchy_lines(box: Box, dim: int = 3, field: Field = RATIONAL, rng=None) -> Dict[Index, object]:
    """Random lines on the lower faces of ``box`` in which neighbours meet."""
    rng = rng if rng is not None else random.Random()
    out: Dict[Index, object] = {}
    for n in face_sites(box):
        back = [shift(n, l, -1) for l in DIRS if shift(n, l, -1) in box]
        if not back:
            out[n] = _line(dim, random_point(dim + 1, field, rng), random_point(dim + 1, field, rng), field)
        elif len(back) == 1:
            p = random_point_on(_points(dim, out[back[0]], field), field, rng)
            out[n] = _line(dim, p, random_point(dim + 1, field, rng), field)
        elif len(back) == 2:
            p = random_point_on(_points(dim, out[back[0]], field), field, rng)
            q = random_point_on(_points(dim, out[back[1]], field), field, rng)
            out[n] = _line(dim, p, q, field)
        else:  # pragma: no cover - face sites have a coordinate at the lower bound
            raise AssertionError(n)
    return out


def random_seven_lines(field: Field = RATIONAL, rng=None) -> Dict[tuple, tuple]:
    """Seven lines of a cube (all but the top corner) with the nine required meets."""
    rng = rng if rng is not None else random.Random()
    box = Box.cube(0, 1)
    lines = random_cauchy_lines(box, 3, field, rng)
    return {e: lines[e] for e in CORNERS if e != (1, 1, 1)}


def random_constrained_cube(field: Field = RATIONAL, rng=None) -> Dict[tuple, tuple]:
    """Eight lines imposing only the coplanarity of the p^3 points.

    l123 is the line through the point of l12 fixed by that plane which
    meets l13 and l23.
    """
    rng = rng if rng is not None else random.Random()
    lines = dict(random_seven_lines(field, rng))
    l, l1, l2, l3 = lines[(0, 0, 0)], lines[(1, 0, 0)], lines[(0, 1, 0)], lines[(0, 0, 1)]
    l12, l23, l13 = lines[(1, 1, 0)], lines[(0, 1, 1)], lines[(1, 0, 1)]
    f = field
    plane = pg.plane_from_points(pg.meet_point(l, l3, f), pg.meet_point(l1, l13, f), pg.meet_point(l2, l23, f), f)
    q = pg.plane_line_meet(plane, l12, f)
    lines[(1, 1, 1)] = _through_meeting(q, l13, l23, f)
    return lines


def _through_meeting(q, A, B, field):
    """The line through q meeting lines A and B (q on neither)."""
    plane = pg.plane_through_line_and_point(A, q, field)
    z = pg.plane_line_meet(plane, B, field)
    return pg.line_from_points(q, z, field)


def generated_complex(seed: int, box: Box | None = None, field: Field = RATIONAL):
    """A random M-lattice on ``box`` and its line complex."""
    from .msystem import generate

    box = box if box is not None else Box.cube(0, 2)
    lat, _ = generate(MSystemShape.square(3, 5), box, field, seed=seed)
    return lat, complex_from_msystem(lat)


# -- lifting to CP^4 ----------------------------------------------------------


def _free_coord(field, rng):
    return field.random(rng)


def _lift_forced(lifted: pg.Subspace, p, site):
    try:
        return pg.lift_point_on_line(lifted, p)
    except NonGenericPosition as exc:
        raise NonGenericPosition(str(exc), site) from exc


def lift_to_cp4(cx: LineComplexLattice, seed: int | None = 0, rng=None) -> LineComplexLattice:
    """A complex of CP^4 whose projection from e4 is ``cx``.

    Face lines are lifted one at a time, each through the lifts of its meets
    with already lifted lower neighbours plus free fifth coordinates; every
    interior line is the transversal of its three lower neighbours.
    """
    if cx.dim != 3:
        raise ValueError("only complexes of CP^3 can be lifted")
    field = cx.field
    rng = rng if rng is not None else random.Random(seed)
    out = LineComplexLattice(4, cx.box, field, {"lift_seed": seed})
    for n in sweep_order(cx.box):
        back = [shift(n, l, -1) for l in DIRS if shift(n, l, -1) in cx.box]
        line = cx[n]
        if len(back) == 3:
            try:
                out[n] = pg.transversal_cp4(*(out[m] for m in back))
            except NonGenericPosition as exc:
                raise NonGenericPosition(str(exc), n) from exc
            continue
        same = [m for m in back if pg.lines_equal(line, cx[m], field)]
        if same:
            out[n] = out[same[0]]
            for m in back:
                if not pg.lines_meet_cp4(out[n], out[m]):
                    raise NonGenericPosition("coincident neighbour breaks the lift", n)
            continue
        a, b = pg.points_on_line(line, field)
        if not back:
            P = a + (_free_coord(field, rng),)
            Q = b + (_free_coord(field, rng),)
        elif len(back) == 1:
            p = pg.meet_point(line, cx[back[0]], field)
            P = _lift_forced(out[back[0]], p, n)
            q = b if linalg.proportional(a, p, field) else a
            Q = q + (_free_coord(field, rng),)
        else:
            p = pg.meet_point(line, cx[back[0]], field)
            q = pg.meet_point(line, cx[back[1]], field)
            if linalg.proportional(p, q, field):
                raise NonGenericPosition("neighbour meets coincide", n)
            P = _lift_forced(out[back[0]], p, n)
            Q = _lift_forced(out[back[1]], q, n)
        out[n] = pg.line_cp4(P, Q, field)
    return out


def lift_cube_cp4(lines: Dict[tuple, tuple], field: Field = RATIONAL, seed: int | None = 0, rng=None) -> Dict[tuple, pg.Subspace]:
    """Lift one fundamental cube by the five-point chase; l123 is a transversal."""
    rng = rng if rng is not None else random.Random(seed)
    f = field
    L = {k: lines[corner(*k)] for k in [(), (1,), (2,), (3,), (1, 2), (2, 3), (1, 3), (1, 2, 3)]}

    def p(a, b):
        return pg.meet_point(L[a], L[b], f)

    def free(x):
        return tuple(x) + (_free_coord(f, rng),)

    # chosen: p^2_3, p^3_2, p^1_2, p^2_1, p^3_1
    P23, P32 = free(p((3,), (2, 3))), free(p((2,), (2, 3)))
    P12, P21 = free(p((2,), (1, 2))), free(p((1,), (1, 2)))
    P31 = free(p((1,), (1, 3)))
    up = {
        (2, 3): pg.line_cp4(P23, P32, f),
        (2,): pg.line_cp4(P32, P12, f),
        (1, 2): pg.line_cp4(P12, P21, f),
        (1,): pg.line_cp4(P21, P31, f),
    }
    # forced: p^1, p^2 then l; p^3 then l3; p^1_3 then l13
    P1 = _lift_forced(up[(1,)], p((), (1,)), None)
    P2 = _lift_forced(up[(2,)], p((), (2,)), None)
    up[()] = pg.line_cp4(P1, P2, f)
    P3 = _lift_forced(up[()], p((), (3,)), None)
    up[(3,)] = pg.line_cp4(P3, P23, f)
    P13 = _lift_forced(up[(3,)], p((3,), (1, 3)), None)
    up[(1, 3)] = pg.line_cp4(P13, P31, f)
    up[(1, 2, 3)] = pg.transversal_cp4(up[(1, 2)], up[(2, 3)], up[(1, 3)])
    return {corner(*k): v for k, v in up.items()}


# -- geometry -> algebra ------------------------------------------------------


def normalized_lift(V, field: Field = RATIONAL, site=None) -> tuple:
    """(M44, M45, M54, M55) read off a Plücker vector with g01 != 0."""
    g01, _, g02, g13, g03, g12 = V
    if field.exact and g01 == 0 or (not field.exact and field.is_zero(g01, linalg.vec_norm(V))):
        raise NormalizationFailure(f"Plücker coordinate g01 vanishes at {site}; apply a change of chart")
    return g02 / g01, g12 / g01, g03 / g01, g13 / g01


def _ab_on_lifted(X: pg.Subspace, field: Field, site):
    """The points of X with leading coordinates (0, 1) and (-1, 0)."""
    u, v = X.basis
    d = u[0] * v[1] - u[1] * v[0]
    if field.exact and d == 0 or (not field.exact and field.is_zero(d, linalg.vec_norm(u) * linalg.vec_norm(v))):
        raise NormalizationFailure(f"lifted line at {site} leaves the normalization chart")
    # s u + t v with (s u0 + t v0, s u1 + t v1) = target
    def solve(x0, x1):
        s = (x0 * v[1] - x1 * v[0]) / d
        t = (u[0] * x1 - u[1] * x0) / d
        return linalg.add(linalg.scale(s, u), linalg.scale(t, v))

    one = u[0] * 0 + 1
    a = solve(one * 0, one)
    b = solve(-one, one * 0)
    return a[2:], b[2:]


@dataclass
class Extraction:
    lattice: MatrixLattice            # the 5x5 solution
    extended: MatrixLattice           # the 6x5 solution including the auxiliary row
    lift: LineComplexLattice
    a: Dict[Index, tuple]
    b: Dict[Index, tuple]
    T: Dict[tuple, tuple]             # ungauged tangent vectors, keyed (n, l)
    I: Dict[tuple, object]            # ungauged expansion coefficients, keyed (n, m, l)
    phi: Dict[tuple, object]
    N: Dict[tuple, object]            # gauged rotation coefficients N^{lk}, keyed (n, l, k)
    Mll: Dict[tuple, object]
    report: Report
    constant: bool = False


def _eq(x, y, field, scale=None):
    if field.exact:
        return x == y
    s = scale if scale is not None else max(abs(x), abs(y), 1.0)
    return field.equal(x, y, s)


def _constant_extraction(cx: LineComplexLattice, seed) -> Extraction:
    field = cx.field
    m44, m45, m54, m55 = normalized_lift(cx[next(iter(cx.sites()))], field)
    shape = MSystemShape.square(3, 5)
    lat = MatrixLattice(shape, cx.box, field)
    for n in sweep_order(cx.box):
        rows = [[field.one if i == k else field.zero for k in range(1, 6)] for i in range(1, 6)]
        rows[3][3], rows[3][4], rows[4][3], rows[4][4] = m44, m45, m54, m55
        lat.matrices[n] = SiteMatrix(rows, shape.Ul, shape.Ur)
    rep = Report()
    rep.notes.append("constant complex: identity gauge")
    return Extraction(lat, lat, None, {}, {}, {}, {}, {}, {}, {}, rep, constant=True)


def extract_msystem_detailed(cx: LineComplexLattice, seed: int | None = 0) -> Extraction:
    """Recover an M-system solution from a fundamental complex of CP^3."""
    if cx.dim != 3:
        raise ValueError("extraction works on complexes of CP^3")
    box = cx.box
    if any(lo != 0 for lo, _ in box.bounds):
        raise ValueError("extraction needs a box anchored at the origin")
    field = cx.field
    for n in cx.sites():
        normalized_lift(cx[n], field, n)
    sites = sweep_order(box)
    if all(pg.lines_equal(cx[sites[0]], cx[n], field) for n in sites):
        return _constant_extraction(cx, seed)

    rep = Report()
    lift = lift_to_cp4(cx, seed)
    a, b = {}, {}
    for n in sites:
        a[n], b[n] = _ab_on_lifted(lift[n], field, n)

    # tangent directions and the ratios N^{l4} : N^{l5}
    T, X, Y = {}, {}, {}
    t_par = rep.tally("parallel_increments")
    for n in sites:
        for l in DIRS:
            m = shift(n, l)
            if m not in box:
                continue
            da, db = linalg.sub(a[m], a[n]), linalg.sub(b[m], b[n])
            s = linalg.vec_norm(a[n]) + linalg.vec_norm(b[n]) + 1.0
            if not linalg.is_zero_vector(da, field, s):
                T[(n, l)] = da
                X[(n, l)] = field.one
                Y[(n, l)] = _ratio(db, da)
            elif not linalg.is_zero_vector(db, field, s):
                T[(n, l)] = db
                X[(n, l)] = field.zero
                Y[(n, l)] = field.one
            else:
                raise NonGenericPosition(f"lines at {n} and {m} coincide", n)
            t_par.record(linalg.is_zero_vector(linalg.sub(db, linalg.scale(Y[(n, l)], T[(n, l)])), field, s), (n, l))

    # planar quadrilaterals: T^l_m = I'^{ml} T^l + N'^{ml} T^m
    I, Np = {}, {}
    for n in sites:
        for l, m in itertools.permutations(DIRS, 2):
            if offset(n, offset(unit(l), unit(m))) not in box:
                continue
            Tl, Tm, Tlm = T[(n, l)], T[(n, m)], T[(shift(n, m), l)]
            ns = linalg.nullspace(linalg.transpose([Tl, Tm, linalg.scale(-1, Tlm)]), field, 3)
            if len(ns) != 1 or _is_zero(ns[0][2], field):
                raise NonGenericPosition(f"tangent vectors at {n} are not in general position", n)
            c = ns[0]
            I[(n, m, l)] = c[0] / c[2]
            Np[(n, m, l)] = c[1] / c[2]

    t49 = rep.tally("expansion_compatibility")
    for (n, m, l), val in I.items():
        for p in DIRS:
            if p in (l, m) or (shift(n, p), m, l) not in I or (shift(n, m), p, l) not in I:
                continue
            lhs = I[(shift(n, p), m, l)] * I[(n, p, l)]
            rhs = I[(shift(n, m), p, l)] * val
            t49.record(_eq(lhs, rhs, field), (n, m, l, p))

    # gauge: phi^l = 1 on the n_l axis, phi^l_m = phi^l / I'^{ml}
    phi = {}
    t_phi = rep.tally("gauge_path_independence")
    for n in sites:
        for l in DIRS:
            if shift(n, l) not in box:
                continue
            if all(n[j - 1] == 0 for j in DIRS if j != l):
                phi[(n, l)] = field.one
                continue
            vals = []
            for m in DIRS:
                if m != l and n[m - 1] > 0:
                    prev = shift(n, m, -1)
                    vals.append(phi[(prev, l)] / I[(prev, m, l)])
            phi[(n, l)] = vals[0]
            for v in vals[1:]:
                t_phi.record(_eq(v, vals[0], field), (n, l))

    N = {}
    for (n, l), x in X.items():
        N[(n, l, 4)] = x / phi[(n, l)]
        N[(n, l, 5)] = Y[(n, l)] / phi[(n, l)]
    for (n, m, l), i_ml in I.items():
        N[(n, m, l)] = phi[(n, l)] * Np[(n, m, l)] / (i_ml * phi[(n, m)])

    _darboux_checks(N, box, field, rep)

    # potentials: M^{ll} = 1 on the n_l axis, M^{ll}_m = (1 - N^{lm} N^{ml}) M^{ll}
    Mll = {}
    t54 = rep.tally("potential_path_independence")
    for n in sites:
        for l in DIRS:
            if all(n[j - 1] == 0 for j in DIRS if j != l):
                Mll[(n, l)] = field.one
                continue
            vals = []
            for m in DIRS:
                if m == l or n[m - 1] == 0:
                    continue
                prev = shift(n, m, -1)
                if (prev, l, m) in N and (prev, m, l) in N and (prev, l) in Mll:
                    vals.append((1 - N[(prev, l, m)] * N[(prev, m, l)]) * Mll[(prev, l)])
            if vals:
                Mll[(n, l)] = vals[0]
                for v in vals[1:]:
                    t54.record(_eq(v, vals[0], field), (n, l))

    extended = _assemble(cx, a, b, T, phi, N, Mll, field)
    t_rep = rep.tally("lift_reproduced")
    for n in sites:
        M = extended[n]
        got_a = (M[4, 4], M[5, 4], M[6, 4])
        got_b = (M[4, 5], M[5, 5], M[6, 5])
        s = linalg.vec_norm(a[n]) + linalg.vec_norm(b[n]) + 1.0
        ok = linalg.is_zero_vector(linalg.sub(got_a, a[n]), field, s) and linalg.is_zero_vector(linalg.sub(got_b, b[n]), field, s)
        t_rep.record(ok, n)
    lattice = extended.restrict(tuple(range(1, 6)), tuple(range(1, 6)))
    return Extraction(lattice, extended, lift, a, b, T, I, phi, N, Mll, rep)


def _is_zero(x, field):
    return x == 0 if field.exact else field.is_zero(x, 1.0)


def _ratio(u, v):
    """The scalar c with u = c v, read at the largest entry of v."""
    j = max(range(len(v)), key=lambda i: abs(complex(v[i])))
    return u[j] / v[j]


def darboux_step(N, n, l, m, k):
    """N^{lk}_m from the discrete Darboux system (same form for k in L and k in {4, 5})."""
    return (N[(n, l, k)] + N[(n, l, m)] * N[(n, m, k)]) / (1 - N[(n, l, m)] * N[(n, m, l)])


def _darboux_checks(N, box, field, rep: Report):
    t51 = rep.tally("darboux_rotation")
    t52 = rep.tally("darboux_combescure")
    t53 = rep.tally("darboux_conservation")
    for (n, l, k), val in list(N.items()):
        for m in DIRS:
            if m in (l, k):
                continue
            nxt = (shift(n, m), l, k)
            if nxt not in N or (n, l, m) not in N or (n, m, k) not in N or (n, m, l) not in N:
                continue
            ok = _eq(N[nxt], darboux_step(N, n, l, m, k), field)
            (t51 if k in DIRS else t52).record(ok, (n, l, m, k))
    for n in box.sites():
        for l in DIRS:
            for m, p in itertools.permutations([x for x in DIRS if x != l], 2):
                keys = [(n, l, m), (n, m, l), (n, l, p), (n, p, l), (shift(n, m), l, p), (shift(n, m), p, l),
                        (shift(n, p), l, m), (shift(n, p), m, l)]
                if not all(k in N for k in keys):
                    continue
                xi = lambda s, i, j: 1 - N[(s, i, j)] * N[(s, j, i)]
                lhs = xi(n, l, m) * xi(shift(n, m), l, p)
                rhs = xi(n, l, p) * xi(shift(n, p), l, m)
                t53.record(_eq(lhs, rhs, field), (n, l, m, p))


def _assemble(cx, a, b, T, phi, N, Mll, field) -> MatrixLattice:
    """Cauchy data of the 6x5 system from the gauged Darboux data, then fill."""
    box = cx.box
    shape = MSystemShape(DIRS, (1, 2, 3, 4, 5, 6), (1, 2, 3, 4, 5))
    origin = (0, 0, 0)
    data = {}
    for j, k in itertools.product((4, 5, 6), (4, 5)):
        data[(j, k, origin)] = (a if k == 4 else b)[origin][j - 4]
    for l in DIRS:
        top = box.bounds[l - 1][1]
        for t in range(top + 1):
            n = shift(origin, l, t)
            data[(l, l, n)] = field.one
            has = (n, l) in T
            for k in (4, 5):
                data[(l, k, n)] = -N[(n, l, k)] if has else field.zero
            key = (n, l) if has else (shift(n, l, -1), l)
            vec = T[key] if key in T else (field.one, field.zero, field.zero)
            for j in (4, 5, 6):
                data[(j, l, n)] = phi.get(key, field.one) * vec[j - 4]
    for l, m in itertools.permutations(DIRS, 2):
        (p,) = [x for x in DIRS if x not in (l, m)]
        for n in box.sites():
            if n[p - 1] != 0:
                continue
            if (n, m, l) in N and (n, l, m) in N:
                mll = Mll[(n, l)]
                data[(l, m, n)] = -N[(n, l, m)] * mll
            else:
                data[(l, m, n)] = field.zero
    return fill_from_cauchy(shape, data, box, field)


def extract_msystem(cx: LineComplexLattice, seed: int | None = 0) -> MatrixLattice:
    return extract_msystem_detailed(cx, seed).lattice


def projective_transform(cx: LineComplexLattice, A) -> LineComplexLattice:
    """Apply the point map x -> A x to every line (and cached edge point)."""
    if cx.dim != 3:
        raise ValueError("chart changes are defined for complexes of CP^3")
    field = cx.field
    out = LineComplexLattice(3, cx.box, field, cx.metadata)
    for n in sweep_order(cx.box):
        if n in cx:
            p, q = cx.points(n)
            out[n] = pg.line_from_points(linalg.mat_vec(A, p), linalg.mat_vec(A, q), field)
    for key, p in cx.edge_points.items():
        out.edge_points[key] = linalg.mat_vec(A, p)
    return out


def random_chart(field: Field = RATIONAL, rng=None):
    """A random invertible 4x4 matrix."""
    rng = rng if rng is not None else random.Random()
    while True:
        A = [[field.random(rng) for _ in range(4)] for _ in range(4)]
        if linalg.rank(A, field) == 4:
            return A


def rechart(cx: LineComplexLattice, rng=None, tries: int = 50):
    """Move a complex into the chart g01 != 0 at every site by a random transformation."""
    rng = rng if rng is not None else random.Random()
    for _ in range(tries):
        A = random_chart(cx.field, rng)
        moved = projective_transform(cx, A)
        try:
            for n in moved.sites():
                normalized_lift(moved[n], cx.field, n)
        except NormalizationFailure:
            continue
        return moved, A
    raise NormalizationFailure("no chart found")
