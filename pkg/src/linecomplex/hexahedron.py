"""The hexahedron recurrence and its equivalence with the 3x3 M-system.

Four fields h, hx, hy, hz live on Z^3.  One step on the cube with base n
produces hx at n+e1, hy at n+e2, hz at n+e3 and h at n+e1+e2+e3.  Cauchy
data: h on the three lower faces of a box, hx on the face n1 = 0, hy on
n2 = 0 and hz on n3 = 0.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict

from .errors import DivisionByZero, SingularPivot
from .field import RATIONAL, Field, GaussRational
from .lattice import Box, Index, LatticeField, shift, sweep_order
from .msystem import MatrixLattice, MSystemShape, SiteMatrix, minor
from .report import Report, Tally

SHAPE3 = MSystemShape.square(3)
FIELDS = ("h", "hx", "hy", "hz")


@dataclass
class HexState:
    box: Box
    field: Field
    h: LatticeField
    hx: LatticeField
    hy: LatticeField
    hz: LatticeField

    @classmethod
    def empty(cls, box: Box, field: Field = RATIONAL) -> "HexState":
        return cls(box, field, *(LatticeField(box) for _ in FIELDS))

    def fields(self) -> Dict[str, LatticeField]:
        return {"h": self.h, "hx": self.hx, "hy": self.hy, "hz": self.hz}

    def __eq__(self, other):
        if not isinstance(other, HexState):
            return NotImplemented
        return self.box == other.box and all(
            getattr(self, k) == getattr(other, k) for k in FIELDS
        )


def _nz(x, what):
    if x == 0:
        raise DivisionByZero(f"{what} vanishes")
    return x


def hex_step(h, h1, h2, h3, h12, h13, h23, hx, hy, hz, printed: bool = False):
    """(hx_1, hy_2, hz_3, h_123) from the values on one cube.

    ``printed=True`` uses the variant with h h1 h13 and h h1 h12 in the
    second and third equations; it is kept only to show that it breaks the
    equivalence with the M-system.
    """
    _nz(h, "h")
    _nz(hx, "hx")
    _nz(hy, "hy")
    _nz(hz, "hz")
    xyz = hx * hy * hz
    c = xyz + h1 * h2 * h3
    if printed:
        t2, t3 = h * h1 * h13, h * h1 * h12
    else:
        t2, t3 = h * h2 * h13, h * h3 * h12
    hx1 = (c + h * h1 * h23) / (hx * h)
    hy2 = (c + t2) / (hy * h)
    hz3 = (c + t3) / (hz * h)
    dx, dy, dz = h2 * h3 + h * h23, h1 * h3 + h * h13, h1 * h2 + h * h12
    num = xyz * xyz + xyz * (2 * h1 * h2 * h3 + h * h1 * h23 + h * h2 * h13 + h * h3 * h12) + dz * dy * dx
    h123 = num / (h * h * xyz)
    return hx1, hy2, hz3, h123


def hex_cauchy_keys(box: Box):
    """(field name, site) pairs that make up the Cauchy data on ``box``."""
    lo = tuple(a for a, _ in box.bounds)
    for n in sweep_order(box):
        if any(x == a for x, a in zip(n, lo)):
            yield ("h", n)
        for name, axis in (("hx", 0), ("hy", 1), ("hz", 2)):
            if n[axis] == lo[axis]:
                yield (name, n)


def random_hex_cauchy(box: Box, field: Field = RATIONAL, rng=None, positive: bool = True) -> Dict[tuple, object]:
    rng = rng if rng is not None else random.Random()
    draw = field.random_positive if positive else field.random
    return {key: draw(rng) for key in hex_cauchy_keys(box)}


def hex_fill(cauchy, box: Box, field: Field = RATIONAL, printed: bool = False) -> HexState:
    """Evolve Cauchy data over every elementary cube of ``box`` in level order."""
    st = HexState.empty(box, field)
    fields = st.fields()
    for (name, n), v in cauchy.items():
        fields[name][n] = field(v)
    for b in sorted(box.cubes(), key=lambda n: (sum(n), n)):
        h = st.h
        vals = [h[b], h[shift(b, 1)], h[shift(b, 2)], h[shift(b, 3)],
                h[shift(shift(b, 1), 2)], h[shift(shift(b, 1), 3)], h[shift(shift(b, 2), 3)],
                st.hx[b], st.hy[b], st.hz[b]]
        try:
            hx1, hy2, hz3, h123 = hex_step(*vals, printed=printed)
        except DivisionByZero as exc:
            raise DivisionByZero(f"{exc} on the cube at {b}") from None
        st.hx[shift(b, 1)] = hx1
        st.hy[shift(b, 2)] = hy2
        st.hz[shift(b, 3)] = hz3
        st.h[tuple(x + 1 for x in b)] = h123
    return st


# -- change of variables ----------------------------------------------------


def _unsigned_matrix(st: HexState, n: Index) -> SiteMatrix:
    h = st.h
    hn = _nz(h[n], f"h at {n}")
    hx, hy, hz = st.hx[n], st.hy[n], st.hz[n]
    h1, h2, h3 = h[shift(n, 1)], h[shift(n, 2)], h[shift(n, 3)]
    h12, h13, h23 = h[shift(shift(n, 1), 2)], h[shift(shift(n, 1), 3)], h[shift(shift(n, 2), 3)]
    dx, dy, dz = h2 * h3 + hn * h23, h1 * h3 + hn * h13, h1 * h2 + hn * h12
    M = {
        (1, 1): h1 / hn, (2, 2): h2 / hn, (3, 3): h3 / hn,
        (2, 3): -hx / hn, (3, 1): -hy / hn, (1, 2): -hz / hn,
        (3, 2): -dx / (hn * hx), (1, 3): -dy / (hn * hy), (2, 1): -dz / (hn * hz),
    }
    return SiteMatrix.from_dict(M, (1, 2, 3), (1, 2, 3))


def hex_to_unsigned(st: HexState, box: Box | None = None) -> MatrixLattice:
    """The matrices M^{ik} of the change of variables, before the sign map."""
    box = box if box is not None else _inner_box(st.box)
    out = MatrixLattice(SHAPE3, box, st.field)
    for n in sweep_order(box):
        out.matrices[n] = _unsigned_matrix(st, n)
    return out


def _inner_box(box: Box) -> Box:
    return Box(tuple((lo, hi - 1) for lo, hi in box.bounds))


_CYCLIC = {(1, 2), (2, 3), (3, 1)}


def sign_map_matrix(P: SiteMatrix, n: Index) -> SiteMatrix:
    """Transpose on odd levels, then the sign changes on the cyclic pairs and the diagonal."""
    lev = sum(n)
    out = {}
    for i, k in itertools.product((1, 2, 3), repeat=2):
        v = P[k, i] if lev % 2 else P[i, k]
        if i == k:
            a, b = [x for x in (1, 2, 3) if x != i]
            s = n[a - 1] + n[b - 1]
        elif (i, k) in _CYCLIC:
            s = n[i - 1] + n[k - 1]
        else:
            s = 0
        out[(i, k)] = -v if s % 2 else v
    return SiteMatrix.from_dict(out, (1, 2, 3), (1, 2, 3))


def sign_map(P: MatrixLattice) -> MatrixLattice:
    out = MatrixLattice(P.shape, P.box, P.field)
    for n in sweep_order(P.box):
        out.matrices[n] = sign_map_matrix(P[n], n)
    return out


def hex_to_msystem(st: HexState, box: Box | None = None) -> MatrixLattice:
    """A solution of the 3x3 M-system built from a hexahedron state."""
    return sign_map(hex_to_unsigned(st, box))


def hex_tau(st: HexState, box: Box | None = None) -> LatticeField:
    """tau = (-1)^{n1 n2 + n2 n3 + n3 n1} h."""
    box = box if box is not None else st.box
    tau = LatticeField(box)
    for n in sweep_order(box):
        s = n[0] * n[1] + n[1] * n[2] + n[2] * n[0]
        tau[n] = -st.h[n] if s % 2 else st.h[n]
    return tau


def check_intermediate(P: MatrixLattice, st: HexState, tally: Tally | None = None) -> Tally:
    """Relations satisfied by the unsigned matrices: diagonal steps, off-diagonal steps, h_123."""
    tally = tally if tally is not None else Tally("hexahedron_intermediate")
    for n in P.sites():
        M = P[n]
        for i, k in itertools.permutations((1, 2, 3), 2):
            (l,) = [x for x in (1, 2, 3) if x not in (i, k)]
            m = shift(n, l)
            if m in P:
                _mark(tally, P[m][i, k], M[k, i] - M[k, l] * M[l, i] / M[l, l], P.field, (n, "offdiag", i, k, l))
            m = shift(n, k)
            if m in P:
                _mark(tally, P[m][i, i], -M[i, i] + M[i, k] * M[k, i] / M[k, k], P.field, (n, "diag", i, k))
        top = tuple(x + 1 for x in n)
        _mark(tally, st.h[top], -minor(M, (1, 2, 3), (1, 2, 3), P.field) * st.h[n], P.field, (n, "h123"))
        for i, k in itertools.combinations((1, 2, 3), 2):
            hik = st.h[shift(shift(n, i), k)]
            _mark(tally, hik, -minor(M, (i, k), (i, k), P.field) * st.h[n], P.field, (n, "h_ik", i, k))
    return tally


def _positive(v) -> bool:
    if isinstance(v, complex):
        return v.imag == 0 and v.real > 0
    if isinstance(v, GaussRational):
        return v.im == 0 and v.re > 0
    return v > 0


def is_positive(st: HexState) -> bool:
    return all(_positive(v) for f in (st.h, st.hx, st.hy, st.hz) for v in f.values())


# -- dCKP -----------------------------------------------------------------------


def cube_values(tau, n: Index) -> list:
    """a[i][j][k] = tau(n + i e1 + j e2 + k e3)."""
    return [[[tau[(n[0] + i, n[1] + j, n[2] + k)] for k in (0, 1)] for j in (0, 1)] for i in (0, 1)]


def dckp_residual(a) -> object:
    t, t1, t2, t3 = a[0][0][0], a[1][0][0], a[0][1][0], a[0][0][1]
    t12, t13, t23, t123 = a[1][1][0], a[1][0][1], a[0][1][1], a[1][1][1]
    first = t * t123 + t1 * t23 - t2 * t13 - t3 * t12
    return first * first - 4 * (t12 * t13 - t1 * t123) * (t2 * t3 - t * t23)


def hyperdeterminant(a) -> object:
    """Cayley's hyperdeterminant of a 2x2x2 array."""
    a000, a001, a010, a011 = a[0][0][0], a[0][0][1], a[0][1][0], a[0][1][1]
    a100, a101, a110, a111 = a[1][0][0], a[1][0][1], a[1][1][0], a[1][1][1]
    sq = lambda x: x * x  # noqa: E731
    return (
        sq(a000 * a111) + sq(a001 * a110) + sq(a010 * a101) + sq(a100 * a011)
        - 2 * (a000 * a001 * a110 * a111 + a000 * a010 * a101 * a111 + a000 * a100 * a011 * a111
               + a001 * a010 * a101 * a110 + a001 * a100 * a011 * a110 + a010 * a100 * a011 * a101)
        + 4 * (a000 * a011 * a101 * a110 + a001 * a010 * a100 * a111)
    )


def permute_cube(a, perm) -> list:
    """Relabel the three lattice directions of a 2x2x2 array."""
    out = [[[None] * 2 for _ in range(2)] for _ in range(2)]
    for idx in itertools.product((0, 1), repeat=3):
        src = tuple(idx[perm[j]] for j in range(3))
        out[idx[0]][idx[1]][idx[2]] = a[src[0]][src[1]][src[2]]
    return out


# -- end-to-end checks ----------------------------------------------------------


def _mark(tally: Tally, a, b, field: Field, where):
    if field.exact:
        return tally.record(a == b, where)
    s = max(abs(a), abs(b), 1e-300)
    return tally.record(field.equal(a, b, s), where, abs(a - b) / s)


def check_equivalence(st: HexState, report: Report | None = None) -> Report:
    """Evolve-then-map against map-then-evolve, plus every by-product relation."""
    from .msystem import cauchy_keys, check_evolution, check_tau, fill_from_cauchy

    report = report if report is not None else Report()
    field = st.field
    inner = _inner_box(st.box)
    P = hex_to_unsigned(st, inner)
    M = sign_map(P)
    check_intermediate(P, st, report.tally("hexahedron_intermediate"))
    check_evolution(M, report.tally("msystem_evolution"))
    t = report.tally("hex_equivalence")
    if all(lo == 0 for lo, _ in inner.bounds):
        data = {(i, k, n): M.entry(n, i, k) for i, k, n in cauchy_keys(SHAPE3, inner)}
        try:
            refill = fill_from_cauchy(SHAPE3, data, inner, field)
        except SingularPivot as exc:
            t.record(False, {"singular_pivot": str(exc)})
        else:
            for n in sweep_order(inner):
                for i, k in SHAPE3.entries():
                    _mark(t, refill.entry(n, i, k), M.entry(n, i, k), field, {"site": list(n), "entry": [i, k]})
    check_tau(M, hex_tau(st, inner), report.tally("tau_principal_minors"))
    return report


def symmetric_reduction(box: Box, field: Field = RATIONAL, rng=None, seed: int | None = None):
    """A symmetric 3x3 M-lattice on ``box`` and its tau-function."""
    from .msystem import generate, symmetric_cauchy, tau_fill

    rng = rng if rng is not None else random.Random(seed)
    lat, _ = generate(SHAPE3, box, field, rng=rng, cauchy=symmetric_cauchy)
    return lat, tau_fill(lat)


def check_symmetry(lat: MatrixLattice, tally: Tally | None = None) -> Tally:
    tally = tally if tally is not None else Tally("symmetry_preserved")
    for n in lat.sites():
        for i, k in itertools.combinations(lat.shape.L, 2):
            _mark(tally, lat.entry(n, i, k), lat.entry(n, k, i), lat.field, {"site": list(n), "entry": [i, k]})
    return tally


def check_dckp(tau, box: Box, field: Field = RATIONAL, report: Report | None = None, expect_zero: bool = False) -> Report:
    """dCKP residual against the hyperdeterminant on every cube; optionally require zero."""
    report = report if report is not None else Report()
    t_hyp = report.tally("dckp_equals_hyperdeterminant")
    t_zero = report.tally("dckp_zero") if expect_zero else None
    for b in box.cubes():
        a = cube_values(tau, b)
        r, hyp = dckp_residual(a), hyperdeterminant(a)
        where = {"cube": list(b)}
        if field.exact:
            t_hyp.record(r == hyp, where)
            if t_zero is not None:
                t_zero.record(r == 0, where)
            continue
        # both sides are quartic in tau
        s = max(abs(x) for x in itertools.chain.from_iterable(itertools.chain.from_iterable(a))) ** 4 or 1.0
        t_hyp.record(abs(r - hyp) <= field.tol_rel * s, where, abs(r - hyp) / s)
        if t_zero is not None:
            t_zero.record(abs(r) <= field.tol_rel * s, where, abs(r) / s)
    return report


def check_positivity(st: HexState, tally: Tally | None = None) -> Tally:
    tally = tally if tally is not None else Tally("positivity")
    for name, fld in st.fields().items():
        for n, v in fld.items():
            tally.record(_positive(v), {"field": name, "site": list(n)})
    return tally
