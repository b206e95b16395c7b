"""The M-system M^{ik}_l = M^{ik} - M^{il} M^{lk} / M^{ll} on Z^N.

Matrices carry labelled rows (upper-left indices ``Ul``) and columns
(upper-right indices ``Ur``); lattice directions are ``L = {1..N}``, a
subset of both label sets.  Entry ``(i, k)`` is prescribed on its Cauchy
surface S^{ik} = {n : n_l = 0 for l in L minus {i, k}} and evolves in the
remaining directions.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

from . import kernels, linalg
from .errors import (
    IndexClash,
    MissingCauchyDatum,
    PathInconsistency,
    ShapeMismatch,
    SingularPivot,
)
from .field import RATIONAL, ComplexField, Field
from .lattice import Box, Index, LatticeField, on_cauchy_surface, shift, sweep_order
from .report import Tally

SIGNATURE_METRIC = (
    (0, 1, 0, 0, 0, 0),
    (1, 0, 0, 0, 0, 0),
    (0, 0, 0, -1, 0, 0),
    (0, 0, -1, 0, 0, 0),
    (0, 0, 0, 0, 0, 1),
    (0, 0, 0, 0, 1, 0),
)


@dataclass(frozen=True)
class MSystemShape:
    L: Tuple[int, ...]
    Ul: Tuple[int, ...]
    Ur: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "L", tuple(self.L))
        object.__setattr__(self, "Ul", tuple(sorted(set(self.Ul))))
        object.__setattr__(self, "Ur", tuple(sorted(set(self.Ur))))
        if len(self.L) < 2:
            raise ShapeMismatch("the M-system needs N >= 2 lattice directions")
        if self.L != tuple(range(1, len(self.L) + 1)):
            raise ShapeMismatch(f"lattice directions must be 1..N, got {self.L}")
        if not set(self.L) <= set(self.Ul) or not set(self.L) <= set(self.Ur):
            raise ShapeMismatch("L must be contained in both Ul and Ur")

    @classmethod
    def square(cls, N: int, size: int | None = None) -> "MSystemShape":
        size = N if size is None else size
        labels = tuple(range(1, size + 1))
        return cls(tuple(range(1, N + 1)), labels, labels)

    @property
    def N(self) -> int:
        return len(self.L)

    def row(self, i: int) -> int:
        return self.Ul.index(i)

    def col(self, k: int) -> int:
        return self.Ur.index(k)

    def entries(self):
        return itertools.product(self.Ul, self.Ur)

    def to_json(self):
        return {"L": list(self.L), "Ul": list(self.Ul), "Ur": list(self.Ur)}

    @classmethod
    def from_json(cls, data) -> "MSystemShape":
        return cls(tuple(data["L"]), tuple(data["Ul"]), tuple(data["Ur"]))


class SiteMatrix:
    """An immutable matrix with labelled rows and columns."""

    __slots__ = ("rows", "Ul", "Ur", "_ri", "_ci")

    def __init__(self, rows, Ul, Ur):
        self.rows = tuple(tuple(r) for r in rows)
        self.Ul = tuple(Ul)
        self.Ur = tuple(Ur)
        if len(self.rows) != len(self.Ul) or any(len(r) != len(self.Ur) for r in self.rows):
            raise ShapeMismatch("matrix shape does not match its labels")
        self._ri = {i: p for p, i in enumerate(self.Ul)}
        self._ci = {k: p for p, k in enumerate(self.Ur)}

    def __getitem__(self, ik):
        i, k = ik
        return self.rows[self._ri[i]][self._ci[k]]

    def __eq__(self, other):
        if not isinstance(other, SiteMatrix):
            return NotImplemented
        return self.rows == other.rows and self.Ul == other.Ul and self.Ur == other.Ur

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"SiteMatrix({[list(r) for r in self.rows]}, Ul={self.Ul}, Ur={self.Ur})"

    def restrict(self, Ul, Ur) -> "SiteMatrix":
        return SiteMatrix([[self[i, k] for k in Ur] for i in Ul], Ul, Ur)

    @classmethod
    def from_dict(cls, entries: Mapping, Ul, Ur) -> "SiteMatrix":
        return cls([[entries[i, k] for k in Ur] for i in Ul], Ul, Ur)


class MatrixLattice:
    """A map from the sites of a box to :class:`SiteMatrix` values."""

    def __init__(self, shape: MSystemShape, box: Box, field: Field, matrices: LatticeField | None = None):
        if box.dim != shape.N:
            raise ShapeMismatch(f"box dimension {box.dim} != N = {shape.N}")
        self.shape = shape
        self.box = box
        self.field = field
        self.matrices: LatticeField = matrices if matrices is not None else LatticeField(box)

    def __getitem__(self, n: Index) -> SiteMatrix:
        return self.matrices[tuple(n)]

    def entry(self, n: Index, i: int, k: int):
        return self.matrices[tuple(n)][i, k]

    def sites(self):
        return self.matrices.sites()

    def __contains__(self, n):
        return n in self.matrices

    def restrict(self, Ul, Ur) -> "MatrixLattice":
        shape = MSystemShape(self.shape.L, Ul, Ur)
        out = MatrixLattice(shape, self.box, self.field)
        for n, m in self.matrices.items():
            out.matrices[n] = m.restrict(shape.Ul, shape.Ur)
        return out

    def __eq__(self, other):
        if not isinstance(other, MatrixLattice):
            return NotImplemented
        return self.shape == other.shape and self.box == other.box and self.matrices == other.matrices

    def __repr__(self):
        return f"MatrixLattice(shape={self.shape}, box={self.box}, backend={self.field.name})"


# -- single-site operations -------------------------------------------------


def evolve_entry(M: SiteMatrix, i: int, k: int, l: int, field: Field = RATIONAL):
    """One step of the M-system for entry (i, k) in direction l."""
    if l in (i, k):
        raise IndexClash(f"direction {l} coincides with an index of M^{{{i},{k}}}")
    piv = M[l, l]
    if field.is_zero(piv):
        raise SingularPivot(None, l)
    return M[i, k] - M[i, l] * M[l, k] / piv


def minor(M: SiteMatrix, A: Sequence[int], B: Sequence[int], field: Field = RATIONAL):
    """det(M[A, B]) in the given row/column order; the empty minor is 1."""
    A, B = tuple(A), tuple(B)
    if len(A) != len(B):
        raise ShapeMismatch(f"multi-indices of different lengths {A}, {B}")
    if len(set(A)) != len(A) or len(set(B)) != len(B):
        raise IndexClash(f"repeated entries in {A} or {B}")
    if not A:
        return field.one
    return linalg.det([[M[a, b] for b in B] for a in A], field)


def wvec(M: SiteMatrix, A, B, a, abar, b, bbar, field: Field = RATIONAL) -> tuple:
    """(M^{A,B}, M^{a abar A, b bbar B}, M^{aA,bB}, M^{abar A, bbar B}, M^{abar A, bB}, M^{aA, bbar B})."""
    A, B = tuple(A), tuple(B)
    rows = (a, abar) + A
    cols = (b, bbar) + B
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        raise IndexClash(f"upper-left {rows} or upper-right {cols} indices not distinct")
    return (
        minor(M, A, B, field),
        minor(M, (a, abar) + A, (b, bbar) + B, field),
        minor(M, (a,) + A, (b,) + B, field),
        minor(M, (abar,) + A, (bbar,) + B, field),
        minor(M, (abar,) + A, (b,) + B, field),
        minor(M, (a,) + A, (bbar,) + B, field),
    )


def inner(v, w):
    """Bilinear form of the (3,3) signature metric."""
    return v[0] * w[1] + v[1] * w[0] - v[2] * w[3] - v[3] * w[2] + v[4] * w[5] + v[5] * w[4]


def inner_scale(v, w) -> float:
    """|v| |w|, which bounds every term of :func:`inner`; the scale for float zero tests.

    A sum of term magnitudes would collapse when one vector is sparse and
    its only surviving entry is round-off.
    """
    return float(np.linalg.norm(np.array(v, dtype=complex)) * np.linalg.norm(np.array(w, dtype=complex)))


# -- Jacobi-type identities ---------------------------------------------------


def jacobi_terms(M: SiteMatrix, A, B, a, abar, b, bbar, field: Field = RATIONAL) -> tuple:
    """The three products of the classical Jacobi identity; they sum to zero."""
    A, B = tuple(A), tuple(B)
    mn = lambda r, c: minor(M, r + A, c + B, field)  # noqa: E731
    return (
        minor(M, A, B, field) * mn((a, abar), (b, bbar)),
        -mn((a,), (b,)) * mn((abar,), (bbar,)),
        mn((abar,), (b,)) * mn((a,), (bbar,)),
    )


def degenerate_terms(M: SiteMatrix, A, B, a, abar, b, bbar, bhat, field: Field = RATIONAL) -> tuple:
    """The three-term identity left after identifying two rows of the six-term one."""
    A, B = tuple(A), tuple(B)
    mn = lambda r, c: minor(M, r + A, c + B, field)  # noqa: E731
    return (
        mn((a, abar), (b, bbar)) * mn((a,), (bhat,)),
        -mn((a,), (b,)) * mn((a, abar), (bhat, bbar)),
        mn((a,), (bbar,)) * mn((a, abar), (bhat, b)),
    )


def delta_w(M: SiteMatrix, A, B, a, abar, b, bbar, ahat, bhat, field: Field = RATIONAL) -> tuple:
    """M^{ahat A, bhat B} W - M^{A,B} W-hat; its first entry vanishes and it is null."""
    A, B = tuple(A), tuple(B)
    w = wvec(M, A, B, a, abar, b, bbar, field)
    wh = wvec(M, (ahat,) + A, (bhat,) + B, a, abar, b, bbar, field)
    c, c0 = minor(M, (ahat,) + A, (bhat,) + B, field), w[0]
    return tuple(c * x - c0 * y for x, y in zip(w, wh))


def random_matrix(size: int, field: Field = RATIONAL, rng=None) -> SiteMatrix:
    rng = rng if rng is not None else random.Random()
    labels = tuple(range(1, size + 1))
    return SiteMatrix([[field.random(rng) for _ in labels] for _ in labels], labels, labels)


def identity_suite(M: SiteMatrix, rng, field: Field = RATIONAL) -> Dict[str, Tuple[object, float]]:
    """Evaluate every quadratic minor identity once, on randomly drawn multi-indices.

    Returns name -> (value, scale); exact backends expect value == 0 and
    float backends compare |value| against scale.  Needs at least four rows
    and four columns.
    """
    rows, cols = list(M.Ul), list(M.Ur)
    if min(len(rows), len(cols)) < 4:
        raise ShapeMismatch("the identity suite needs at least a 4x4 matrix")
    rng.shuffle(rows)
    rng.shuffle(cols)
    a, abar, ahat, atil = rows[:4]
    b, bbar, bhat, btil = cols[:4]
    s = rng.randint(0, min(len(rows), len(cols)) - 4)
    A, B = tuple(rows[4:4 + s]), tuple(cols[4:4 + s])

    def mag(*vals):
        return max((abs(complex(v)) for v in vals), default=0.0)

    out = {}
    w = wvec(M, A, B, a, abar, b, bbar, field)
    t = jacobi_terms(M, A, B, a, abar, b, bbar, field)
    out["jacobi"] = (sum(t[1:], t[0]), sum(abs(complex(x)) for x in t))
    out["w_null"] = (inner(w, w), inner_scale(w, w))
    what = wvec(M, (ahat,) + A, (bhat,) + B, a, abar, b, bbar, field)
    out["w_hat_orthogonal"] = (inner(w, what), inner_scale(w, what))
    dw = delta_w(M, A, B, a, abar, b, bbar, ahat, bhat, field)
    out["delta_w_first"] = (dw[0], 2 * mag(w[0]) * mag(what[0]))
    out["delta_w_null"] = (inner(dw, dw), inner_scale(dw, dw))
    t = degenerate_terms(M, A, B, a, abar, b, bbar, bhat, field)
    out["degenerate_jacobi"] = (sum(t[1:], t[0]), sum(abs(complex(x)) for x in t))
    wtil = wvec(M, (ahat,) + A, (btil,) + B, a, abar, b, bbar, field)
    out["column_twins"] = (inner(what, wtil), inner_scale(what, wtil))
    wrow = wvec(M, (atil,) + A, (bhat,) + B, a, abar, b, bbar, field)
    out["row_twins"] = (inner(what, wrow), inner_scale(what, wrow))
    return out


def check_identities(M: SiteMatrix, rng, field: Field = RATIONAL, tally: Tally | None = None) -> Tally:
    tally = tally if tally is not None else Tally("jacobi_identities")
    tol = getattr(field, "tol_rel", 0.0)
    for name, (value, sc) in identity_suite(M, rng, field).items():
        if field.exact:
            tally.record(value == 0, name)
        else:
            res = abs(complex(value)) / sc if sc else abs(complex(value))
            tally.record(res <= tol, name, res)
    return tally


# -- Cauchy data and fills --------------------------------------------------


CauchyData = Mapping[Tuple[int, int, Index], object]


def _check_box(box: Box):
    if any(lo != 0 for lo, _ in box.bounds):
        raise ValueError(f"M-system fills run forward from the origin; box {box} must start at 0")


def cauchy_keys(shape: MSystemShape, box: Box):
    """Every (i, k, n) for which Cauchy data must be supplied on ``box``."""
    _check_box(box)
    for n in sweep_order(box):
        for i, k in shape.entries():
            if on_cauchy_surface(n, i, k, shape.L):
                yield (i, k, n)


@lru_cache(maxsize=256)
def _fill_plan(shape: MSystemShape, box: Box, order: Tuple[int, ...]):
    sites = sweep_order(box)
    R, C = len(shape.Ul), len(shape.Ur)
    stride = R * C
    pos = {n: s * stride for s, n in enumerate(sites)}
    ri = {i: p * C for p, i in enumerate(shape.Ul)}
    ci = {k: p for p, k in enumerate(shape.Ur)}
    cauchy = []
    plan = []
    where = []
    for n in sites:
        base = pos[n]
        for i, k in shape.entries():
            dst = base + ri[i] + ci[k]
            if on_cauchy_surface(n, i, k, shape.L):
                cauchy.append((dst, i, k, n))
                continue
            for l in order:
                if l not in (i, k) and n[l - 1] > 0:
                    break
            else:  # pragma: no cover - excluded by on_cauchy_surface
                raise AssertionError("no admissible direction")
            src = pos[shift(n, l, -1)]
            plan.append((dst, src + ri[i] + ci[k], src + ri[i] + ci[l], src + ri[l] + ci[k], src + ri[l] + ci[l]))
            where.append((n, l))
    plan_arr = np.array(plan, dtype=np.int64).reshape(len(plan), 5)
    return sites, stride, cauchy, np.ascontiguousarray(plan_arr), where


def fill_from_cauchy(
    shape: MSystemShape,
    data: CauchyData | Callable,
    box: Box,
    field: Field = RATIONAL,
    order: Sequence[int] | None = None,
) -> MatrixLattice:
    """Populate every site of ``box`` from Cauchy data by level sweeps.

    ``order`` is the direction preference used when a site can be reached
    from several predecessors; by multidimensional consistency the result
    does not depend on it.
    """
    _check_box(box)
    order = tuple(shape.L) if order is None else tuple(order)
    if sorted(order) != list(shape.L):
        raise ValueError(f"direction order {order} is not a permutation of {shape.L}")
    sites, stride, cauchy, plan, where = _fill_plan(shape, box, order)
    getter = data if callable(data) else None
    size = stride * len(sites)
    if field.exact:
        vals = [None] * size
    else:
        vals = np.zeros(size, dtype=np.complex128)
    for dst, i, k, n in cauchy:
        try:
            v = getter(i, k, n) if getter is not None else data[(i, k, n)]
        except KeyError:
            raise MissingCauchyDatum(i, k, n) from None
        vals[dst] = field(v)
    if field.exact:
        bad = kernels.run_plan(vals, plan)
    else:
        bad = kernels.run_plan_complex(vals, plan, field.tol_abs)
    if bad >= 0:
        n, l = where[bad]
        src = shift(n, l, -1)
        raise SingularPivot(src, l, f"while stepping to {n}")
    out = MatrixLattice(shape, box, field)
    R, C = len(shape.Ul), len(shape.Ur)
    for s, n in enumerate(sites):
        base = s * stride
        if field.exact:
            rows = [vals[base + r * C: base + (r + 1) * C] for r in range(R)]
        else:
            rows = [[complex(x) for x in vals[base + r * C: base + (r + 1) * C]] for r in range(R)]
        out.matrices[n] = SiteMatrix(rows, shape.Ul, shape.Ur)
    return out


def identity_cauchy(shape: MSystemShape, box: Box, field: Field = RATIONAL) -> Dict:
    return {(i, k, n): (field.one if i == k else field.zero) for i, k, n in cauchy_keys(shape, box)}


def random_cauchy(shape: MSystemShape, box: Box, field: Field = RATIONAL, rng=None, positive=False) -> Dict:
    rng = rng if rng is not None else random.Random()
    draw = field.random_positive if positive else field.random
    return {key: draw(rng) for key in cauchy_keys(shape, box)}


def symmetric_cauchy(shape: MSystemShape, box: Box, field: Field = RATIONAL, rng=None) -> Dict:
    """Random Cauchy data with M^{ik} = M^{ki} (requires Ul = Ur)."""
    if shape.Ul != shape.Ur:
        raise ShapeMismatch("the symmetric reduction needs Ul = Ur")
    rng = rng if rng is not None else random.Random()
    data = {}
    for i, k, n in cauchy_keys(shape, box):
        if (k, i, n) in data:
            data[(i, k, n)] = data[(k, i, n)]
        else:
            data[(i, k, n)] = field.random(rng)
    return data


def generate(
    shape: MSystemShape,
    box: Box,
    field: Field = RATIONAL,
    seed: int | None = None,
    rng=None,
    max_tries: int = 100,
    cauchy: Callable | None = None,
    **kwargs,
) -> Tuple[MatrixLattice, Dict]:
    """Random Cauchy data plus fill, re-sampling on a singular pivot."""
    rng = rng if rng is not None else random.Random(seed)
    make = cauchy if cauchy is not None else random_cauchy
    last = None
    for _ in range(max_tries):
        data = make(shape, box, field, rng, **kwargs)
        try:
            return fill_from_cauchy(shape, data, box, field), data
        except SingularPivot as exc:
            last = exc
    raise last


# -- checks -----------------------------------------------------------------


def check_evolution(lat: MatrixLattice, tally: Tally | None = None) -> Tally:
    """Every edge of the lattice obeys the M-system for every admissible entry."""
    tally = tally if tally is not None else Tally("msystem_evolution")
    field = lat.field
    for n in sweep_order(lat.box):
        if n not in lat:
            continue
        M = lat[n]
        for l in lat.shape.L:
            m = shift(n, l)
            if m not in lat:
                continue
            Ml = lat[m]
            piv = M[l, l]
            if field.is_zero(piv, field.magnitude(piv) or 1.0) and field.exact:
                tally.record(False, (n, l, "pivot"))
                continue
            for i, k in lat.shape.entries():
                if l in (i, k):
                    continue
                rhs = M[i, k] - M[i, l] * M[l, k] / piv
                diff = Ml[i, k] - rhs
                if field.exact:
                    tally.record(diff == 0, (n, l, i, k))
                else:
                    scale = abs(M[i, k]) + abs(M[i, l] * M[l, k] / piv)
                    tally.record(field.is_zero(diff, scale), (n, l, i, k), abs(diff) / max(scale, 1e-300))
    return tally


def minor_evolve_check(lat: MatrixLattice, n: Index, A, B, l: int) -> bool:
    """minor(M_l, A, B) == minor(M, lA, lB) / M^{ll}."""
    A, B = tuple(A), tuple(B)
    if l in A or l in B:
        raise IndexClash(f"direction {l} occurs in {A} or {B}")
    field = lat.field
    M = lat[n]
    piv = M[l, l]
    if field.is_zero(piv):
        raise SingularPivot(n, l)
    lhs = minor(lat[shift(n, l)], A, B, field)
    rhs = minor(M, (l,) + A, (l,) + B, field) / piv
    if field.exact:
        return lhs == rhs
    return field.equal(lhs, rhs, max(abs(lhs), abs(rhs), 1.0))


# -- tau function -----------------------------------------------------------


def tau_fill(lat: MatrixLattice) -> LatticeField:
    """tau(0) = 1 and tau_i = M^{ii} tau, checked along every lattice path."""
    field = lat.field
    box = lat.box
    origin = tuple(lo for lo, _ in box.bounds)
    tau = LatticeField(box)
    tau[origin] = field.one
    for n in sweep_order(box):
        if n == origin:
            continue
        candidates = []
        for i in lat.shape.L:
            m = shift(n, i, -1)
            if m in box:
                candidates.append(lat.entry(m, i, i) * tau[m])
        first = candidates[0]
        for c in candidates[1:]:
            if field.exact:
                ok = c == first
            else:
                ok = field.equal(c, first, max(abs(c), abs(first)))
            if not ok:
                raise PathInconsistency(f"tau at {n} depends on the path ({first} vs {c})")
        tau[n] = first
    return tau


def check_tau(lat: MatrixLattice, tau: LatticeField, tally: Tally | None = None) -> Tally:
    """tau_A = M^{A,A} tau for every nonempty A within L."""
    tally = tally if tally is not None else Tally("tau_principal_minors")
    field = lat.field
    L = lat.shape.L
    subsets = [A for r in range(1, len(L) + 1) for A in itertools.combinations(L, r)]
    for n in lat.sites():
        for A in subsets:
            m = list(n)
            for a in A:
                m[a - 1] += 1
            m = tuple(m)
            if m not in lat.box:
                continue
            lhs = tau[m]
            rhs = minor(lat[n], A, A, field) * tau[n]
            if field.exact:
                tally.record(lhs == rhs, (n, A))
            else:
                s = max(abs(lhs), abs(rhs), 1e-300)
                tally.record(field.equal(lhs, rhs, s), (n, A), abs(lhs - rhs) / s)
    return tally


# -- conjugate lattices -----------------------------------------------------


def conjugate_shape(N: int, d: int) -> MSystemShape:
    L = tuple(range(1, N + 1))
    return MSystemShape(L, (0,) + L, L + tuple(range(N + 1, N + d + 1)))


def conjugate_lattice_view(lat: MatrixLattice) -> Dict[Index, Tuple[tuple, Dict[int, tuple]]]:
    """Points r = (M^{0k}) and tangent vectors M^i = (M^{ik}) over k > N."""
    shape = lat.shape
    if 0 not in shape.Ul:
        raise ShapeMismatch("conjugate-lattice view needs the hidden row index 0 in Ul")
    extra = [k for k in shape.Ur if k not in shape.L]
    out = {}
    for n, M in lat.matrices.items():
        r = tuple(M[0, k] for k in extra)
        tangents = {i: tuple(M[i, k] for k in extra) for i in shape.L}
        out[n] = (r, tangents)
    return out


def check_conjugate_lattice(lat: MatrixLattice, tally: Tally | None = None) -> Tally:
    """r_l - r parallel to M^l (with the M-system coefficient) and planar quads."""
    tally = tally if tally is not None else Tally("conjugate_lattice")
    field = lat.field
    view = conjugate_lattice_view(lat)
    L = lat.shape.L
    for n, (r, tangents) in view.items():
        M = lat[n]
        for l in L:
            m = shift(n, l)
            if m not in view:
                continue
            coef = M[0, l] / M[l, l]
            expected = linalg.sub(r, linalg.scale(coef, tangents[l]))
            tally.record(linalg.is_zero_vector(linalg.sub(view[m][0], expected), field, linalg.vec_norm(r) + 1), (n, l))
        for l, mm in itertools.combinations(L, 2):
            top = shift(shift(n, l), mm)
            if top not in view:
                continue
            d1 = linalg.sub(view[shift(n, l)][0], r)
            d2 = linalg.sub(view[shift(n, mm)][0], r)
            d3 = linalg.sub(view[top][0], r)
            tally.record(linalg.rank([d1, d2, d3], field) <= 2, (n, l, mm, "planarity"))
    return tally


def is_float(field: Field) -> bool:
    return isinstance(field, ComplexField)


def all_direction_orders(L: Iterable[int]):
    return list(itertools.permutations(tuple(L)))
