import itertools
import random

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from linecomplex import msystem as ms
from linecomplex.errors import IndexClash, MissingCauchyDatum, ShapeMismatch, SingularPivot
from linecomplex.field import GAUSS, RATIONAL, get_field
from linecomplex.lattice import Box, shift, sweep_order

SHAPE5 = ms.MSystemShape.square(3, 5)
BOX = Box.cube(0, 2)
seeds = st.integers(0, 2**32 - 1)


def _m(rows, labels=None):
    labels = labels or tuple(range(1, len(rows) + 1))
    return ms.SiteMatrix([[mpq(x) for x in r] for r in rows], labels, labels)


# -- single-site operations -------------------------------------------------


def _sparse(entries):
    full = {(i, k): mpq(0) for i in (1, 2, 3) for k in (1, 2, 3)}
    full.update({key: mpq(v) for key, v in entries.items()})
    return ms.SiteMatrix.from_dict(full, (1, 2, 3), (1, 2, 3))


def test_evolve_entry_examples():
    M = _sparse({(1, 2): 4, (1, 3): 3, (3, 2): 2, (3, 3): 1})
    assert ms.evolve_entry(M, 1, 2, 3) == -2
    ident = _m([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert ms.evolve_entry(ident, 1, 2, 3) == 0
    M = _sparse({(1, 2): 7, (3, 2): 5, (3, 3): 2})
    assert ms.evolve_entry(M, 1, 2, 3) == 7  # M^{il} = 0


def test_evolve_entry_errors():
    M = _sparse({})
    with pytest.raises(SingularPivot):
        ms.evolve_entry(M, 1, 2, 3)
    with pytest.raises(IndexClash):
        ms.evolve_entry(_m([[1, 0], [0, 1]]), 1, 2, 2)


def test_minor_examples():
    M = _m([[1, 2, 3, 4, 5]] * 3 + [[0, 0, 0, 2, 5], [0, 0, 0, 3, 7]])
    assert ms.minor(M, (), ()) == 1
    assert ms.minor(M, (1,), (3,)) == 3
    assert ms.minor(M, (4, 5), (4, 5)) == -1
    assert ms.minor(M, (5, 4), (4, 5)) == 1
    with pytest.raises(ShapeMismatch):
        ms.minor(M, (1, 2), (1,))


def test_signature_metric():
    import numpy as np

    G = np.array(ms.SIGNATURE_METRIC)
    assert (G == G.T).all()
    ev = np.linalg.eigvalsh(G)
    assert (ev > 0).sum() == 3 and (ev < 0).sum() == 3
    v, w = (1, 2, 3, 4, 5, 6), (6, 5, 4, 3, 2, 1)
    assert ms.inner(v, w) == int(np.array(v) @ G @ np.array(w))


def test_wvec_requires_distinct_indices():
    M = ms.random_matrix(5, RATIONAL, random.Random(0))
    with pytest.raises(IndexClash):
        ms.wvec(M, (3,), (4,), 1, 3, 2, 5)


# -- Jacobi-type identities --------------------------------------------------


@given(seeds, st.integers(4, 7))
def test_identity_suite_exact(seed, size):
    rng = random.Random(seed)
    M = ms.random_matrix(size, RATIONAL, rng)
    for name, (value, _) in ms.identity_suite(M, rng, RATIONAL).items():
        assert value == 0, name


@given(seeds)
def test_identity_suite_gaussian(seed):
    rng = random.Random(seed)
    M = ms.random_matrix(rng.randint(4, 6), GAUSS, rng)
    assert ms.check_identities(M, rng, GAUSS).ok


@given(seeds, st.integers(4, 7))
def test_delta_w_shape(seed, size):
    rng = random.Random(seed)
    M = ms.random_matrix(size, RATIONAL, rng)
    a, abar, ahat, b, bbar, bhat = 1, 2, 3, 1, 2, 3
    A = B = tuple(range(4, size + 1))[: rng.randint(0, size - 3)]
    dw = ms.delta_w(M, A, B, a, abar, b, bbar, ahat, bhat)
    mn = lambda r, c: ms.minor(M, r + A, c + B)  # noqa: E731
    assert dw[0] == 0
    assert dw[2] == mn((a,), (bhat,)) * mn((ahat,), (b,))
    assert dw[3] == mn((abar,), (bhat,)) * mn((ahat,), (bbar,))
    assert ms.inner(dw, dw) == 0


def test_jacobi_terms_vanish_on_a_concrete_matrix():
    M = _m([[2, 1, 0, 3], [1, 4, 2, 0], [0, 5, 1, 1], [7, 0, 2, 6]])
    assert sum(ms.jacobi_terms(M, (3,), (4,), 1, 2, 1, 2)) == 0
    assert sum(ms.degenerate_terms(M, (), (), 1, 2, 1, 2, 3)) == 0


def test_identity_suite_float(f64):
    rng = random.Random(3)
    t = None
    for _ in range(100):
        t = ms.check_identities(ms.random_matrix(rng.randint(4, 7), f64, rng), rng, f64, t)
    assert t.ok and t.max_residual < 1e-12


# -- fills ------------------------------------------------------------------


def test_identity_cauchy_is_fixed_point():
    lat = ms.fill_from_cauchy(SHAPE5, ms.identity_cauchy(SHAPE5, BOX), BOX)
    for n in lat.sites():
        for i, k in SHAPE5.entries():
            assert lat.entry(n, i, k) == (1 if i == k else 0)


@given(seeds)
def test_direction_orders_agree(seed):
    lat, data = ms.generate(SHAPE5, BOX, RATIONAL, seed=seed)
    for order in ms.all_direction_orders(SHAPE5.L):
        assert ms.fill_from_cauchy(SHAPE5, data, BOX, RATIONAL, order) == lat
    assert ms.check_evolution(lat).ok


def test_order_123_vs_321_example():
    lat, data = ms.generate(SHAPE5, BOX, RATIONAL, seed=7)
    assert ms.fill_from_cauchy(SHAPE5, data, BOX, RATIONAL, (1, 2, 3)) == ms.fill_from_cauchy(SHAPE5, data, BOX, RATIONAL, (3, 2, 1))


def test_four_dimensional_extension_slabs():
    shape4 = ms.MSystemShape.square(4, 5)
    box4 = Box(((0, 2), (0, 2), (0, 2), (0, 1)))
    lat4, _ = ms.generate(shape4, box4, RATIONAL, seed=2)
    assert ms.check_evolution(lat4).ok
    for n4 in (0, 1):
        slab = ms.MatrixLattice(SHAPE5, BOX, RATIONAL)
        for n in sweep_order(BOX):
            slab.matrices[n] = lat4[n + (n4,)]
        assert ms.check_evolution(slab).ok


def test_missing_cauchy_datum():
    data = ms.identity_cauchy(SHAPE5, BOX)
    key = next(iter(data))
    del data[key]
    with pytest.raises(MissingCauchyDatum):
        ms.fill_from_cauchy(SHAPE5, data, BOX)


def test_singular_pivot_reports_site():
    data = ms.identity_cauchy(SHAPE5, BOX)
    data[(1, 1, (0, 0, 0))] = mpq(0)
    with pytest.raises(SingularPivot) as exc:
        ms.fill_from_cauchy(SHAPE5, data, BOX)
    assert exc.value.site == (0, 0, 0) and exc.value.l == 1


def test_float_fill_matches_exact():
    f = get_field("f64")
    lat, data = ms.generate(SHAPE5, BOX, RATIONAL, seed=3)
    flat = ms.fill_from_cauchy(SHAPE5, {k: complex(v) for k, v in data.items()}, BOX, f)
    for n in lat.sites():
        for i, k in SHAPE5.entries():
            x, y = lat.entry(n, i, k), flat.entry(n, i, k)
            assert abs(complex(x) - y) <= 1e-9 * max(1.0, abs(complex(x)))


# -- minors evolve -----------------------------------------------------------


@given(seeds)
def test_minor_evolution(seed):
    rng = random.Random(seed)
    lat, _ = ms.generate(SHAPE5, BOX, RATIONAL, seed=seed)
    n = (rng.randint(0, 1), rng.randint(0, 1), rng.randint(0, 1))
    l = rng.choice((1, 2, 3))
    rest = [x for x in range(1, 6) if x != l]
    r = rng.randint(0, 3)
    A = tuple(rng.sample(rest, r))
    B = tuple(rng.sample(rest, r))
    assert ms.minor_evolve_check(lat, n, A, B, l)


def test_minor_evolution_examples():
    lat, _ = ms.generate(SHAPE5, BOX, RATIONAL, seed=5)
    assert ms.minor_evolve_check(lat, (0, 0, 0), (1, 4), (2, 5), 3)
    assert ms.minor_evolve_check(lat, (0, 1, 0), (), (), 1)
    assert ms.minor_evolve_check(lat, (1, 0, 0), (2,), (4,), 3)


# -- tau --------------------------------------------------------------------


def test_tau_identity_lattice():
    shape = ms.MSystemShape.square(3)
    lat = ms.fill_from_cauchy(shape, ms.identity_cauchy(shape, BOX), BOX)
    assert all(v == 1 for v in ms.tau_fill(lat).values())


@given(seeds)
def test_tau_principal_minors(seed):
    shape = ms.MSystemShape.square(3)
    lat, _ = ms.generate(shape, BOX, RATIONAL, seed=seed)
    tau = ms.tau_fill(lat)
    assert tau[(0, 0, 0)] == 1
    assert ms.check_tau(lat, tau).ok
    M = lat[(0, 0, 0)]
    assert tau[(1, 1, 0)] == ms.minor(M, (1, 2), (1, 2))
    assert tau[(1, 1, 1)] == ms.minor(M, (1, 2, 3), (1, 2, 3))


# -- conjugate lattices --------------------------------------------------------


@given(seeds)
def test_conjugate_lattice_planarity(seed):
    shape = ms.conjugate_shape(2, 3)
    box = Box.cube(0, 2, 2)
    lat, _ = ms.generate(shape, box, RATIONAL, seed=seed)
    assert ms.check_conjugate_lattice(lat).ok


def test_conjugate_tangents_constant_when_offdiagonal_vanishes():
    shape = ms.conjugate_shape(2, 3)
    box = Box.cube(0, 2, 2)
    rng = random.Random(1)

    def cauchy(shape, box, field, rng):
        data = ms.random_cauchy(shape, box, field, rng)
        for (i, k, n) in data:
            if i in shape.L and k in shape.L and i != k:
                data[(i, k, n)] = field.zero
        return data

    lat, _ = ms.generate(shape, box, RATIONAL, rng=rng, cauchy=cauchy)
    view = ms.conjugate_lattice_view(lat)
    for l in shape.L:
        for d in shape.L:
            if d == l:
                continue  # M^l varies freely along its own axis
            for n in lat.sites():
                m = shift(n, d)
                if m in view:
                    assert view[m][1][l] == view[n][1][l]
