import random

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from linecomplex.errors import ReassignedSite, UnassignedSite
from linecomplex.field import GAUSS, RATIONAL, GaussRational, get_field
from linecomplex.lattice import Box, LatticeField, cauchy_surface, level, parse_box, shift, sweep_order

rationals = st.fractions(max_denominator=10**6).map(lambda q: mpq(q.numerator, q.denominator))
gaussians = st.tuples(rationals, rationals).map(lambda p: GaussRational(*p))
floats = st.complex_numbers(allow_nan=False, allow_infinity=False, max_magnitude=1e12)


@given(rationals, rationals, rationals)
def test_rational_distributive(a, b, c):
    assert a * (b + c) == a * b + a * c


@given(gaussians, gaussians, gaussians)
def test_gauss_field_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a + b) + c == a + (b + c)
    if b != 0:
        assert (a / b) * b == a


@given(rationals)
def test_rational_roundtrip_and_reduced(x):
    text = RATIONAL.format(x)
    assert RATIONAL.parse(text) == x
    num, den = text.split("/")
    assert int(den) > 0
    assert mpq(int(num), int(den)) == x


@given(gaussians)
def test_gauss_roundtrip(x):
    y = GAUSS.parse(GAUSS.format(x))
    assert y == x and y.re == x.re and y.im == x.im


@given(floats)
def test_float_roundtrip_is_exact(x):
    f = get_field("f64")
    assert f.parse(f.format(x)) == x


def test_gauss_textual_form():
    assert GAUSS.format(GaussRational(mpq(1, 2), mpq(-3, 4))) == "1/2-3/4*i"
    assert GAUSS.parse("1/2+3/4*i") == GaussRational(mpq(1, 2), mpq(3, 4))


def test_bad_literals():
    for text in ("1/0", "abc", "1.5/2"):
        with pytest.raises(ValueError):
            RATIONAL.parse(text)


@given(st.floats(min_value=0, max_value=1e3), st.floats(min_value=1e-12, max_value=1e-3), st.floats(min_value=1, max_value=100))
def test_float_zero_test_monotone_in_tolerance(x, tol, factor):
    small = get_field("f64", tol_rel=tol)
    large = get_field("f64", tol_rel=tol * factor)
    if small.is_zero(complex(x), 1.0):
        assert large.is_zero(complex(x), 1.0)


def test_exact_zero_test_is_literal():
    assert RATIONAL.is_zero(mpq(0))
    assert not RATIONAL.is_zero(mpq(1, 10**40))


def test_cauchy_surfaces():
    box = Box.cube(0, 2)
    assert cauchy_surface(4, 5, box, (1, 2, 3)) == {(0, 0, 0)}
    assert cauchy_surface(1, 4, box, (1, 2, 3)) == {(a, 0, 0) for a in range(3)}
    assert cauchy_surface(1, 2, box, (1, 2, 3)) == {(a, b, 0) for a in range(3) for b in range(3)}


def test_sweep_order_examples():
    order = sweep_order(Box.cube(0, 1))
    assert order[:5] == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0), (0, 1, 1)]
    assert sweep_order(Box.cube(0, 0)) == [(0, 0, 0)]
    order = sweep_order(Box.cube(0, 2))
    assert len(order) == 27
    assert [level(n) for n in order[:5]] == [0, 1, 1, 1, 2]


@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(0, 3)), min_size=1, max_size=4))
def test_sweep_order_is_a_levelled_bijection(spans):
    box = Box(tuple((lo, lo + w) for lo, w in spans))
    order = sweep_order(box)
    assert sorted(order) == sorted(box.sites())
    assert len(set(order)) == len(order) == len(box)
    levels = [level(n) for n in order]
    assert levels == sorted(levels)


def test_parse_box():
    box = parse_box("0..2,-1..3,0..0")
    assert box.bounds == ((0, 2), (-1, 3), (0, 0))
    assert str(box) == "0..2,-1..3,0..0"
    assert Box.from_json(box.to_json()) == box
    with pytest.raises(ValueError):
        parse_box("2..0,0..1,0..1")
    with pytest.raises(ValueError):
        parse_box("0-2")


def test_lattice_field_single_assignment():
    f = LatticeField(Box.cube(0, 1))
    with pytest.raises(UnassignedSite):
        f[(0, 0, 0)]
    f[(0, 0, 0)] = 1
    with pytest.raises(ReassignedSite):
        f[(0, 0, 0)] = 2
    assert f[(0, 0, 0)] == 1
    assert shift((0, 0, 0), 2) == (0, 1, 0)
    assert shift((1, 1, 1), 3, -1) == (1, 1, 0)


def test_random_draws_are_seeded():
    a = [RATIONAL.random(random.Random(5)) for _ in range(3)]
    b = [RATIONAL.random(random.Random(5)) for _ in range(3)]
    assert a == b
    for _ in range(200):
        x = RATIONAL.random(random.Random(_))
        assert x != 0 and abs(x.numerator) <= 9 and x.denominator <= 9
