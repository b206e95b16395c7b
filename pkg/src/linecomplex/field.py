"""Scalar backends.

Three interchangeable fields are provided.  Scalars are plain Python objects
supporting ``+ - * /``; every algorithm in the package is written against that
protocol plus the small :class:`Field` interface (zero test, parsing,
formatting and random sampling).

``rational``
    :class:`gmpy2.mpq`, always reduced with a positive denominator.
``gauss``
    :class:`GaussRational`, a pair of ``mpq`` (real, imaginary).
``f64``
    Python ``complex`` (two IEEE doubles), zero test with tolerances.
"""
from __future__ import annotations

import math
import re

from gmpy2 import mpq

__all__ = [
    "Field",
    "RationalField",
    "GaussianField",
    "ComplexField",
    "GaussRational",
    "get_field",
    "RATIONAL",
    "GAUSS",
]

_MPQ = type(mpq())

DEFAULT_TOL_REL = 1e-9
DEFAULT_TOL_ABS = 1e-12

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def _parse_mpq(text: str) -> mpq:
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"malformed rational literal {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return mpq(num, den)


def _format_mpq(x: mpq) -> str:
    return f"{x.numerator}/{x.denominator}"


class GaussRational:
    """Exact element of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is _MPQ else mpq(re)
        self.im = im if type(im) is _MPQ else mpq(im)

    @staticmethod
    def _lift(other):
        if isinstance(other, GaussRational):
            return other
        if isinstance(other, complex):
            raise TypeError("refusing to mix floats into exact Gaussian arithmetic")
        return GaussRational(other, 0)

    def __add__(self, other):
        o = self._lift(other)
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return GaussRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return GaussRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("Gaussian rational division by zero")
        return GaussRational(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussRational(self.re, -self.im)

    def __abs__(self):
        return math.hypot(float(self.re), float(self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussRational({_format_mpq(self.re)}, {_format_mpq(self.im)})"


class Field:
    """Interface shared by the scalar backends."""

    name: str
    exact: bool
    zero: object
    one: object

    def __call__(self, value):
        raise NotImplementedError

    def is_zero(self, x, scale: float = 1.0) -> bool:
        raise NotImplementedError

    def format(self, x) -> str:
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def random(self, rng):
        """Ratio of two integers uniform in [-9, 9] minus {0} (per component)."""
        raise NotImplementedError

    def random_positive(self, rng):
        raise NotImplementedError

    def magnitude(self, x) -> float:
        return abs(complex(x))

    def equal(self, x, y, scale: float = 1.0) -> bool:
        return self.is_zero(x - y, scale)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


def _rand_ratio(rng):
    while True:
        p = rng.randint(-9, 9)
        q = rng.randint(-9, 9)
        if p and q:
            return mpq(p, q)


class RationalField(Field):
    name = "rational"
    exact = True
    zero = mpq(0)
    one = mpq(1)

    def __call__(self, value):
        if isinstance(value, str):
            return _parse_mpq(value)
        if isinstance(value, GaussRational):
            if value.im != 0:
                raise ValueError("non-real value for the rational backend")
            return value.re
        if isinstance(value, (float, complex)):
            raise TypeError("floats cannot enter the exact rational backend")
        return mpq(value)

    def is_zero(self, x, scale=1.0):
        return x == 0

    def format(self, x):
        return _format_mpq(x)

    def parse(self, text):
        return _parse_mpq(text)

    def random(self, rng):
        return _rand_ratio(rng)

    def random_positive(self, rng):
        return mpq(rng.randint(1, 9), rng.randint(1, 9))

    def magnitude(self, x):
        return abs(float(x))


_GAUSS_RE = re.compile(
    r"^\s*([+-]?\d+(?:/\d+)?)\s*([+-])\s*(\d+(?:/\d+)?)\s*\*\s*i\s*$"
)


class GaussianField(Field):
    name = "gauss"
    exact = True
    zero = GaussRational(0, 0)
    one = GaussRational(1, 0)

    def __call__(self, value):
        if isinstance(value, GaussRational):
            return value
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, (float, complex)):
            raise TypeError("floats cannot enter the exact Gaussian backend")
        return GaussRational(value, 0)

    def is_zero(self, x, scale=1.0):
        return x == 0

    def format(self, x):
        im = x.im
        sign = "-" if im < 0 else "+"
        return f"{_format_mpq(x.re)}{sign}{_format_mpq(abs(im))}*i"

    def parse(self, text):
        m = _GAUSS_RE.match(text)
        if m is None:
            # a bare rational is accepted as a real Gaussian number
            return GaussRational(_parse_mpq(text), 0)
        re_part = _parse_mpq(m.group(1))
        im_part = _parse_mpq(m.group(3))
        if m.group(2) == "-":
            im_part = -im_part
        return GaussRational(re_part, im_part)

    def random(self, rng):
        return GaussRational(_rand_ratio(rng), _rand_ratio(rng))

    def random_positive(self, rng):
        return GaussRational(mpq(rng.randint(1, 9), rng.randint(1, 9)), 0)

    def magnitude(self, x):
        return abs(x)


_UFLOAT = r"(?:\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|inf|nan)"
_COMPLEX_RE = re.compile(
    rf"^\s*([+-]?{_UFLOAT})\s*(?:([+-])\s*({_UFLOAT})\s*\*\s*i)?\s*$"
)


class ComplexField(Field):
    """Complex double backend with the |x| <= tol_abs + tol_rel * scale zero test."""

    exact = False
    zero = 0j
    one = 1 + 0j

    def __init__(self, tol_rel: float = DEFAULT_TOL_REL, tol_abs: float = DEFAULT_TOL_ABS):
        self.name = "f64"
        self.tol_rel = tol_rel
        self.tol_abs = tol_abs

    def __call__(self, value):
        if isinstance(value, str):
            return self.parse(value)
        return complex(value)

    def is_zero(self, x, scale=1.0):
        return abs(x) <= self.tol_abs + self.tol_rel * scale

    def format(self, x):
        x = complex(x)
        im = x.imag
        sign = "-" if math.copysign(1.0, im) < 0 else "+"
        return f"{x.real!r}{sign}{abs(im)!r}*i"

    def parse(self, text):
        m = _COMPLEX_RE.match(text)
        if m is None:
            raise ValueError(f"malformed complex literal {text!r}")
        re_part = float(m.group(1))
        im_part = 0.0
        if m.group(3) is not None:
            im_part = float(m.group(3))
            if m.group(2) == "-":
                im_part = -im_part
        return complex(re_part, im_part)

    def random(self, rng):
        return complex(float(_rand_ratio(rng)), float(_rand_ratio(rng)))

    def random_positive(self, rng):
        return complex(rng.randint(1, 9) / rng.randint(1, 9), 0.0)

    def magnitude(self, x):
        return abs(x)


RATIONAL = RationalField()
GAUSS = GaussianField()


def get_field(name: str, tol_rel: float = DEFAULT_TOL_REL, tol_abs: float = DEFAULT_TOL_ABS) -> Field:
    if name == "rational":
        return RATIONAL
    if name == "gauss":
        return GAUSS
    if name in ("f64", "float", "complex"):
        return ComplexField(tol_rel, tol_abs)
    raise ValueError(f"unknown backend {name!r} (expected rational|gauss|f64)")


def field_of(x) -> Field:
    """Best-effort backend detection for a single scalar."""
    if isinstance(x, GaussRational):
        return GAUSS
    if isinstance(x, complex):
        return ComplexField()
    if isinstance(x, _MPQ) or isinstance(x, int):
        return RATIONAL
    raise TypeError(f"cannot infer field for {type(x).__name__}")

