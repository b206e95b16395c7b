"""Z^N lattice container and Cauchy-surface addressing."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, Generic, Iterable, Iterator, Tuple, TypeVar

from .errors import ReassignedSite, UnassignedSite

Index = Tuple[int, ...]
T = TypeVar("T")


def level(n: Index) -> int:
    return sum(n)


def shift(n: Index, l: int, by: int = 1) -> Index:
    """``n + by * e_l`` with directions labelled 1..N."""
    out = list(n)
    out[l - 1] += by
    return tuple(out)


def shift_many(n: Index, dirs: Iterable[int]) -> Index:
    out = list(n)
    for l in dirs:
        out[l - 1] += 1
    return tuple(out)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box of lattice sites, bounds inclusive."""

    bounds: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if not self.bounds:
            raise ValueError("box needs at least one axis")
        for lo, hi in self.bounds:
            if lo > hi:
                raise ValueError(f"invalid axis bounds {lo}..{hi}")

    @classmethod
    def cube(cls, lo: int, hi: int, dim: int = 3) -> "Box":
        return cls(tuple((lo, hi) for _ in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def __contains__(self, n) -> bool:
        return len(n) == self.dim and all(lo <= x <= hi for x, (lo, hi) in zip(n, self.bounds))

    def __len__(self) -> int:
        size = 1
        for lo, hi in self.bounds:
            size *= hi - lo + 1
        return size

    def sites(self) -> Iterator[Index]:
        return itertools.product(*(range(lo, hi + 1) for lo, hi in self.bounds))

    def cubes(self) -> Iterator[Index]:
        """Base corners of the elementary cubes contained in the box."""
        return itertools.product(*(range(lo, hi) for lo, hi in self.bounds))

    def to_json(self):
        return [[lo, hi] for lo, hi in self.bounds]

    @classmethod
    def from_json(cls, data) -> "Box":
        return cls(tuple((int(lo), int(hi)) for lo, hi in data))

    def __str__(self):
        return ",".join(f"{lo}..{hi}" for lo, hi in self.bounds)


_AXIS_RE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")


def parse_box(text: str) -> Box:
    """Parse ``"a..b,a..b,a..b"``."""
    axes = []
    for part in text.split(","):
        m = _AXIS_RE.match(part)
        if m is None:
            raise ValueError(f"malformed box axis {part!r} in {text!r}")
        axes.append((int(m.group(1)), int(m.group(2))))
    return Box(tuple(axes))


def cauchy_surface(i: int, k: int, box: Box, L: Iterable[int] | None = None) -> set:
    """Sites of ``box`` on S^{ik}: n_l = 0 for every l in L outside {i, k}."""
    if L is None:
        L = range(1, box.dim + 1)
    fixed = [l for l in L if l not in (i, k)]
    return {n for n in box.sites() if all(n[l - 1] == 0 for l in fixed)}


def on_cauchy_surface(n: Index, i: int, k: int, L: Iterable[int]) -> bool:
    return all(n[l - 1] == 0 for l in L if l not in (i, k))


def sweep_order(box: Box) -> list:
    """All sites sorted by level, ties broken lexicographically."""
    return sorted(box.sites(), key=lambda n: (sum(n), n))


class LatticeField(Generic[T]):
    """Sparse single-assignment map from lattice sites to values.

    Reading an unassigned site raises :class:`UnassignedSite`; writing an
    already assigned site raises :class:`ReassignedSite`.
    """

    __slots__ = ("box", "_data")

    def __init__(self, box: Box | None = None, data: Dict[Index, T] | None = None):
        self.box = box
        self._data: Dict[Index, T] = {}
        if data:
            for n, v in data.items():
                self[n] = v

    def __getitem__(self, n: Index) -> T:
        try:
            return self._data[n]
        except KeyError:
            raise UnassignedSite(n) from None

    def __setitem__(self, n: Index, value: T) -> None:
        n = tuple(n)
        if self.box is not None and n not in self.box:
            raise IndexError(f"site {n} outside box {self.box}")
        if n in self._data:
            raise ReassignedSite(f"site {n} written twice")
        self._data[n] = value

    def get(self, n: Index, default=None):
        return self._data.get(n, default)

    def __contains__(self, n) -> bool:
        return n in self._data

    def __len__(self) -> int:
        return len(self._data)

    def __iter__(self):
        return iter(self._data)

    def items(self):
        return self._data.items()

    def sites(self):
        return self._data.keys()

    def values(self):
        return self._data.values()

    def copy(self) -> "LatticeField[T]":
        out = LatticeField(self.box)
        out._data = dict(self._data)
        return out

    def __eq__(self, other):
        if not isinstance(other, LatticeField):
            return NotImplemented
        return self._data == other._data

    def __repr__(self):
        return f"LatticeField(box={self.box}, sites={len(self._data)})"
