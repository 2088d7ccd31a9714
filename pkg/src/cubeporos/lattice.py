"""Exact arithmetic for half-open dyadic cubes and boxes under the l-inf metric.

All cubes live in the normalized unit root [0,1)^d; coordinates, volumes and
distances are arbitrary-precision rationals.  No floating point is used in
any predicate, so half-open boundary decisions are bit-exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property

from .enclosure import frac_parse, frac_str
from .errors import DimensionMismatch, RootHasNoParent

_ZERO = Fraction(0)
_ONE = Fraction(1)


class Relation(Enum):
    EQUAL = "equal"
    Q_INSIDE_R = "q_inside_r"
    R_INSIDE_Q = "r_inside_q"
    DISJOINT = "disjoint"


@dataclass(frozen=True)
class Box:
    """Axis-parallel half-open box with rational corners.

    Degenerate axes (lo == hi) are permitted so that single points can be
    used in distance queries; a degenerate axis is read as the closed point.
    """

    lo: tuple
    hi: tuple

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or not self.lo:
            raise ValueError("box corner tuples must be nonempty and equal length")
        for a, b in zip(self.lo, self.hi):
            if a > b:
                raise ValueError(f"box needs lo <= hi per axis, got {a} > {b}")

    @classmethod
    def make(cls, lo, hi) -> "Box":
        return cls(tuple(Fraction(x) for x in lo), tuple(Fraction(x) for x in hi))

    @classmethod
    def point(cls, p) -> "Box":
        p = tuple(Fraction(x) for x in p)
        return cls(p, p)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> Fraction:
        v = _ONE
        for a, b in zip(self.lo, self.hi):
            v *= b - a
        return v

    @property
    def max_side(self) -> Fraction:
        return max(b - a for a, b in zip(self.lo, self.hi))

    def contains_point(self, p) -> bool:
        # half-open on each nondegenerate axis; degenerate axis = the point
        for a, b, x in zip(self.lo, self.hi, p):
            if a == b:
                if x != a:
                    return False
            elif not (a <= x < b):
                return False
        return True

    def open_interior_contains_point(self, p) -> bool:
        return all(a < x < b for a, b, x in zip(self.lo, self.hi, p))

    def to_json(self):
        return {"lo": [frac_str(x) for x in self.lo],
                "hi": [frac_str(x) for x in self.hi]}

    @classmethod
    def from_json(cls, obj) -> "Box":
        return cls(tuple(frac_parse(x) for x in obj["lo"]),
                   tuple(frac_parse(x) for x in obj["hi"]))


@dataclass(frozen=True)
class DyadicCube:
    """Half-open dyadic cube: product of [k_i 2^-j, (k_i+1) 2^-j) in [0,1)^d."""

    depth: int
    coords: tuple

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("cube depth must be >= 0")
        if not self.coords:
            raise ValueError("cube needs at least one coordinate")
        top = 1 << self.depth
        for k in self.coords:
            if not 0 <= k < top:
                raise ValueError(f"coordinate {k} outside lattice at depth {self.depth}")

    @classmethod
    def root(cls, dim: int) -> "DyadicCube":
        return cls(0, (0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.coords)

    @cached_property
    def side(self) -> Fraction:
        return Fraction(1, 1 << self.depth)

    @cached_property
    def volume(self) -> Fraction:
        return Fraction(1, 1 << (self.depth * self.dim))

    @cached_property
    def lower_corner(self) -> tuple:
        s = self.side
        return tuple(k * s for k in self.coords)

    @cached_property
    def box(self) -> Box:
        s = self.side
        return Box(tuple(k * s for k in self.coords),
                   tuple((k + 1) * s for k in self.coords))

    def order_key(self):
        return (self.depth, self.coords)

    def ancestor_at(self, depth: int) -> "DyadicCube":
        if depth > self.depth or depth < 0:
            raise ValueError("ancestor depth out of range")
        shift = self.depth - depth
        return DyadicCube(depth, tuple(k >> shift for k in self.coords))

    def to_json(self):
        return {"depth": self.depth, "coords": list(self.coords)}

    @classmethod
    def from_json(cls, obj) -> "DyadicCube":
        return cls(int(obj["depth"]), tuple(int(k) for k in obj["coords"]))

    def __str__(self):
        return f"Q(j={self.depth}, k={self.coords})"


def cube_order_key(q: DyadicCube):
    """Canonical total order: depth ascending, then coords lexicographic."""
    return (q.depth, q.coords)


def parent(q: DyadicCube) -> DyadicCube:
    if q.depth == 0:
        raise RootHasNoParent(f"{q} is the lattice root")
    return DyadicCube(q.depth - 1, tuple(k >> 1 for k in q.coords))


def children(q: DyadicCube, g: int = 1) -> list:
    """The 2^(g*d) depth-(j+g) subcubes of q, in canonical order."""
    if g < 0:
        raise ValueError("generation count must be >= 0")
    base = tuple(k << g for k in q.coords)
    offs = itertools.product(range(1 << g), repeat=q.dim)
    return [DyadicCube(q.depth + g, tuple(b + o for b, o in zip(base, offs_)))
            for offs_ in offs]


def relate(q: DyadicCube, r: DyadicCube) -> Relation:
    """Set relation of two dyadic cubes; they nest or are disjoint, never overlap."""
    if q.dim != r.dim:
        raise DimensionMismatch(f"{q.dim}-d cube vs {r.dim}-d cube")
    if q.depth == r.depth:
        return Relation.EQUAL if q.coords == r.coords else Relation.DISJOINT
    if q.depth > r.depth:
        return Relation.Q_INSIDE_R if q.ancestor_at(r.depth).coords == r.coords \
            else Relation.DISJOINT
    return Relation.R_INSIDE_Q if r.ancestor_at(q.depth).coords == q.coords \
        else Relation.DISJOINT


def contains(outer: DyadicCube, inner: DyadicCube) -> bool:
    rel = relate(inner, outer)
    return rel in (Relation.EQUAL, Relation.Q_INSIDE_R)


def _as_box(obj) -> Box:
    return obj.box if isinstance(obj, DyadicCube) else obj


def linf_dist(a, b) -> Fraction:
    """Exact infimum l-inf distance between two half-open boxes (or cubes).

    Zero exactly when the closures intersect.
    """
    a, b = _as_box(a), _as_box(b)
    if a.dim != b.dim:
        raise DimensionMismatch(f"{a.dim}-d box vs {b.dim}-d box")
    gap = _ZERO
    for alo, ahi, blo, bhi in zip(a.lo, a.hi, b.lo, b.hi):
        g = max(blo - ahi, alo - bhi)
        if g > gap:
            gap = g
    return gap


def closed_disjoint(a: Box, b: Box) -> bool:
    """True when the closures of the two boxes do not meet."""
    return any(blo > ahi or alo > bhi
               for alo, ahi, blo, bhi in zip(a.lo, a.hi, b.lo, b.hi))


def inside_open(outer: Box, inner: Box) -> bool:
    """True when the closed `inner` box lies in the open interior of `outer`."""
    return all(olo < ilo and ihi < ohi
               for olo, ohi, ilo, ihi in zip(outer.lo, outer.hi, inner.lo, inner.hi))


def inside_closed(outer: Box, inner: Box) -> bool:
    """True when the closed `inner` box lies in the closure of `outer`."""
    return all(olo <= ilo and ihi <= ohi
               for olo, ohi, ilo, ihi in zip(outer.lo, outer.hi, inner.lo, inner.hi))


def meets_open(a: Box, open_box: Box) -> bool:
    """True when closed box `a` meets the open interior of `open_box`."""
    return all(ahi > olo and alo < ohi
               for alo, ahi, olo, ohi in zip(a.lo, a.hi, open_box.lo, open_box.hi))


def dilate(q: DyadicCube, n: int) -> Box:
    """Concentric dilation (2n+1)Q; may extend outside the unit root."""
    if n < 1:
        raise ValueError("dilation count must be a positive integer")
    half = Fraction(2 * n + 1, 2) * q.side
    lo = q.lower_corner
    center = tuple(x + q.side / 2 for x in lo)
    return Box(tuple(c - half for c in center), tuple(c + half for c in center))
