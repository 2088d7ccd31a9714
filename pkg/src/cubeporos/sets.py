"""Verified set models: three-valued intersection and distance-interval oracles.

A model answers `Free` or `Intersects` only when the answer is exact; refinement
budgets turn hard cases into `Undetermined`, never into a wrong exact answer.
Callers that must commit treat `Undetermined` as `Intersects`, which only
enlarges enumerated families and inflates measured constants monotonically.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .enclosure import frac_parse, frac_str
from .errors import DimensionMismatch, EmptyFamilyError, EmptySetError
from .lattice import (Box, DyadicCube, closed_disjoint, inside_closed,
                      inside_open, linf_dist, meets_open)

DEFAULT_BUDGET = 36
_MAX_NODES = 200_000  # hard cap on hull expansions per oracle call


class Status(Enum):
    INTERSECTS = "intersects"
    FREE = "free"
    UNDETERMINED = "undetermined"


class SetModel:
    """Common oracle interface; all models are immutable and pure."""

    kind = "abstract"

    @property
    def dim(self) -> int:
        raise NotImplementedError

    @property
    def is_empty(self) -> bool:
        return False

    def intersect_status(self, box: Box, budget: int = DEFAULT_BUDGET) -> Status:
        raise NotImplementedError

    def dist_interval(self, box: Box, budget: int = DEFAULT_BUDGET):
        """Certified [lo, hi] with lo <= dist(box, E) <= hi."""
        raise NotImplementedError

    def dist_below(self, box: Box, threshold, budget: int = DEFAULT_BUDGET):
        """Three-valued threshold query: is dist(box, E) < threshold?

        True and False are certified; None means the budget ran out.  Cheaper
        than a full distance interval because refinement stops as soon as the
        comparison is decided.
        """
        lo, hi = self.dist_interval(box, budget)
        if hi < threshold:
            return True
        if lo >= threshold:
            return False
        return None

    def restricted(self, box: Box) -> "SetModel":
        """Model whose intersection answers agree with self on sub-boxes of `box`.

        Only valid for intersection descent; distances must use the full model.
        """
        return self

    def misses_interior(self, box: Box, budget: int = DEFAULT_BUDGET) -> bool:
        """True only when E is certified not to meet the open interior of `box`."""
        return False

    def to_json(self):
        raise NotImplementedError

    def _check_dim(self, box: Box):
        if box.dim != self.dim:
            raise DimensionMismatch(f"{self.dim}-d set vs {box.dim}-d box")


@dataclass(frozen=True)
class EmptyModel(SetModel):
    dimension: int

    kind = "empty"

    @property
    def dim(self) -> int:
        return self.dimension

    @property
    def is_empty(self) -> bool:
        return True

    def intersect_status(self, box, budget=DEFAULT_BUDGET):
        return Status.FREE

    def dist_interval(self, box, budget=DEFAULT_BUDGET):
        raise EmptySetError("distance to the empty set is undefined")

    def dist_below(self, box, threshold, budget=DEFAULT_BUDGET):
        return False

    def misses_interior(self, box, budget=DEFAULT_BUDGET):
        return True

    def to_json(self):
        return {"kind": "empty", "dim": self.dimension}


@dataclass(frozen=True)
class PointsModel(SetModel):
    """Finite rational point set; every oracle answer is exact."""

    points: tuple  # tuple of d-tuples of Fraction, deduplicated and sorted

    kind = "points"

    @classmethod
    def make(cls, pts) -> "PointsModel":
        norm = sorted({tuple(Fraction(x) for x in p) for p in pts})
        if not norm:
            raise EmptySetError("points model needs at least one point")
        dims = {len(p) for p in norm}
        if len(dims) != 1:
            raise DimensionMismatch("points of mixed dimension")
        return cls(tuple(norm))

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def intersect_status(self, box, budget=DEFAULT_BUDGET):
        self._check_dim(box)
        if any(box.contains_point(p) for p in self.points):
            return Status.INTERSECTS
        return Status.FREE

    def dist_interval(self, box, budget=DEFAULT_BUDGET):
        self._check_dim(box)
        d = min(linf_dist(box, Box.point(p)) for p in self.points)
        return (d, d)

    def restricted(self, box):
        kept = tuple(p for p in self.points if box.contains_point(p))
        if not kept:
            return EmptyModel(self.dim)
        return PointsModel(kept)

    def misses_interior(self, box, budget=DEFAULT_BUDGET):
        return not any(box.open_interior_contains_point(p) for p in self.points)

    def to_json(self):
        return {"kind": "points",
                "points": [[frac_str(x) for x in p] for p in self.points]}


@dataclass(frozen=True)
class IFSModel(SetModel):
    """Attractor of contracting similarities x -> r*x + t with rational data.

    `hull` is a closed box mapped into itself by every map; the attractor is
    covered by the composed hull images at every refinement level, and each
    composed hull contains at least one attractor point.  Both facts drive
    the oracle.
    """

    maps: tuple  # tuple of (ratio: Fraction, shift: tuple[Fraction, ...])
    hull: Box

    kind = "ifs"

    @classmethod
    def make(cls, maps, hull: Box) -> "IFSModel":
        norm = tuple((Fraction(r), tuple(Fraction(t) for t in ts)) for r, ts in maps)
        if not norm:
            raise EmptySetError("IFS needs at least one map")
        for r, ts in norm:
            if not 0 < r < 1:
                raise ValueError(f"similarity ratio must be in (0,1), got {r}")
            if len(ts) != hull.dim:
                raise DimensionMismatch("shift dimension differs from hull")
            img_lo = tuple(r * a + t for a, t in zip(hull.lo, ts))
            img_hi = tuple(r * b + t for b, t in zip(hull.hi, ts))
            if any(il < a or ih > b for il, ih, a, b
                   in zip(img_lo, img_hi, hull.lo, hull.hi)):
                raise ValueError("every map must send the hull into itself")
        return cls(norm, hull)

    @property
    def dim(self) -> int:
        return self.hull.dim

    def _image(self, ratio: Fraction, shift) -> Box:
        return Box(tuple(ratio * a + t for a, t in zip(self.hull.lo, shift)),
                   tuple(ratio * b + t for b, t in zip(self.hull.hi, shift)))

    def _compose(self, ratio, shift):
        # (ratio, shift) o (r, t) applied as outer(inner(x))
        for r, t in self.maps:
            yield ratio * r, tuple(ratio * ti + s for ti, s in zip(t, shift))

    def intersect_status(self, box, budget=DEFAULT_BUDGET):
        self._check_dim(box)
        identity = (Fraction(1), (Fraction(0),) * self.dim)
        stack = [(identity[0], identity[1], 0)]
        undetermined = False
        nodes = 0
        while stack:
            ratio, shift, level = stack.pop()
            nodes += 1
            hull = self._image(ratio, shift)
            if closed_disjoint(hull, box):
                continue
            if inside_open(box, hull):
                return Status.INTERSECTS
            if level >= budget or nodes > _MAX_NODES:
                undetermined = True
                continue
            for r2, s2 in self._compose(ratio, shift):
                stack.append((r2, s2, level + 1))
        return Status.UNDETERMINED if undetermined else Status.FREE

    def dist_interval(self, box, budget=DEFAULT_BUDGET):
        self._check_dim(box)
        zero = Fraction(0)
        frontier = [(Fraction(1), (Fraction(0),) * self.dim)]
        diam0 = self.hull.max_side
        best_hi = linf_dist(box, self.hull) + diam0
        lo = zero
        for _ in range(budget):
            scored = []
            for ratio, shift in frontier:
                hull = self._image(ratio, shift)
                if inside_closed(box, hull):
                    # the hull carries an attractor point inside the closure
                    return (zero, zero)
                d = linf_dist(box, hull)
                reach = d + ratio * diam0
                if reach < best_hi:
                    best_hi = reach
                scored.append((d, ratio, shift))
            lo = min(d for d, _r, _s in scored)
            survivors = [(r, s) for d, r, s in scored if d <= best_hi]
            if len(survivors) * len(self.maps) > _MAX_NODES:
                return (lo, best_hi)
            nxt = []
            for ratio, shift in survivors:
                nxt.extend(self._compose(ratio, shift))
            frontier = nxt
        scored = [(linf_dist(box, self._image(r, s)), r, s) for r, s in frontier]
        if scored:
            lo = min(d for d, _r, _s in scored)
            for d, r, _s in scored:
                reach = d + r * diam0
                if reach < best_hi:
                    best_hi = reach
        return (lo, best_hi)

    def dist_below(self, box, threshold, budget=DEFAULT_BUDGET):
        self._check_dim(box)
        threshold = Fraction(threshold)
        frontier = [(Fraction(1), (Fraction(0),) * self.dim)]
        diam0 = self.hull.max_side
        for _ in range(budget):
            keep = []
            for ratio, shift in frontier:
                hull = self._image(ratio, shift)
                if inside_closed(box, hull):
                    return True
                d = linf_dist(box, hull)
                if d >= threshold:
                    continue  # this branch can never come closer
                if d + ratio * diam0 < threshold:
                    return True
                keep.append((ratio, shift))
            if not keep:
                return False
            if len(keep) * len(self.maps) > _MAX_NODES:
                return None
            frontier = []
            for ratio, shift in keep:
                frontier.extend(self._compose(ratio, shift))
        return None

    def misses_interior(self, box, budget=DEFAULT_BUDGET):
        identity = (Fraction(1), (Fraction(0),) * self.dim)
        stack = [(identity[0], identity[1], 0)]
        nodes = 0
        while stack:
            ratio, shift, level = stack.pop()
            nodes += 1
            hull = self._image(ratio, shift)
            if not meets_open(hull, box):
                continue
            if inside_open(box, hull):
                return False
            if level >= budget or nodes > _MAX_NODES:
                return False  # cannot certify
            for r2, s2 in self._compose(ratio, shift):
                stack.append((r2, s2, level + 1))
        return True

    def to_json(self):
        return {"kind": "ifs",
                "maps": [{"ratio": frac_str(r), "shift": [frac_str(t) for t in ts]}
                         for r, ts in self.maps],
                "hull": self.hull.to_json()}


@dataclass(frozen=True)
class UnionModel(SetModel):
    parts: tuple

    kind = "union"

    @classmethod
    def make(cls, parts) -> "UnionModel":
        parts = tuple(parts)
        if not parts:
            raise EmptySetError("union of no parts")
        dims = {p.dim for p in parts}
        if len(dims) != 1:
            raise DimensionMismatch("union of mixed dimensions")
        return cls(parts)

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    @property
    def is_empty(self) -> bool:
        return all(p.is_empty for p in self.parts)

    def intersect_status(self, box, budget=DEFAULT_BUDGET):
        undetermined = False
        for p in self.parts:
            st = p.intersect_status(box, budget)
            if st is Status.INTERSECTS:
                return Status.INTERSECTS
            if st is Status.UNDETERMINED:
                undetermined = True
        return Status.UNDETERMINED if undetermined else Status.FREE

    def dist_interval(self, box, budget=DEFAULT_BUDGET):
        live = [p for p in self.parts if not p.is_empty]
        if not live:
            raise EmptySetError("distance to an empty union")
        ivs = [p.dist_interval(box, budget) for p in live]
        return (min(lo for lo, _ in ivs), min(hi for _, hi in ivs))

    def dist_below(self, box, threshold, budget=DEFAULT_BUDGET):
        undecided = False
        for p in self.parts:
            ans = p.dist_below(box, threshold, budget)
            if ans is True:
                return True
            if ans is None:
                undecided = True
        return None if undecided else False

    def restricted(self, box):
        kept = [p.restricted(box) for p in self.parts]
        kept = [p for p in kept if not p.is_empty]
        if not kept:
            return EmptyModel(self.dim)
        return UnionModel(tuple(kept))

    def misses_interior(self, box, budget=DEFAULT_BUDGET):
        return all(p.misses_interior(box, budget) for p in self.parts)

    def to_json(self):
        return {"kind": "union", "parts": [p.to_json() for p in self.parts]}


def corner_set(cubes) -> PointsModel:
    """Point model of the lower ('left-down') corners of a cube family."""
    cubes = list(cubes)
    if not cubes:
        raise EmptyFamilyError("corner set of an empty family")
    dims = {q.dim for q in cubes}
    if len(dims) != 1:
        raise DimensionMismatch("cubes of mixed dimension")
    return PointsModel.make(q.lower_corner for q in cubes)


def cantor_middle_thirds() -> IFSModel:
    """The standard middle-thirds Cantor set on [0, 1]."""
    third = Fraction(1, 3)
    return IFSModel.make(
        [(third, (Fraction(0),)), (third, (Fraction(2, 3),))],
        Box.make([0], [1]),
    )


def model_from_json(obj) -> SetModel:
    kind = obj.get("kind")
    if kind == "points":
        return PointsModel.make([tuple(frac_parse(x) for x in p) for p in obj["points"]])
    if kind == "ifs":
        maps = [(frac_parse(m["ratio"]), tuple(frac_parse(t) for t in m["shift"]))
                for m in obj["maps"]]
        return IFSModel.make(maps, Box.from_json(obj["hull"]))
    if kind == "union":
        return UnionModel.make([model_from_json(p) for p in obj["parts"]])
    if kind == "corners":
        return corner_set([DyadicCube.from_json(c) for c in obj["family"]])
    if kind == "empty":
        return EmptyModel(int(obj["dim"]))
    raise ValueError(f"unknown set kind {kind!r}")
