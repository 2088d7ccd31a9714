"""Finite-depth enumeration of the cube families attached to a set model.

Three families matter here: the cubes meeting E, the maximal free cubes
below a root (a Whitney-type decomposition with exact residual accounting),
and the gamma-neighborhood family of cubes relatively close to E.
Truncation depth is always explicit; deeper levels are never implied.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .enclosure import frac_parse, frac_str
from .errors import EmptySetError, RootIsFree
from .lattice import DyadicCube, children, cube_order_key
from .sets import DEFAULT_BUDGET, SetModel, Status

PROVENANCE_DE = "DE"
PROVENANCE_FE = "FE"
PROVENANCE_DGAMMA = "DGAMMA"
PROVENANCE_USER = "USER"


@dataclass(frozen=True)
class CubeFamily:
    root: DyadicCube
    members: tuple
    J: int
    provenance: str

    @classmethod
    def make(cls, root, cubes, J, provenance=PROVENANCE_USER) -> "CubeFamily":
        members = tuple(sorted(set(cubes), key=cube_order_key))
        return cls(root, members, J, provenance)

    @cached_property
    def _index(self):
        return frozenset((q.depth, q.coords) for q in self.members)

    def __contains__(self, q: DyadicCube) -> bool:
        return (q.depth, q.coords) in self._index

    def __len__(self) -> int:
        return len(self.members)

    def level_counts(self) -> dict:
        """Member count per absolute depth."""
        counts = {}
        for q in self.members:
            counts[q.depth] = counts.get(q.depth, 0) + 1
        return counts

    def to_json(self):
        return {"root": self.root.to_json(), "J": self.J,
                "provenance": self.provenance,
                "members": [q.to_json() for q in self.members]}

    @classmethod
    def from_json(cls, obj) -> "CubeFamily":
        return cls.make(DyadicCube.from_json(obj["root"]),
                        [DyadicCube.from_json(c) for c in obj["members"]],
                        int(obj["J"]), obj.get("provenance", PROVENANCE_USER))


@dataclass(frozen=True)
class FreeDecomposition:
    """Partition of a root into maximal free cubes plus depth-J residual cubes.

    Exact identity: sum of free volumes + sum of residual volumes = |root|.
    Each free cube carries a certified distance interval to E.
    """

    root: DyadicCube
    free: tuple       # tuple of (DyadicCube, (dist_lo, dist_hi))
    residual: tuple   # cubes at exact offset J still meeting E
    J: int

    def free_volume(self) -> Fraction:
        return sum((q.volume for q, _ in self.free), Fraction(0))

    def residual_volume(self) -> Fraction:
        return sum((q.volume for q in self.residual), Fraction(0))

    def free_level_counts(self) -> dict:
        counts = {}
        for q, _ in self.free:
            counts[q.depth] = counts.get(q.depth, 0) + 1
        return counts

    def to_json(self):
        return {"root": self.root.to_json(), "J": self.J, "provenance": PROVENANCE_FE,
                "free": [{"cube": q.to_json(),
                          "dist": [frac_str(lo), frac_str(hi)]}
                         for q, (lo, hi) in self.free],
                "residual": [q.to_json() for q in self.residual]}

    @classmethod
    def from_json(cls, obj) -> "FreeDecomposition":
        free = tuple((DyadicCube.from_json(e["cube"]),
                      (frac_parse(e["dist"][0]), frac_parse(e["dist"][1])))
                     for e in obj["free"])
        residual = tuple(DyadicCube.from_json(c) for c in obj["residual"])
        return cls(DyadicCube.from_json(obj["root"]), free, residual, int(obj["J"]))


def enumerate_DE(E: SetModel, R: DyadicCube, J: int,
                 budget: int = DEFAULT_BUDGET) -> CubeFamily:
    """All dyadic subcubes of R, to depth offset J, that meet E.

    Pruned descent: a certified-free cube closes its whole subtree.
    Undetermined oracle answers count as meeting (conservative).
    """
    if J < 0:
        raise ValueError("truncation depth must be >= 0")
    members = []
    local = E.restricted(R.box)
    if local.intersect_status(R.box, budget) is not Status.FREE:
        stack = [(R, local)]
        while stack:
            q, model = stack.pop()
            members.append(q)
            if q.depth - R.depth >= J:
                continue
            for c in children(q):
                sub = model.restricted(c.box)
                if sub.intersect_status(c.box, budget) is not Status.FREE:
                    stack.append((c, sub))
    return CubeFamily.make(R, members, J, PROVENANCE_DE)


def enumerate_FE(E: SetModel, R: DyadicCube, J: int,
                 budget: int = DEFAULT_BUDGET,
                 with_distances: bool = True) -> FreeDecomposition:
    """Maximal free cubes below R (offsets 1..J) plus the meeting residual at J."""
    if J < 0:
        raise ValueError("truncation depth must be >= 0")
    local = E.restricted(R.box)
    if local.intersect_status(R.box, budget) is Status.FREE:
        raise RootIsFree(f"{R} does not meet the set; no decomposition")
    free, residual = [], []
    stack = [(R, local)]
    while stack:
        q, model = stack.pop()
        if q.depth - R.depth >= J:
            residual.append(q)
            continue
        for c in children(q):
            sub = model.restricted(c.box)
            if sub.intersect_status(c.box, budget) is Status.FREE:
                free.append(c)
            else:
                stack.append((c, sub))
    free.sort(key=cube_order_key)
    residual.sort(key=cube_order_key)
    if with_distances:
        free_entries = tuple((q, E.dist_interval(q.box, budget)) for q in free)
    else:
        zero = Fraction(0)
        free_entries = tuple((q, (zero, zero)) for q in free)
    return FreeDecomposition(R, free_entries, tuple(residual), J)


def enumerate_Dgamma(E: SetModel, R: DyadicCube, gamma, J: int,
                     budget: int = DEFAULT_BUDGET) -> CubeFamily:
    """Cubes Q below R with dist(Q, E) < gamma * side(Q), to depth offset J.

    Strict inequality; a cube whose certified distance lower bound already
    reaches gamma*side is excluded together with its whole subtree (children
    can only be farther relative to their smaller side).
    """
    gamma = Fraction(gamma)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if E.is_empty:
        raise EmptySetError("gamma family of the empty set")
    if J < 0:
        raise ValueError("truncation depth must be >= 0")
    members = []
    stack = [R]
    while stack:
        q = stack.pop()
        if E.dist_below(q.box, gamma * q.side, budget) is False:
            continue  # certified dist >= gamma*side; children only get farther
        members.append(q)
        if q.depth - R.depth < J:
            stack.extend(children(q))
    return CubeFamily.make(R, members, J, PROVENANCE_DGAMMA)
