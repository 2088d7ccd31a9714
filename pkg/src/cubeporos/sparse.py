"""Carleson packing measurement and construction of disjoint free-cube witnesses.

The witness builder runs a level-by-level induction: every E-meeting cube
receives its own free cube, and a cube that already holds a cube assigned to
an ancestor places its own pick inside a different child, so own and
inherited cubes never share a child.  The construction is then extended
upward from the requested root to the lattice root, assigning each ancestor
a free cube inside a sibling subtree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .analysis import largest_free_cube
from .enclosure import frac_str
from .errors import EmptyFamilyError, PorosityFailure, RootIsFree
from .families import CubeFamily
from .lattice import DyadicCube, children, contains, cube_order_key, parent
from .sets import DEFAULT_BUDGET, SetModel, Status

_ZERO = Fraction(0)


@dataclass(frozen=True)
class CarlesonReport:
    family_size: int
    per_root: tuple            # ((root cube, exact ratio), ...) in canonical order
    xi_hat: Fraction

    def to_json(self):
        return {"family_size": self.family_size,
                "xi_hat": frac_str(self.xi_hat),
                "per_root": [{"root": r.to_json(), "ratio": frac_str(x)}
                             for r, x in self.per_root]}


def carleson_constant(S: CubeFamily, test_roots=None) -> CarlesonReport:
    """Exact packing ratios sum(|Q| : Q in S, Q inside R') / |R'| per test root.

    Defaults to testing every member of S plus the family root.
    """
    if not S.members:
        raise EmptyFamilyError("Carleson constant of an empty family")
    if test_roots is None:
        roots = list(S.members)
        if S.root not in S:
            roots.append(S.root)
    else:
        roots = list(test_roots)
        if not roots:
            raise EmptyFamilyError("no test roots supplied")
    acc = {(r.depth, r.coords): _ZERO for r in roots}
    min_depth = min(r.depth for r in roots)
    for q in S.members:
        vol = q.volume
        coords = q.coords
        for depth in range(q.depth, min_depth - 1, -1):
            key = (depth, coords)
            if key in acc:
                acc[key] += vol
            coords = tuple(k >> 1 for k in coords)
    per_root = []
    seen = set()
    for r in sorted(roots, key=cube_order_key):
        key = (r.depth, r.coords)
        if key in seen:
            continue
        seen.add(key)
        per_root.append((r, acc[key] / r.volume))
    xi_hat = max(x for _, x in per_root)
    return CarlesonReport(len(S.members), tuple(per_root), xi_hat)


@dataclass(frozen=True)
class WitnessAssignment:
    cube: DyadicCube
    free_cube: DyadicCube
    inherited_from: DyadicCube | None   # ancestor whose free cube this cube carried


@dataclass(frozen=True)
class SparseWitness:
    assignments: tuple        # WitnessAssignment in canonical cube order
    lambda_hat: Fraction

    def __len__(self):
        return len(self.assignments)

    def assignment_map(self) -> dict:
        return {a.cube: a.free_cube for a in self.assignments}

    def restrict_to(self, cubes) -> "SparseWitness":
        keep = {(q.depth, q.coords) for q in cubes}
        kept = tuple(a for a in self.assignments
                     if (a.cube.depth, a.cube.coords) in keep)
        lam = max((a.cube.volume / a.free_cube.volume for a in kept), default=Fraction(1))
        return SparseWitness(kept, lam)

    def to_json(self):
        return {"assignments": [
            {"q": a.cube.to_json(), "m": a.free_cube.to_json(),
             "inherited_from": a.inherited_from.to_json() if a.inherited_from else None}
            for a in self.assignments],
            "lambda_hat": frac_str(self.lambda_hat)}

    @classmethod
    def from_json(cls, obj) -> "SparseWitness":
        from .enclosure import frac_parse
        assignments = tuple(WitnessAssignment(
            DyadicCube.from_json(e["q"]), DyadicCube.from_json(e["m"]),
            DyadicCube.from_json(e["inherited_from"]) if e["inherited_from"] else None)
            for e in obj["assignments"])
        return cls(assignments, frac_parse(obj["lambda_hat"]))


def _carrier_child(q: DyadicCube, inner: DyadicCube) -> DyadicCube:
    # the child of q containing `inner` (inner strictly deeper than q)
    return inner.ancestor_at(q.depth + 1)


class _WitnessBuilder:
    def __init__(self, E, search_depth, budget, max_depth):
        self.E = E
        self.search_depth = search_depth
        self.budget = budget
        self.max_depth = max_depth
        self.assignments = {}

    def _status(self, model, cube):
        return model.intersect_status(cube.box, self.budget)

    def assign(self, q, local, inherited, inherited_origin):
        """Assign q its own free cube, honoring an inherited one, then recurse."""
        if inherited is None:
            m = largest_free_cube(self.E, q, self.search_depth, self.budget)
            if m is None:
                raise PorosityFailure(q)
        else:
            s_star = _carrier_child(q, inherited) if inherited.depth > q.depth + 1 \
                else inherited
            m = None
            meeting = []
            for c in children(q):
                if c == s_star:
                    continue
                if self._status(local.restricted(c.box), c) is Status.FREE:
                    m = c  # a whole free child avoiding the inherited cube
                    break
                meeting.append(c)
            if m is None:
                # canonical-order-first meeting child that avoids the inherited cube
                c = meeting[0]
                m = largest_free_cube(self.E, c, self.search_depth, self.budget)
                if m is None:
                    raise PorosityFailure(c)
        self.assignments[q] = WitnessAssignment(q, m, inherited_origin)
        if q.depth >= self.max_depth:
            return
        for c in children(q):
            sub = local.restricted(c.box)
            if self._status(sub, c) is Status.FREE:
                continue
            inh, origin = None, None
            if inherited is not None and contains(c, inherited) and c != inherited:
                inh, origin = inherited, inherited_origin
            if contains(c, m) and c != m:
                # own cube and inherited cube never share a child by construction
                inh, origin = m, q
            self.assign(c, sub, inh, origin)


def build_witness(E: SetModel, R: DyadicCube, J: int, search_depth: int = 6,
                  budget: int = DEFAULT_BUDGET) -> SparseWitness:
    """Disjoint free cubes M(Q), one per E-meeting cube Q, down to R.depth + J.

    Raises PorosityFailure naming the first cube with no free descendant
    within `search_depth`; that distinguishes a budget miss from a disproof.
    """
    local = E.restricted(R.box)
    if local.intersect_status(R.box, budget) is Status.FREE:
        raise RootIsFree(f"{R} does not meet the set")
    builder = _WitnessBuilder(E, search_depth, budget, R.depth + J)
    builder.assign(R, local, None, None)

    # extend the construction upward: each ancestor takes the best free cube
    # found inside a sibling subtree, then the siblings are filled in.
    cur = R
    while cur.depth > 0:
        p = parent(cur)
        best = None
        for c in children(p):
            if c == cur:
                continue
            m = largest_free_cube(E, c, search_depth, budget)
            if m is None:
                continue
            key = (-m.volume, cube_order_key(m))
            if best is None or key < best[0]:
                best = (key, m)
        if best is None:
            raise PorosityFailure(p)
        m_p = best[1]
        builder.assignments[p] = WitnessAssignment(p, m_p, None)
        for c in children(p):
            if c == cur:
                continue
            sub = E.restricted(c.box)
            if sub.intersect_status(c.box, budget) is Status.FREE:
                continue
            if contains(c, m_p) and c != m_p:
                builder.assign(c, sub, m_p, p)
            else:
                builder.assign(c, sub, None, None)
        cur = p

    assignments = tuple(sorted(builder.assignments.values(),
                               key=lambda a: cube_order_key(a.cube)))
    lambda_hat = max(a.cube.volume / a.free_cube.volume for a in assignments)
    return SparseWitness(assignments, lambda_hat)


@dataclass(frozen=True)
class WitnessVerdict:
    ok: bool
    reason: str | None = None
    cubes: tuple = ()

    def __bool__(self):
        return self.ok


def verify_witness(W: SparseWitness, E: SetModel,
                   budget: int = DEFAULT_BUDGET) -> WitnessVerdict:
    """Re-check containment, freeness, disjointness and the volume ratio bound.

    Disjointness uses ancestor-prefix lookups rather than the relate predicate,
    so the check is independent of the construction path.
    """
    seen = set()
    for a in W.assignments:
        if (a.cube.depth, a.cube.coords) in seen:
            return WitnessVerdict(False, "duplicate assignment", (a.cube,))
        seen.add((a.cube.depth, a.cube.coords))
        m = a.free_cube
        if m.depth <= a.cube.depth or m.ancestor_at(a.cube.depth) != a.cube:
            return WitnessVerdict(False, "free cube not strictly inside its cube",
                                  (a.cube, m))
        if a.cube.volume > W.lambda_hat * m.volume:
            return WitnessVerdict(False, "volume ratio exceeds lambda_hat",
                                  (a.cube, m))
        if E.intersect_status(m.box, budget) is not Status.FREE:
            return WitnessVerdict(False, "assigned cube is not certified free",
                                  (a.cube, m))
    placed = {}
    for a in W.assignments:
        key = (a.free_cube.depth, a.free_cube.coords)
        if key in placed:
            return WitnessVerdict(False, "two cubes share one free cube",
                                  (placed[key], a.cube))
        placed[key] = a.cube
    for a in W.assignments:
        m = a.free_cube
        coords = m.coords
        for depth in range(m.depth - 1, -1, -1):
            coords = tuple(k >> 1 for k in coords)
            other = placed.get((depth, coords))
            if other is not None:
                return WitnessVerdict(False, "overlapping free cubes",
                                      (other, a.cube))
    return WitnessVerdict(True)


def audit_single_inheritance(W: SparseWitness) -> WitnessVerdict:
    """Check that no cube carries more than one ancestor cube, and that own
    and inherited cubes occupy distinct children."""
    index = {a.cube: a for a in W.assignments}
    carried = {}
    for a in W.assignments:
        m = a.free_cube
        # every strict intermediate cube on the path q -> M(q) that has its
        # own assignment is carrying m as an inherited cube
        for depth in range(a.cube.depth + 1, m.depth):
            mid = m.ancestor_at(depth)
            if mid in index:
                carried.setdefault(mid, []).append(a.cube)
    for mid, owners in carried.items():
        if len(owners) > 1:
            return WitnessVerdict(False, "cube inherits more than one ancestor cube",
                                  (mid,) + tuple(owners))
        own = index[mid].free_cube
        inherited = index[owners[0]].free_cube
        if _carrier_child(mid, own) == _carrier_child(mid, inherited):
            return WitnessVerdict(False, "own and inherited cubes share a child",
                                  (mid,))
    return WitnessVerdict(True)
