"""Analytics for the family of cubes relatively close to a set.

A cube belongs to the gamma family when its distance to the set is below
gamma times its side.  Packing constants of that family are certified
against the dilation-and-covering bound, well-sparseness is obtained by
rebuilding a witness against the family's own corner set, and the dyadic
embedding inequality is evaluated with certified per-cell masses.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .analysis import (MuNotes, _mu_cell, mu_enclosure, mu_points_exact_1d)
from .enclosure import RatInterval, frac_parse, frac_str, pow_enclosure
from .errors import EmptyFamilyError, EmptySetError, NotParentClosed, UnresolvedMeasure
from .families import enumerate_DE, enumerate_Dgamma
from .lattice import DyadicCube, children, contains, cube_order_key, dilate
from .sets import (DEFAULT_BUDGET, PointsModel, SetModel, Status, UnionModel,
                   corner_set)
from .sparse import SparseWitness, build_witness, carleson_constant

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class GammaReport:
    gamma: Fraction
    n: int                        # minimal integer exceeding gamma
    family_size: int
    measured: Fraction            # packing constant of the gamma family
    base_constant: Fraction       # measured packing constant of the meeting family
    bound: Fraction               # base_constant * (gamma+1)^d * 6^d
    covering_counts: tuple        # per tested root: number of covering cubes
    max_covering: int
    clipped: bool                 # dilations left the unit root and were clipped

    def to_json(self):
        return {"gamma": frac_str(self.gamma), "n": self.n,
                "family_size": self.family_size,
                "measured": frac_str(self.measured),
                "base_constant": frac_str(self.base_constant),
                "bound": frac_str(self.bound),
                "max_covering": self.max_covering,
                "clipped": self.clipped}


def minimal_exceeding_integer(gamma: Fraction) -> int:
    g = Fraction(gamma)
    n = g.numerator // g.denominator + 1
    assert n > g >= n - 1
    return n


def _covering_cubes(R: DyadicCube, n: int):
    """Dyadic cubes of comparable size covering the clipped dilation of R.

    Side 2^-m is chosen with dilated_side/2 <= 2^-m < dilated_side, so at
    most 3 cubes per axis are needed; the dilation is clipped to the unit
    root before covering.
    """
    d = R.dim
    tilde = dilate(R, n)
    m = max(0, R.depth - (2 * n + 1).bit_length() + 1)
    side = Fraction(1, 1 << m)
    clipped = False
    ranges = []
    for lo, hi in zip(tilde.lo, tilde.hi):
        if lo < 0 or hi > 1:
            clipped = True
        lo = max(lo, _ZERO)
        hi = min(hi, _ONE)
        first = lo // side
        last = -((-hi) // side) - 1  # ceil(hi/side) - 1
        last = min(last, (1 << m) - 1)
        ranges.append(range(int(first), int(last) + 1))
    cubes = []

    def rec(axis, prefix):
        if axis == d:
            cubes.append(DyadicCube(m, tuple(prefix)))
            return
        for k in ranges[axis]:
            rec(axis + 1, prefix + [k])

    rec(0, [])
    return cubes, clipped


def gamma_carleson(E: SetModel, R: DyadicCube, gamma, J: int,
                   budget: int = DEFAULT_BUDGET) -> GammaReport:
    """Measure the gamma family's packing constant and certify the covering bound.

    The comparison constant is the measured packing constant of the plain
    meeting family over covering cubes of the dilated root, scaled by
    (gamma+1)^d * 6^d.
    """
    gamma = Fraction(gamma)
    if E.is_empty:
        raise EmptySetError("gamma family of an empty set")
    family = enumerate_Dgamma(E, R, gamma, J, budget)
    if not family.members:
        raise EmptyFamilyError(f"{R} is not within reach of the set at gamma={gamma}")
    measured_report = carleson_constant(family)
    measured = measured_report.xi_hat
    n = minimal_exceeding_integer(gamma)

    d = R.dim
    root0 = DyadicCube.root(d)
    DE = enumerate_DE(E, root0, R.depth + J, budget)
    de_counts = {}
    for q in DE.members:
        de_counts.setdefault((q.depth, q.coords), q.volume)

    covering_counts = []
    # floor at 1: the comparison constant of a meeting family never drops
    # below 1, while a clipped covering measurement can undershoot
    base_constant = _ONE
    clipped_any = False
    test_roots = {R} | set(family.members)
    for r in sorted(test_roots, key=cube_order_key):
        cover, clipped = _covering_cubes(r, n)
        clipped_any = clipped_any or clipped
        covering_counts.append(len(cover))
        for ri in cover:
            mass = _ZERO
            for q in DE.members:
                if contains(ri, q):
                    mass += q.volume
            ratio = mass / ri.volume
            if ratio > base_constant:
                base_constant = ratio
    bound = base_constant * (gamma + 1) ** d * Fraction(6) ** d
    return GammaReport(gamma, n, len(family.members), measured, base_constant,
                       bound, tuple(covering_counts), max(covering_counts),
                       clipped_any)


def gamma_witness(E: SetModel, R: DyadicCube, gamma, J: int,
                  search_depth: int = 6,
                  budget: int = DEFAULT_BUDGET) -> SparseWitness:
    """Disjoint free cubes for the gamma family, free for the set itself too.

    Route: the corner set of the family stands in for the infinite corner
    construction, whose untruncated version would contain the closure of E.
    At finite depth that containment can fail, so the witness is built
    against the union of corner set and underlying set, then restricted to
    the family members; freeness for both models is certified afterwards.
    """
    gamma = Fraction(gamma)
    family = enumerate_Dgamma(E, R, gamma, J, budget)
    if not family.members:
        raise EmptyFamilyError("gamma family is empty")
    for q in family.members:
        if q.depth == R.depth:
            continue
        p = q.ancestor_at(q.depth - 1)
        if p not in family:
            raise NotParentClosed(q)
    tilde = corner_set(family.members)
    combined = UnionModel.make([tilde, E])
    witness = build_witness(combined, R, J, search_depth, budget)
    restricted = witness.restrict_to(family.members)
    for a in restricted.assignments:
        if tilde.intersect_status(a.free_cube.box, budget) is not Status.FREE:
            raise UnresolvedMeasure(
                f"{a.free_cube} not certified free for the corner set")
        if E.intersect_status(a.free_cube.box, budget) is not Status.FREE:
            raise UnresolvedMeasure(
                f"{a.free_cube} not certified free for the underlying set")
    return restricted


@dataclass(frozen=True)
class EmbeddingQuery:
    p: Fraction
    alpha: Fraction
    gamma: Fraction
    root: DyadicCube
    J: int
    coeffs: dict                  # DyadicCube -> nonnegative Fraction

    @classmethod
    def make(cls, p, alpha, gamma, root, J, coeffs) -> "EmbeddingQuery":
        p = Fraction(p)
        if p < 1:
            raise ValueError("exponent p must be >= 1")
        norm = {}
        for q, a in coeffs.items():
            a = Fraction(a)
            if a < 0:
                raise ValueError("coefficients must be nonnegative")
            if a > 0:
                norm[q] = a
        return cls(p, Fraction(alpha), Fraction(gamma), root, int(J), norm)

    def to_json(self):
        return {"p": frac_str(self.p), "alpha": frac_str(self.alpha),
                "gamma": frac_str(self.gamma), "R": self.root.to_json(),
                "J": self.J,
                "coeffs": [{"q": q.to_json(), "a": frac_str(a)}
                           for q, a in sorted(self.coeffs.items(),
                                              key=lambda kv: cube_order_key(kv[0]))]}

    @classmethod
    def from_json(cls, obj) -> "EmbeddingQuery":
        coeffs = {DyadicCube.from_json(e["q"]): frac_parse(e["a"])
                  for e in obj["coeffs"]}
        return cls.make(frac_parse(obj["p"]), frac_parse(obj["alpha"]),
                        frac_parse(obj["gamma"]), DyadicCube.from_json(obj["R"]),
                        int(obj["J"]), coeffs)


@dataclass(frozen=True)
class EmbeddingReport:
    lhs: RatInterval
    rhs: RatInterval
    ratio: RatInterval
    cells: int
    mass_lower_check: str   # "certified" | "inconclusive" | "skipped"

    def to_json(self):
        return {"lhs": self.lhs.to_json(), "rhs": self.rhs.to_json(),
                "ratio": self.ratio.to_json(), "cells": self.cells,
                "mass_lower_check": self.mass_lower_check}


def _cell_mass(E, cube, alpha, budget, split_budget) -> RatInterval:
    """Certified mass of one cell; sharp closed form for 1-d point sets."""
    if isinstance(E, PointsModel) and E.dim == 1:
        enc = mu_points_exact_1d(E, cube.box, alpha)
        if enc is None:
            raise UnresolvedMeasure(f"mass of {cube} diverges at alpha={alpha}")
        return enc
    notes = MuNotes()
    local = E.restricted(cube.box)
    lower, upper = _mu_cell(E, local, cube, alpha, split_budget, False,
                            budget, notes)
    if upper is None:
        raise UnresolvedMeasure(f"no finite certified mass for cell {cube}")
    return RatInterval(lower, upper)


def _interval_pow(iv: RatInterval, e: Fraction) -> RatInterval:
    # t^e is monotone increasing on t >= 0 for e > 0
    lo = _ZERO if iv.lo == 0 else pow_enclosure(iv.lo, e).lo
    hi = _ZERO if iv.hi == 0 else pow_enclosure(iv.hi, e).hi
    return RatInterval(lo, hi)


def embedding_check(E: SetModel, query: EmbeddingQuery,
                    budget: int = DEFAULT_BUDGET,
                    split_budget: int = 20) -> EmbeddingReport:
    """Certified p-norm enclosures for the stack sum and stack sup of a query.

    Both sides are piecewise constant on the cells where the coefficient
    stack is locally constant, so each norm is a finite weighted sum of
    certified cell masses.  Also certifies, when the root belongs to the
    family, that the root's plain volume power is dominated by
    (gamma+2)^alpha times its weighted mass.
    """
    family = enumerate_Dgamma(E, query.root, query.gamma, query.J, budget)
    for q in query.coeffs:
        if q not in family:
            raise ValueError(f"coefficient cube {q} is not a family member")

    # ancestors-or-equals of coefficient cubes: the only places the stack
    # can still change deeper down
    coeff_prefixes = set()
    for q in query.coeffs:
        cur = q
        while True:
            coeff_prefixes.add((cur.depth, cur.coords))
            if cur.depth == query.root.depth:
                break
            cur = cur.ancestor_at(cur.depth - 1)

    def has_coeff_below_or_at(q):
        return (q.depth, q.coords) in coeff_prefixes

    cells = []  # (cube, stack sum, stack sup) with the stack constant on cube

    def descend(q, total, peak):
        a = query.coeffs.get(q, _ZERO)
        total += a
        if a > peak:
            peak = a
        kids = children(q)
        if not any(has_coeff_below_or_at(c) for c in kids):
            if total > 0:
                cells.append((q, total, peak))
            return
        for c in kids:
            if has_coeff_below_or_at(c):
                descend(c, total, peak)
            elif total > 0:
                cells.append((c, total, peak))

    if query.coeffs:
        descend(query.root, _ZERO, _ZERO)

    lhs_p = RatInterval.point(0)
    rhs_p = RatInterval.point(0)
    for cube, total, peak in cells:
        mass = _cell_mass(E, cube, query.alpha, budget, split_budget)
        lhs_p = lhs_p + _interval_pow(RatInterval.point(total), query.p) * mass
        rhs_p = rhs_p + _interval_pow(RatInterval.point(peak), query.p) * mass
    inv_p = 1 / query.p
    lhs = _interval_pow(lhs_p, inv_p)
    rhs = _interval_pow(rhs_p, inv_p)
    if rhs.hi == 0:
        ratio = RatInterval.point(0)
    elif rhs.lo == 0:
        raise UnresolvedMeasure("sup-side mass has no positive lower bound")
    else:
        ratio = lhs / rhs

    mass_check = "skipped"
    if query.root in family:
        d = query.root.dim
        mu_root = mu_enclosure(E, query.root, query.alpha, query.J, budget,
                               split_budget)
        vol_pow = pow_enclosure(query.root.volume, 1 - query.alpha / d)
        scale = pow_enclosure(query.gamma + 2, query.alpha)
        mass_check = "certified" if vol_pow.hi <= scale.lo * mu_root.lower \
            else "inconclusive"
    return EmbeddingReport(lhs, rhs, ratio, len(cells), mass_check)
