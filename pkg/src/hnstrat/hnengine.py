"""A small Harder-Narasimhan engine.

The abstract input is a finite poset of subobjects, each labelled by a rank
and a degree.  Its HN polygon is the upper concave envelope of the labels,
and the HN filtration is found greedily: above the current step, take the
subobject of largest slope, and among those the one of largest rank.  When
two incomparable subobjects tie, the lattice does not satisfy the axioms
that make the filtration unique, and :class:`AmbiguousMaximizer` is raised
rather than picking one.

Two concrete families feed the engine.

* Block-scalar modifications: a direct sum of simple bundles ``O(d/h)``,
  each modified at the marked point by a scalar twist of type ``a``.  Each
  summand is semistable of slope ``d/h + a``, so the HN polygon is the
  sorted list of block slopes.  The subsets of blocks form a lattice that
  serves as an independent check.
* Rational filtered vector spaces: the columns of an invertible matrix
  ``g`` span a flag, and column ``j`` carries the weight ``jumps[j]``.
  Degrees of subspaces only need ranks of rational matrices.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .rootdata import Number, sort_desc


class HNFormalismError(ValueError):
    """The input does not behave like a category with HN filtrations."""


class AmbiguousMaximizer(HNFormalismError):
    """Two incomparable subobjects share the maximal slope and rank."""


Point = tuple[int, Fraction]


# -- polygons ----------------------------------------------------------------


@dataclass(frozen=True)
class Polygon:
    """Piecewise linear graph through integral abscissae, starting at the origin."""

    vertices: tuple[Point, ...]

    def __post_init__(self) -> None:
        verts = tuple((int(x), Fraction(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if not verts or verts[0] != (0, 0):
            raise ValueError("a polygon starts at (0, 0)")
        if any(a[0] >= b[0] for a, b in zip(verts, verts[1:])):
            raise ValueError("polygon abscissae must be strictly increasing")

    @classmethod
    def from_slopes(cls, slopes: Iterable[Number]) -> Polygon:
        """Polygon with one unit step per slope, collinear vertices dropped."""
        pts: list[Point] = [(0, Fraction(0))]
        for s in slopes:
            x, y = pts[-1]
            pts.append((x + 1, y + Fraction(s)))
        return cls(tuple(pts)).simplified()

    @property
    def rank(self) -> int:
        return self.vertices[-1][0]

    @property
    def degree(self) -> Fraction:
        return self.vertices[-1][1]

    def segment_slopes(self) -> list[Fraction]:
        return [Fraction(y2 - y1) / (x2 - x1) for (x1, y1), (x2, y2) in zip(self.vertices, self.vertices[1:])]

    def slopes(self) -> tuple[Fraction, ...]:
        """Slope of each unit step, in order."""
        out: list[Fraction] = []
        for s, ((x1, _), (x2, _)) in zip(self.segment_slopes(), zip(self.vertices, self.vertices[1:])):
            out.extend([s] * (x2 - x1))
        return tuple(out)

    def at(self, x: Number) -> Fraction:
        for (x1, y1), (x2, y2) in zip(self.vertices, self.vertices[1:]):
            if x1 <= x <= x2:
                return y1 + (y2 - y1) * Fraction(x - x1, x2 - x1)
        if x == 0:
            return Fraction(0)
        raise ValueError(f"{x} outside [0, {self.rank}]")

    def is_concave(self) -> bool:
        s = self.segment_slopes()
        return all(a > b for a, b in zip(s, s[1:]))

    def simplified(self) -> Polygon:
        """Drop vertices where the slope does not change."""
        verts = list(self.vertices)
        out = [verts[0]]
        for i in range(1, len(verts) - 1):
            (x0, y0), (x1, y1), (x2, y2) = out[-1], verts[i], verts[i + 1]
            if (y1 - y0) * (x2 - x1) != (y2 - y1) * (x1 - x0):
                out.append(verts[i])
        if len(verts) > 1:
            out.append(verts[-1])
        return Polygon(tuple(out))

    def __str__(self) -> str:
        return " ".join(f"({x}, {y})" for x, y in self.vertices)


def upper_envelope(points: Iterable[tuple[int, Number]]) -> Polygon:
    """Upper concave envelope of a finite point set containing the origin."""
    best: dict[int, Fraction] = {}
    for x, y in points:
        y = Fraction(y)
        if x not in best or y > best[x]:
            best[x] = y
    hull: list[Point] = []
    for p in sorted(best.items()):
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            if (x1 - x0) * (p[1] - y0) - (y1 - y0) * (p[0] - x0) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return Polygon(tuple(hull))


# -- subobject lattices --------------------------------------------------------


class SubobjectLattice:
    """Finite poset of subobjects labelled by ``(rank, degree)``.

    The order is given either as generating relations ``(x, y)`` meaning
    ``x <= y`` or as a predicate ``leq(x, y)``.
    """

    def __init__(
        self,
        labels: Mapping[Hashable, tuple[int, int]],
        relations: Iterable[tuple[Hashable, Hashable]] = (),
        leq: Callable[[Hashable, Hashable], bool] | None = None,
    ) -> None:
        self.elements: tuple[Hashable, ...] = tuple(labels)
        self.labels = {e: (int(r), int(d)) for e, (r, d) in labels.items()}
        if leq is not None:
            self._up = {e: frozenset(f for f in self.elements if leq(e, f)) for e in self.elements}
        else:
            self._up = self._closure(relations)
        self._validate()

    def _closure(self, relations: Iterable[tuple[Hashable, Hashable]]) -> dict:
        succ: dict = {e: set() for e in self.elements}
        for x, y in relations:
            if x not in succ or y not in succ:
                raise ValueError(f"relation ({x!r}, {y!r}) mentions an unknown element")
            succ[x].add(y)
        up = {}
        for e in self.elements:
            seen, stack = {e}, [e]
            while stack:
                for f in succ[stack.pop()]:
                    if f not in seen:
                        seen.add(f)
                        stack.append(f)
            up[e] = frozenset(seen)
        return up

    def _validate(self) -> None:
        for e in self.elements:
            if e not in self._up[e]:
                raise ValueError("order must be reflexive")
            for f in self._up[e]:
                if f != e and e in self._up[f]:
                    raise ValueError(f"order is not antisymmetric: {e!r} and {f!r}")
                if f != e and self.rank(f) <= self.rank(e):
                    raise ValueError(f"rank does not increase from {e!r} to {f!r}")
        bottoms = [e for e in self.elements if len(self._up[e]) == len(self.elements)]
        tops = [e for e in self.elements if all(e in self._up[f] for f in self.elements)]
        if len(bottoms) != 1 or len(tops) != 1:
            raise ValueError("a subobject lattice needs a unique bottom and a unique top")
        self.bottom, self.top = bottoms[0], tops[0]
        if self.labels[self.bottom] != (0, 0):
            raise ValueError("the zero subobject must have rank 0 and degree 0")

    @classmethod
    def block_subsets(cls, pieces: Sequence[tuple[int, int]]) -> SubobjectLattice:
        """Boolean lattice of sub-sums of ``pieces``, given as ``(rank, degree)`` pairs."""
        labels = {}
        for k in range(len(pieces) + 1):
            for S in itertools.combinations(range(len(pieces)), k):
                labels[frozenset(S)] = (sum(pieces[i][0] for i in S), sum(pieces[i][1] for i in S))
        return cls(labels, leq=lambda a, b: a <= b)

    def rank(self, e: Hashable) -> int:
        return self.labels[e][0]

    def deg(self, e: Hashable) -> int:
        return self.labels[e][1]

    def leq(self, a: Hashable, b: Hashable) -> bool:
        return b in self._up[a]

    def lt(self, a: Hashable, b: Hashable) -> bool:
        return a != b and self.leq(a, b)

    def points(self) -> list[tuple[int, int]]:
        return [self.labels[e] for e in self.elements]

    def __contains__(self, e: object) -> bool:
        return e in self.labels

    def __len__(self) -> int:
        return len(self.elements)


def hn_polygon_lattice(L: SubobjectLattice) -> Polygon:
    """Upper concave envelope of the labels of all subobjects."""
    return upper_envelope(L.points())


def chain_polygon(L: SubobjectLattice, chain: Sequence[Hashable]) -> Polygon:
    return Polygon(tuple(L.labels[e] for e in chain))


def hn_filtration_lattice(L: SubobjectLattice) -> list[Hashable]:
    """The HN filtration as a chain from bottom to top."""
    chain = [L.bottom]
    while chain[-1] != L.top:
        cur = chain[-1]
        r0, d0 = L.labels[cur]
        above = [e for e in L.elements if L.lt(cur, e)]
        key = {e: (Fraction(L.deg(e) - d0, L.rank(e) - r0), L.rank(e)) for e in above}
        best = max(key.values())
        winners = [e for e in above if key[e] == best]
        if len(winners) > 1:
            raise AmbiguousMaximizer(
                f"subobjects {winners!r} tie at slope {best[0]} and rank {best[1]}"
            )
        chain.append(winners[0])
    poly = chain_polygon(L, chain)
    if not poly.is_concave():
        raise HNFormalismError("greedy filtration does not have strictly decreasing slopes")
    if poly.simplified() != hn_polygon_lattice(L):
        raise HNFormalismError("greedy filtration misses the concave envelope of the lattice")
    return chain


class Verdict(str, enum.Enum):
    BELOW = "below"
    EQUAL_REFINEMENT = "equal_refinement"


def compare_filtration(L: SubobjectLattice, chain: Sequence[Hashable], hn: Polygon | None = None) -> Verdict:
    """Compare the polygon of a filtration with the HN polygon.

    ``chain`` must be strictly increasing in ``L``; the bottom and top are
    added when missing.
    """
    chain = list(chain)
    for e in chain:
        if e not in L:
            raise ValueError(f"{e!r} is not an element of the lattice")
    if not chain or chain[0] != L.bottom:
        chain.insert(0, L.bottom)
    if chain[-1] != L.top:
        chain.append(L.top)
    if any(not L.lt(a, b) for a, b in zip(chain, chain[1:])):
        raise ValueError("filtration is not a strictly increasing chain")
    hn = hn_polygon_lattice(L) if hn is None else hn
    pts = [L.labels[e] for e in chain]
    gaps = [hn.at(x) - y for x, y in pts]
    if min(gaps) < 0:
        raise HNFormalismError("filtration polygon rises above the HN polygon")
    xs = {x for x, _ in pts}
    if any(gaps) or not all(x in xs for x, _ in hn.vertices):
        return Verdict.BELOW
    return Verdict.EQUAL_REFINEMENT


# -- block-scalar modifications -------------------------------------------------


@dataclass(frozen=True)
class ModificationInstance:
    """Blocks ``(d, h, a)``: a simple summand ``O(d/h)`` modified by a scalar of type ``a``."""

    blocks: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        blocks = tuple((int(d), int(h), int(a)) for d, h, a in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise ValueError("an instance needs at least one block")
        for d, h, _ in blocks:
            if h < 1 or math.gcd(d, h) != 1:
                raise ValueError(f"block ({d}, {h}) is not simple")

    def pieces(self) -> list[tuple[int, int]]:
        """``(rank, degree)`` of each modified block."""
        return [(h, d + a * h) for d, h, a in self.blocks]

    def block_slopes(self) -> list[Fraction]:
        return [Fraction(deg, h) for h, deg in self.pieces()]

    def __add__(self, other: ModificationInstance) -> ModificationInstance:
        return ModificationInstance(self.blocks + other.blocks)

    def subset_lattice(self) -> SubobjectLattice:
        return SubobjectLattice.block_subsets(self.pieces())


def deg_rank(inst: ModificationInstance) -> tuple[int, int]:
    """Total rank and degree of the modified bundle."""
    pieces = inst.pieces()
    return sum(h for h, _ in pieces), sum(d for _, d in pieces)


def modification_hn(inst: ModificationInstance) -> Polygon:
    """HN polygon of a block-scalar modification: block slopes sorted, with multiplicity."""
    slopes: list[Fraction] = []
    for (h, _), s in zip(inst.pieces(), inst.block_slopes()):
        slopes.extend([s] * h)
    return Polygon.from_slopes(sort_desc(slopes))


def modified_blocks(inst: ModificationInstance) -> list[tuple[int, int]]:
    """Simple summands ``(d + a h, h)`` of the modified bundle."""
    return [(d + a * h, h) for d, h, a in inst.blocks]


def tensor_polygon(p: Iterable[Number], q: Iterable[Number]) -> tuple[Fraction, ...]:
    """Slopes of a tensor product of semistable pieces: all pairwise sums, sorted."""
    q = [Fraction(y) for y in q]
    return sort_desc(Fraction(x) + y for x in p for y in q)


# -- rational filtered vector spaces -------------------------------------------


def _matrix(rows: Sequence[Sequence[Number]]) -> DomainMatrix:
    return DomainMatrix([[QQ(Fraction(x).numerator, Fraction(x).denominator) for x in row] for row in rows], (len(rows), len(rows[0])), QQ)


def rank(vectors: Sequence[Sequence[Number]]) -> int:
    """Rank of a list of rational vectors."""
    vectors = [v for v in vectors]
    if not vectors:
        return 0
    return _matrix(vectors).rank()


def _check_flag(g: Sequence[Sequence[Number]], jumps: Sequence[int]) -> None:
    n = len(jumps)
    if len(g) != n or any(len(row) != n for row in g):
        raise ValueError(f"flag matrix must be {n} x {n}")
    if _matrix(g).det() == 0:
        raise ValueError("flag matrix is singular")


def columns(g: Sequence[Sequence[Number]]) -> list[tuple[Fraction, ...]]:
    return [tuple(Fraction(row[j]) for row in g) for j in range(len(g))]


def subspace_degree(g: Sequence[Sequence[Number]], jumps: Sequence[int], basis: Sequence[Sequence[Number]]) -> int:
    """Degree of the filtration induced on the span of ``basis``.

    The filtration step of weight ``t`` is spanned by the columns of ``g``
    whose jump is at least ``t``.  The induced degree is the sum over weights
    of the weight times the jump in dimension of the intersections.
    """
    _check_flag(g, jumps)
    cols = columns(g)
    dim_sub = rank(basis)
    total, prev = 0, 0
    for t in sorted(set(jumps), reverse=True):
        step = [c for c, j in zip(cols, jumps) if j >= t]
        meet = len(step) + dim_sub - rank(list(step) + list(basis))
        total += t * (meet - prev)
        prev = meet
    return total


def filtered_hn(g: Sequence[Sequence[Number]], jumps: Sequence[int]) -> Polygon:
    """HN polygon of a rational filtered vector space with trivial Frobenius.

    A filtration defined over the coefficient field is its own HN
    filtration, so the polygon has the jumps as slopes.  ``g`` is only
    checked for invertibility here; :func:`subspace_degree` uses it.
    """
    _check_flag(g, jumps)
    return Polygon.from_slopes(sort_desc(jumps))
