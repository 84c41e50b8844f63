"""Newton points, the Kottwitz sets ``B(G, mu)`` and inner forms of ``GL_n``.

A class in ``B(GL_n)`` is determined by its Newton point, a weakly
decreasing vector of rational slopes in which a slope ``d/h`` (lowest terms)
occurs a multiple of ``h`` times.  Equivalently the Newton polygon, the
graph of the partial sums, has integral breakpoints.  The Kottwitz invariant
of ``GL_n`` is the total degree, the sum of the slopes.

``B(G, mu)`` is the set of Newton points of degree ``sum(mu)`` lying below
``mu`` in the dominance order.  It is enumerated as the set of concave
polygons from ``(0, 0)`` to ``(n, sum(mu))`` with integral breakpoints that
stay below the Hodge polygon of ``mu``.

Signs: a point ``x`` of type ``mu`` has degree ``-sum(mu)``, so modifying a
bundle of degree ``deg(b)`` at ``x`` produces degree ``deg(b) + sum(mu)``.
Under this convention the basic class in ``B(GL_2, (1, 0))`` has slope 1/2.

An inner form ``G_b`` of ``GL_n`` is recorded by the degree of the basic
class ``b`` (its slope is ``twist_degree / n``).  Its Newton points are
identified with those of ``GL_n``; the twist only restricts which standard
Levi subgroups are defined over the base field.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .rootdata import (
    Composition,
    Number,
    as_rational,
    compositions,
    dominance_leq,
    is_dominant,
    partial_sums,
    slope_composition,
    sort_desc,
)


class NotInB(ValueError):
    """A Newton point was expected to lie in ``B(G, mu)`` but does not."""


@dataclass(frozen=True)
class NewtonPoint:
    """A weakly decreasing slope vector with integral breakpoints."""

    slopes: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        slopes = as_rational(self.slopes)
        object.__setattr__(self, "slopes", slopes)
        if not slopes:
            raise ValueError("a Newton point needs at least one slope")
        if not is_dominant(slopes):
            raise ValueError(f"slopes are not weakly decreasing: {format_vector(slopes)}")
        for s, mult in zip(self.distinct_slopes(), slope_composition(slopes)):
            if mult % s.denominator:
                raise ValueError(
                    f"slope {s} occurs {mult} times, not a multiple of {s.denominator}"
                )

    @classmethod
    def from_blocks(cls, blocks: Iterable[tuple[int, int]]) -> NewtonPoint:
        """Newton point of a direct sum of simple isocrystals ``(d, h)``."""
        slopes: list[Fraction] = []
        for d, h in blocks:
            slopes.extend([Fraction(d, h)] * h)
        return cls(sort_desc(slopes))

    @property
    def n(self) -> int:
        return len(self.slopes)

    def __len__(self) -> int:
        return len(self.slopes)

    def __iter__(self):
        return iter(self.slopes)

    def __getitem__(self, i):
        return self.slopes[i]

    def distinct_slopes(self) -> list[Fraction]:
        return sorted(set(self.slopes), reverse=True)

    def centralizer(self) -> Composition:
        """Composition of ``n`` into runs of equal slope."""
        return slope_composition(self.slopes)

    def blocks(self) -> list[tuple[int, int]]:
        """Simple summands ``(d, h)``, largest slope first."""
        out = []
        for s, mult in zip(self.distinct_slopes(), self.centralizer()):
            out.extend([(s.numerator, s.denominator)] * (mult // s.denominator))
        return out

    def breakpoints(self) -> list[tuple[int, int]]:
        """Vertices of the Newton polygon, all integral."""
        pts, x, y = [(0, 0)], 0, Fraction(0)
        for s, mult in zip(self.distinct_slopes(), self.centralizer()):
            x += mult
            y += s * mult
            pts.append((x, int(y)))
        return pts

    def is_basic(self) -> bool:
        return len(set(self.slopes)) == 1

    def sort_key(self) -> tuple[Fraction, ...]:
        return self.slopes

    def __str__(self) -> str:
        return format_multiplicities(self.slopes)


def format_vector(v: Iterable[Number]) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def format_multiplicities(v: Sequence[Number]) -> str:
    """Compact notation ``(5/2^2, 5/3^3)`` for runs of equal entries."""
    parts = []
    for s, run in itertools.groupby(v):
        mult = len(list(run))
        parts.append(str(s) if mult == 1 else f"{s}^{mult}")
    return "(" + ", ".join(parts) + ")"


def canonical_order(points: Iterable[NewtonPoint]) -> list[NewtonPoint]:
    """Descending lexicographic order on slope vectors."""
    return sorted(set(points), key=NewtonPoint.sort_key, reverse=True)


@dataclass(frozen=True)
class GroupDatum:
    """``GL_n`` twisted by a basic class of degree ``twist_degree``."""

    n: int
    twist_degree: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"rank must be a positive integer, got {self.n!r}")

    @property
    def twist_slope(self) -> Fraction:
        return Fraction(self.twist_degree, self.n)

    def is_split(self) -> bool:
        return self.twist_degree % self.n == 0

    def __str__(self) -> str:
        base = f"GL_{self.n}"
        return base if self.twist_degree == 0 else f"{base} twisted by {self.twist_slope}"


@dataclass(frozen=True)
class IsocrystalBlocks:
    """Dieudonne-Manin presentation: simple summands ``(d, h)`` of slope ``d/h``."""

    blocks: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        blocks = tuple((int(d), int(h)) for d, h in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise ValueError("empty isocrystal")
        for d, h in blocks:
            if h < 1 or math.gcd(d, h) != 1:
                raise ValueError(f"block ({d}, {h}) is not simple: need h >= 1 and gcd(d, h) = 1")

    @classmethod
    def basic(cls, n: int, degree: int) -> IsocrystalBlocks:
        s = Fraction(degree, n)
        return cls(((s.numerator, s.denominator),) * (n // s.denominator))

    @property
    def rank(self) -> int:
        return sum(h for _, h in self.blocks)

    @property
    def degree(self) -> int:
        return sum(d for d, _ in self.blocks)

    def newton_point(self) -> NewtonPoint:
        return NewtonPoint.from_blocks(self.blocks)

    def is_basic(self) -> bool:
        return len({Fraction(d, h) for d, h in self.blocks}) == 1

    def group(self) -> GroupDatum:
        """The inner form of ``GL_rank`` defined by this class."""
        return GroupDatum(self.rank, self.degree)


def kappa(nu: NewtonPoint | Sequence[Number]) -> int:
    total = sum(as_rational(nu), Fraction(0))
    if total.denominator != 1:
        raise ValueError(f"non-integral total degree {total}")
    return int(total)


def dual_class(nu: NewtonPoint) -> NewtonPoint:
    """Newton point of the inverse class: ``sorted(-nu)``."""
    return NewtonPoint(sort_desc(-x for x in nu))


def basic_element(G: GroupDatum, mu: Sequence[int]) -> NewtonPoint:
    _check_mu(G, mu)
    return NewtonPoint((Fraction(sum(mu), G.n),) * G.n)


def _check_mu(G: GroupDatum, mu: Sequence[int]) -> None:
    if len(mu) != G.n:
        raise ValueError(f"mu has length {len(mu)}, expected {G.n}")
    if any(not isinstance(m, int) for m in mu):
        raise ValueError("mu must have integer entries")


def concave_integral_polygons(n: int, total: int, bound: Sequence[Number]) -> list[tuple[Fraction, ...]]:
    """Slope vectors of concave polygons with integral breakpoints under ``bound``.

    ``bound`` is a slope vector of length ``n``; its partial sums give the
    ceiling at each integer abscissa.  Polygons run from ``(0, 0)`` to
    ``(n, total)``.  Since polygon and ceiling are linear between integers,
    comparing at integers is enough.
    """
    ceiling = (Fraction(0),) + partial_sums(as_rational(bound))
    if ceiling[-1] < total:
        return []
    found: list[tuple[Fraction, ...]] = []

    def extend(x: int, y: int, last: Fraction | None, acc: list[Fraction]) -> None:
        if x == n:
            found.append(tuple(acc))
            return
        for x2 in range(x + 1, n + 1):
            if x2 == n:
                lo = hi = total
            else:
                # concave polygons stay above the chord to the endpoint
                lo = math.ceil(Fraction(total * x2, n))
                hi = math.floor(ceiling[x2])
            for y2 in range(lo, hi + 1):
                s = Fraction(y2 - y, x2 - x)
                if last is not None and s >= last:
                    continue
                if x2 < n and Fraction(total - y2, n - x2) >= s:
                    continue
                if any(y + s * (t - x) > ceiling[t] for t in range(x + 1, x2 + 1)):
                    continue
                extend(x2, y2, s, acc + [s] * (x2 - x))

    extend(0, 0, None, [])
    return found


def enumerate_B(G: GroupDatum, mu: Sequence[int]) -> list[NewtonPoint]:
    """``B(G, mu)`` in descending lexicographic order.

    >>> [str(nu) for nu in enumerate_B(GroupDatum(2), (1, 0))]
    ['(1, 0)', '(1/2^2)']
    """
    _check_mu(G, mu)
    mu_dom = sort_desc(mu)
    return canonical_order(NewtonPoint(s) for s in concave_integral_polygons(G.n, sum(mu), mu_dom))


def in_B(mu: Sequence[int], nu: NewtonPoint) -> bool:
    """Membership test for ``B(GL_n, mu)`` without enumerating."""
    if len(mu) != len(nu):
        return False
    return sum(nu.slopes) == sum(mu) and dominance_leq(nu.slopes, sort_desc(mu))


def require_in_B(mu: Sequence[int], nu: NewtonPoint) -> None:
    if len(mu) != len(nu):
        raise NotInB(f"nu has length {len(nu)} but mu has length {len(mu)}")
    if sum(nu.slopes) != sum(mu):
        raise NotInB(f"{nu} has degree {sum(nu.slopes)}, expected {sum(mu)}")
    if not dominance_leq(nu.slopes, sort_desc(mu)):
        raise NotInB(f"{nu} is not below {format_vector(sort_desc(mu))} in the dominance order")


def modification_bound(mu: Sequence[int], b: IsocrystalBlocks) -> tuple[Fraction, ...]:
    """``nu_b + mu_dom``, the largest Newton point of a modification of ``b`` of type ``mu``."""
    if not b.is_basic():
        raise ValueError(f"isocrystal {list(b.blocks)} is not basic")
    if len(mu) != b.rank:
        raise ValueError(f"mu has length {len(mu)}, isocrystal has rank {b.rank}")
    return tuple(s + m for s, m in zip(b.newton_point().slopes, sort_desc(mu)))


def enumerate_B_mu_b(G: GroupDatum, mu: Sequence[int], b: IsocrystalBlocks) -> list[NewtonPoint]:
    """Possible Newton points of modifications of type ``mu`` of a basic ``b``."""
    _check_mu(G, mu)
    if b.rank != G.n:
        raise ValueError(f"isocrystal has rank {b.rank}, group has rank {G.n}")
    bound = modification_bound(mu, b)
    total = b.degree + sum(mu)
    return canonical_order(NewtonPoint(s) for s in concave_integral_polygons(G.n, total, bound))


def allowed_levis(G: GroupDatum) -> list[Composition]:
    """Standard Levi types that exist over the base field for the inner form ``G``.

    A block ``GL_k`` survives iff ``k * twist_degree / n`` is an integer.

    >>> allowed_levis(GroupDatum(14, 10))
    [(7, 7), (14,)]
    """
    return sorted(
        M for M in compositions(G.n) if all((k * G.twist_degree) % G.n == 0 for k in M)
    )
