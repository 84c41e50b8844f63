"""Type A root-datum combinatorics with exact rational arithmetic.

Vectors live in the coordinate basis of the diagonal torus of ``GL_n``.  An
integer vector is a cocharacter, a vector of :class:`~fractions.Fraction`
entries is a rational cocharacter.  The positive coroots are the differences
``e_i - e_j`` with ``i < j``, so a vector ``b`` dominates ``a`` in the coroot
order exactly when every partial sum of ``b - a`` is non-negative and the
totals agree.

Weyl group elements are permutations in one-line notation on ``1..n``.  The
action on vectors moves the entry in position ``i`` to position ``w(i)``::

    >>> w = WeylElement((2, 1, 3))
    >>> w.act((5, 7, 9))
    (7, 5, 9)

A composition ``(n_1, ..., n_r)`` of ``n`` describes a standard Levi
subgroup ``GL_{n_1} x ... x GL_{n_r}`` together with its standard parabolic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

Number = int | Fraction
Cocharacter = tuple[int, ...]
RationalVector = tuple[Fraction, ...]
Composition = tuple[int, ...]


def as_rational(v: Iterable[Number]) -> RationalVector:
    """Return ``v`` as a tuple of fractions."""
    return tuple(Fraction(x) for x in v)


def sort_desc(v: Iterable[Number]) -> tuple:
    return tuple(sorted(v, reverse=True))


def is_dominant(v: Sequence[Number]) -> bool:
    return all(v[i] >= v[i + 1] for i in range(len(v) - 1))


def partial_sums(v: Iterable[Number]) -> tuple:
    return tuple(itertools.accumulate(v))


def _check_lengths(a: Sequence, b: Sequence) -> None:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} != {len(b)}")
    if not a:
        raise ValueError("vectors must have length at least 1")


def coroot_order(a: Sequence[Number], b: Sequence[Number]) -> bool:
    """True iff ``b - a`` is a non-negative combination of positive coroots."""
    _check_lengths(a, b)
    pa, pb = partial_sums(a), partial_sums(b)
    return pa[-1] == pb[-1] and all(x <= y for x, y in zip(pa, pb))


def dominance_leq(a: Sequence[Number], b: Sequence[Number]) -> bool:
    """Dominance order between two dominant (weakly decreasing) vectors.

    Both arguments must already be sorted; use :func:`coroot_order` for raw
    vectors.

    >>> dominance_leq((Fraction(1, 2), Fraction(1, 2)), (1, 0))
    True
    """
    _check_lengths(a, b)
    if not (is_dominant(a) and is_dominant(b)):
        raise ValueError("dominance_leq expects weakly decreasing vectors")
    return coroot_order(a, b)


def rho(n: int) -> RationalVector:
    """Half the sum of positive roots: ``((n-1)/2, (n-3)/2, ..., -(n-1)/2)``."""
    return tuple(Fraction(n - 1 - 2 * i, 2) for i in range(n))


def rho_pairing(v: Sequence[Number], scale: int = 1) -> Fraction:
    """Return ``<rho, v>`` (``scale=1``) or ``<2 rho, v>`` (``scale=2``)."""
    if scale not in (1, 2):
        raise ValueError("scale must be 1 or 2")
    return scale * sum((r * x for r, x in zip(rho(len(v)), v)), Fraction(0))


# -- compositions -----------------------------------------------------------


def check_composition(M: Sequence[int], n: int | None = None) -> Composition:
    M = tuple(M)
    if not M or any(not isinstance(p, int) or p < 1 for p in M):
        raise ValueError(f"not a composition: {M!r}")
    if n is not None and sum(M) != n:
        raise ValueError(f"composition {M!r} does not sum to {n}")
    return M


def compositions(n: int) -> Iterator[Composition]:
    """All compositions of ``n``, coarsest first within each length."""
    for cuts in range(n):
        for inner in itertools.combinations(range(1, n), cuts):
            yield boundaries_to_composition(inner, n)


def composition_boundaries(M: Sequence[int]) -> tuple[int, ...]:
    """Interior block boundaries of ``M``: ``(2, 3) -> (2,)``."""
    return tuple(itertools.accumulate(M))[:-1]


def boundaries_to_composition(cuts: Iterable[int], n: int) -> Composition:
    points = [0, *sorted(set(cuts)), n]
    return tuple(b - a for a, b in zip(points, points[1:]))


def coarsens(coarse: Sequence[int], fine: Sequence[int]) -> bool:
    """True iff every boundary of ``coarse`` is a boundary of ``fine``."""
    return set(composition_boundaries(coarse)) <= set(composition_boundaries(fine))


def blocks(v: Sequence, M: Sequence[int]) -> list[tuple]:
    """Split ``v`` into consecutive blocks of the sizes in ``M``."""
    if len(v) != sum(M):
        raise ValueError(f"length mismatch: vector of length {len(v)}, composition of {sum(M)}")
    out, start = [], 0
    for size in M:
        out.append(tuple(v[start:start + size]))
        start += size
    return out


def sharp_M(lam: Sequence[int], M: Sequence[int]) -> tuple[int, ...]:
    """Blockwise sums, i.e. the image of ``lam`` in the fundamental group of the Levi.

    >>> sharp_M((1, 4, 0, 2, 3), (2, 3))
    (5, 5)
    """
    return tuple(sum(b) for b in blocks(lam, check_composition(M)))


def av_M(lam: Sequence[Number], M: Sequence[int]) -> RationalVector:
    """Blockwise averages, repeated over each block."""
    out: list[Fraction] = []
    for b in blocks(lam, check_composition(M)):
        mean = Fraction(sum(b)) / len(b)
        out.extend([mean] * len(b))
    return tuple(out)


def slope_composition(nu: Sequence[Number]) -> Composition:
    """Composition cut out by the runs of equal entries (the centralizer Levi)."""
    return tuple(len(list(g)) for _, g in itertools.groupby(nu))


# -- the Weyl group ----------------------------------------------------------


@dataclass(frozen=True, order=True)
class WeylElement:
    """A permutation of ``1..n`` in one-line notation."""

    oneline: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.oneline) != list(range(1, len(self.oneline) + 1)):
            raise ValueError(f"not a permutation of 1..n: {self.oneline!r}")

    @classmethod
    def identity(cls, n: int) -> WeylElement:
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.oneline)

    def __call__(self, i: int) -> int:
        return self.oneline[i - 1]

    def __mul__(self, other: WeylElement) -> WeylElement:
        return WeylElement(tuple(self(other(i)) for i in range(1, other.n + 1)))

    def inverse(self) -> WeylElement:
        inv = [0] * self.n
        for i, wi in enumerate(self.oneline, start=1):
            inv[wi - 1] = i
        return WeylElement(tuple(inv))

    def length(self) -> int:
        """Number of inversions."""
        w = self.oneline
        return sum(1 for i, j in itertools.combinations(range(self.n), 2) if w[i] > w[j])

    def is_identity(self) -> bool:
        return self.oneline == tuple(range(1, self.n + 1))

    def act(self, v: Sequence) -> tuple:
        """Move the entry at position ``i`` to position ``w(i)``."""
        if len(v) != self.n:
            raise ValueError("length mismatch")
        out = [None] * self.n
        for i, x in enumerate(v):
            out[self.oneline[i] - 1] = x
        return tuple(out)

    def __str__(self) -> str:
        return "[" + " ".join(map(str, self.oneline)) + "]"


def symmetric_group(n: int) -> Iterator[WeylElement]:
    for p in itertools.permutations(range(1, n + 1)):
        yield WeylElement(p)


def pattern_length(pattern: Sequence[Number]) -> int:
    """Pairs ``i < j`` with ``pattern[i] < pattern[j]``."""
    return sum(1 for i, j in itertools.combinations(range(len(pattern)), 2) if pattern[i] < pattern[j])


def min_length_weyl(mu_dominant: Sequence[int], pattern: Sequence[int]) -> tuple[WeylElement, int]:
    """Shortest ``w`` with ``w.act(mu_dominant) == pattern``, and its length.

    Equal entries of ``mu_dominant`` are sent to the positions holding that
    value in ``pattern`` in their original order, which avoids every
    avoidable inversion.  The length is the number of pairs ``i < j`` with
    ``pattern[i] < pattern[j]``.

    >>> min_length_weyl((1, 1, 1, 1, 0, 0, 0), (1, 0, 0, 1, 1, 1, 0))[1]
    6
    """
    mu = tuple(mu_dominant)
    pattern = tuple(pattern)
    if len(mu) != len(pattern):
        raise ValueError("length mismatch")
    if not is_dominant(mu):
        raise ValueError("mu_dominant must be weakly decreasing")
    if sorted(mu) != sorted(pattern):
        raise ValueError(f"{pattern!r} is not a rearrangement of {mu!r}")
    slots: dict = {}
    for pos, x in enumerate(pattern, start=1):
        slots.setdefault(x, []).append(pos)
    taken: dict = {x: iter(ps) for x, ps in slots.items()}
    w = WeylElement(tuple(next(taken[x]) for x in mu))
    return w, w.length()


def is_min_double_coset_rep(w: WeylElement, M1: Sequence[int], M2: Sequence[int]) -> bool:
    """Membership in the set of shortest ``(W_M1, W_M2)`` double coset representatives.

    ``w`` is shortest in ``w W_M2`` iff it increases on each ``M2`` block of
    positions, and shortest in ``W_M1 w`` iff its inverse increases on each
    ``M1`` block; being shortest in the double coset is the conjunction.
    """
    inv = w.inverse()
    right = set(composition_boundaries(M2))
    left = set(composition_boundaries(M1))
    for i in range(1, w.n):
        if i not in right and w(i) > w(i + 1):
            return False
        if i not in left and inv(i) > inv(i + 1):
            return False
    return True


def double_coset_min_reps(M1: Sequence[int], M2: Sequence[int]) -> list[WeylElement]:
    """Shortest representatives of the double cosets ``W_M1 \\ S_n / W_M2``, sorted."""
    M1, M2 = check_composition(M1), check_composition(M2)
    if sum(M1) != sum(M2):
        raise ValueError(f"compositions of different integers: {M1!r}, {M2!r}")
    return sorted(w for w in symmetric_group(sum(M1)) if is_min_double_coset_rep(w, M1, M2))
