"""Brute-force routes to the quantities computed in the other modules.

Each function here recomputes something by a deliberately naive and
independent method: searching all of ``S_n``, listing every direct sum of
simple isocrystals, scanning every integer vector in a box.  They are slow
and meant for small ranks, for the test-suite and for ``--oracle`` in the
command line tool.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Sequence

from .hnengine import ModificationInstance, Polygon, hn_polygon_lattice
from .kottwitz import NewtonPoint
from .rootdata import WeylElement, compositions, symmetric_group


def _partial(v: Sequence) -> list:
    return list(itertools.accumulate(v))


def _below(a: Sequence, b: Sequence) -> bool:
    pa, pb = _partial(a), _partial(b)
    return pa[-1] == pb[-1] and all(x <= y for x, y in zip(pa, pb))


def kottwitz_set(mu: Sequence[int], base: Sequence[Fraction] | None = None, total: int | None = None) -> set[tuple[Fraction, ...]]:
    """Newton points below ``base`` (default ``mu``) as direct sums of simple isocrystals.

    Lists every multiset of simple summands ``O(d/h)`` of total rank ``n``
    and degree ``total`` with slopes in the range of ``base``.
    """
    n = len(mu)
    base = sorted((Fraction(x) for x in (mu if base is None else base)), reverse=True)
    total = sum(mu) if total is None else total
    lo, hi = base[-1], base[0]
    simple = [
        (d, h)
        for h in range(1, n + 1)
        for d in range(math.floor(lo * h), math.ceil(hi * h) + 1)
        if math.gcd(d, h) == 1 and lo <= Fraction(d, h) <= hi
    ]
    found = set()

    def pick(start: int, rank: int, degree: int, chosen: list) -> None:
        if rank == n:
            if degree == total:
                slopes = sorted((Fraction(d, h) for d, h in chosen for _ in range(h)), reverse=True)
                if _below(slopes, base):
                    found.add(tuple(slopes))
            return
        for i in range(start, len(simple)):
            d, h = simple[i]
            if rank + h <= n:
                pick(i, rank + h, degree + d, chosen + [(d, h)])

    pick(0, 0, 0, [])
    return found


def min_length(mu_dominant: Sequence[int], pattern: Sequence[int]) -> int:
    return min(w.length() for w in symmetric_group(len(mu_dominant)) if w.act(mu_dominant) == tuple(pattern))


def young_subgroup(M: Sequence[int]) -> list[WeylElement]:
    n = sum(M)
    cuts = list(itertools.accumulate(M))
    block = {i: sum(1 for c in cuts if c < i) for i in range(1, n + 1)}
    return [w for w in symmetric_group(n) if all(block[w(i)] == block[i] for i in range(1, n + 1))]


def double_coset_reps(M1: Sequence[int], M2: Sequence[int]) -> list[WeylElement]:
    """Shortest element of each double coset, found by orbit computation."""
    W1, W2 = young_subgroup(M1), young_subgroup(M2)
    seen: set[WeylElement] = set()
    reps = []
    for w in symmetric_group(sum(M1)):
        if w in seen:
            continue
        coset = {u * w * v for u in W1 for v in W2}
        seen |= coset
        reps.append(min(coset, key=lambda x: (x.length(), x.oneline)))
    return sorted(reps)


def _runs(v: Sequence) -> list[int]:
    return [len(list(g)) for _, g in itertools.groupby(v)]


def theta(mu: Sequence[int], nu: Sequence[Fraction], allowed: bool = True, exact: bool = False) -> set[tuple[tuple[int, ...], tuple[int, ...]]]:
    """HN types as ``(levi, -lam)`` with ``-lam`` blockwise weakly increasing, by scanning a box."""
    if not allowed:
        return set()
    n = len(mu)
    levi = _runs(nu)
    starts = [0, *itertools.accumulate(levi)]
    mu_dom = sorted(mu, reverse=True)
    found = set()
    for neg in itertools.product(range(min(mu), max(mu) + 1), repeat=n):
        ok = True
        for a, b in zip(starts, starts[1:]):
            part = neg[a:b]
            if list(part) != sorted(part) or sum(part) != sum(nu[a:b]):
                ok = False
                break
        if not ok:
            continue
        srt = sorted(neg, reverse=True)
        if (srt == mu_dom) if exact else _below(srt, mu_dom):
            found.add((tuple(levi), neg))
    return found


def pairing_rho(v: Sequence) -> Fraction:
    """``<rho, v>`` as half the sum of ``v_i - v_j`` over ``i < j``."""
    return sum((Fraction(v[i]) - v[j] for i, j in itertools.combinations(range(len(v)), 2)), Fraction(0)) / 2


def dim_newton(mu: Sequence[int], nu: Sequence[Fraction]) -> Fraction:
    return 2 * pairing_rho(sorted(mu, reverse=True)) - 2 * pairing_rho(nu)


def dim_hn_bound(mu: Sequence[int], nu: Sequence[Fraction], allowed: bool = True) -> Fraction:
    mu_dom = sorted(mu, reverse=True)
    return max(pairing_rho([m - x for m, x in zip(mu_dom, neg)]) for _, neg in theta(mu, nu, allowed))


def hnd_levis(mu: Sequence[int], nu: Sequence[Fraction]) -> list[tuple[int, ...]]:
    """All Levis containing the centralizer of ``nu`` with ``nu <= mu`` inside the Levi."""
    mu_dom = sorted(mu, reverse=True)
    out = []
    for M in compositions(len(mu)):
        starts = [0, *itertools.accumulate(M)]
        good = True
        for a, b in zip(starts, starts[1:]):
            if a > 0 and nu[a - 1] == nu[a]:
                good = False
            elif not _below([Fraction(x) for x in nu[a:b]], mu_dom[a:b]):
                good = False
        if good:
            out.append(M)
    return out


def smallest_hnd_levi(mu: Sequence[int], nu: Sequence[Fraction]) -> tuple[int, ...]:
    return max(hnd_levis(mu, nu), key=len)


def subset_hn(inst: ModificationInstance) -> Polygon:
    return hn_polygon_lattice(inst.subset_lattice())


def newton_points(slope_sets: set[tuple[Fraction, ...]]) -> list[NewtonPoint]:
    return sorted((NewtonPoint(s) for s in slope_sets), key=NewtonPoint.sort_key, reverse=True)
