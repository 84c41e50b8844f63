"""Stratum-level invariants of the HN stratification of the affine flag of type ``mu``.

Everything is indexed by Newton points ``nu`` in ``B(G, mu)``.  Under the sign
convention of :mod:`hnstrat.kottwitz`, ``nu`` is at the same time the HN vector
of a modification and the slope vector of the modified bundle.

HN types
    A non-empty HN stratum with HN vector ``nu`` is a union of cells indexed
    by pairs ``(M, lam)``: ``M`` is the Levi of the canonical reduction, and
    ``-lam`` is a blockwise integral cocharacter whose block averages are the
    slopes of ``nu``.  Since the reduction is semistable in ``M`` with
    strictly decreasing block slopes, ``M`` must be the centralizer of
    ``nu``.  The cell is non-empty when ``sort(-lam) <= mu``.  For an inner
    form the centralizer must be one of the Levis that exist over the base
    field.

Hodge-Newton decomposability
    ``nu`` is decomposable for a Levi ``M`` coarser than its centralizer
    when ``mu - nu`` has vanishing partial sums at the block boundaries of
    ``M``.

Dimensions (``mu`` minuscule)
    The Newton stratum has codimension ``<2 rho, nu>`` in the flag variety of
    dimension ``<2 rho, mu>``.  A cell of type ``(M, lam)`` has dimension
    ``<rho, mu + lam>``, with ``lam`` taken dominant within each block.

Weak admissibility
    :func:`wa_containment` tries to prove that a whole Newton stratum lies in
    the semistable locus by ruling out every destabilising parabolic
    reduction with necessary conditions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .hnengine import (
    ModificationInstance,
    Polygon,
    hn_polygon_lattice,
    modification_hn,
    modified_blocks,
)
from .kottwitz import (
    GroupDatum,
    IsocrystalBlocks,
    NewtonPoint,
    allowed_levis,
    enumerate_B,
    enumerate_B_mu_b,
    format_vector,
    modification_bound,
    require_in_B,
)
from .rootdata import (
    Cocharacter,
    Composition,
    RationalVector,
    av_M,
    blocks,
    boundaries_to_composition,
    check_composition,
    coarsens,
    composition_boundaries,
    compositions,
    coroot_order,
    dominance_leq,
    is_dominant,
    partial_sums,
    rho_pairing,
    sharp_M,
    sort_desc,
)


class DecompositionError(ValueError):
    """A Hodge-Newton decomposition was requested where none exists."""


@dataclass(frozen=True)
class Decision:
    """A boolean answer carrying an optional witness."""

    value: bool
    witness: object = None

    def __bool__(self) -> bool:
        return self.value


@dataclass(frozen=True, order=True)
class HNType:
    """Levi composition and a cocharacter ``lam`` that is dominant within each block."""

    levi: Composition
    lam: Cocharacter

    def __post_init__(self) -> None:
        check_composition(self.levi, len(self.lam))
        for b in blocks(self.lam, self.levi):
            if not is_dominant(b):
                raise ValueError(f"lam {self.lam} is not weakly decreasing on the blocks of {self.levi}")

    @property
    def neg_lam(self) -> Cocharacter:
        return tuple(-x for x in self.lam)

    def block_slopes(self) -> RationalVector:
        """Block averages of ``-lam``, one per block."""
        return tuple(Fraction(s, k) for s, k in zip(sharp_M(self.neg_lam, self.levi), self.levi))

    def is_hn_pair(self) -> bool:
        s = self.block_slopes()
        return all(a > b for a, b in zip(s, s[1:]))

    def newton_point(self) -> NewtonPoint:
        return NewtonPoint(av_M(self.neg_lam, self.levi))

    def __str__(self) -> str:
        return "-lam=(" + " | ".join(",".join(map(str, b)) for b in blocks(self.neg_lam, self.levi)) + ")"


def _split(G: GroupDatum | None, mu: Sequence[int]) -> GroupDatum:
    return GroupDatum(len(mu)) if G is None else G


def is_minuscule(mu: Sequence[int]) -> bool:
    return max(mu) - min(mu) <= 1


def levi_allowed(G: GroupDatum, levi: Sequence[int]) -> bool:
    return all((k * G.twist_degree) % G.n == 0 for k in levi)


def _multisets(size: int, total: int, lo: int, hi: int) -> Iterator[tuple[int, ...]]:
    """Weakly decreasing integer tuples in ``[lo, hi]`` with the given sum."""
    for c in itertools.combinations_with_replacement(range(hi, lo - 1, -1), size):
        if sum(c) == total:
            yield c


def _theta(G: GroupDatum, mu: Sequence[int], nu: NewtonPoint, exact: bool) -> list[HNType]:
    if len(mu) != G.n:
        raise ValueError(f"mu has length {len(mu)}, expected {G.n}")
    require_in_B(mu, nu)
    levi = nu.centralizer()
    if not levi_allowed(G, levi):
        return []
    mu_dom = sort_desc(mu)
    sums = [int(sum(b)) for b in blocks(nu.slopes, levi)]
    options = [list(_multisets(k, s, min(mu), max(mu))) for k, s in zip(levi, sums)]
    found = []
    for choice in itertools.product(*options):
        neg = sort_desc(itertools.chain.from_iterable(choice))
        if (neg == mu_dom) if exact else dominance_leq(neg, mu_dom):
            lam = tuple(-x for c in choice for x in reversed(c))
            found.append(HNType(levi, lam))
    return sorted(found)


def theta_set(G: GroupDatum, mu: Sequence[int], nu: NewtonPoint) -> list[HNType]:
    """All HN types of the stratum with HN vector ``nu``.

    >>> [str(t) for t in theta_set(GroupDatum(7), (1, 1, 1, 1, 0, 0, 0),
    ...                            NewtonPoint((1,) + (Fraction(3, 5),) * 5 + (0,)))]
    ['-lam=(1 | 0,0,1,1,1 | 0)']
    """
    return _theta(G, mu, nu, exact=False)


def is_in_B_HN(G: GroupDatum, mu: Sequence[int], nu: NewtonPoint) -> Decision:
    types = theta_set(G, mu, nu)
    return Decision(bool(types), types[0] if types else None)


def dor_nonempty(G: GroupDatum, mu: Sequence[int], nu: NewtonPoint) -> Decision:
    """Like :func:`is_in_B_HN`, with ``-lam`` a rearrangement of ``mu``."""
    types = _theta(G, mu, nu, exact=True)
    return Decision(bool(types), types[0] if types else None)


def B_HN(G: GroupDatum, mu: Sequence[int]) -> list[NewtonPoint]:
    return [nu for nu in enumerate_B(G, mu) if is_in_B_HN(G, mu, nu)]


# -- Hodge-Newton decomposability ------------------------------------------------


def _gap(mu: Sequence[int], nu: NewtonPoint) -> tuple[Fraction, ...]:
    """Partial sums of ``mu_dom - nu``."""
    return partial_sums(Fraction(m) - x for m, x in zip(sort_desc(mu), nu.slopes))


def hn_decomposable(mu: Sequence[int], nu: NewtonPoint, levi: Sequence[int]) -> bool:
    """Whether ``mu - nu`` lives in the Levi ``levi``, which must contain the centralizer of ``nu``.

    The whole group ``(n,)`` always qualifies; decomposability proper asks
    for a proper Levi, see :func:`smallest_hnd_levi`.
    """
    levi = check_composition(levi, len(nu))
    if len(mu) != len(nu):
        raise ValueError("mu and nu have different lengths")
    if not coarsens(levi, nu.centralizer()):
        return False
    gap = _gap(mu, nu)
    return all(gap[i - 1] == 0 for i in composition_boundaries(levi))


def smallest_hnd_levi(mu: Sequence[int], nu: NewtonPoint) -> Composition:
    if len(mu) != len(nu):
        raise ValueError("mu and nu have different lengths")
    gap = _gap(mu, nu)
    cuts = [i for i in composition_boundaries(nu.centralizer()) if gap[i - 1] == 0]
    return boundaries_to_composition(cuts, len(nu))


def is_hn_decomposable(mu: Sequence[int], nu: NewtonPoint) -> bool:
    return len(smallest_hnd_levi(mu, nu)) > 1


def fully_hnd(G: GroupDatum, mu: Sequence[int]) -> Decision:
    """True iff every non-basic class is Hodge-Newton decomposable; else the first failure."""
    for nu in enumerate_B(G, mu):
        if not nu.is_basic() and not is_hn_decomposable(mu, nu):
            return Decision(False, nu)
    return Decision(True)


# -- dimensions ---------------------------------------------------------------


def dim_newton(mu: Sequence[int], nu: NewtonPoint) -> Fraction:
    """``<2 rho, mu_dom> - <2 rho, nu>``."""
    value = rho_pairing(sort_desc(mu), 2) - rho_pairing(nu.slopes, 2)
    if is_minuscule(mu) and value.denominator != 1:
        raise ArithmeticError(f"non-integral dimension {value} for minuscule mu")
    return value


def _require_minuscule(mu: Sequence[int]) -> None:
    if not is_minuscule(mu):
        raise ValueError(f"mu = {format_vector(mu)} is not minuscule; the dimension formula is only known there")


def dim_hn_bound(mu: Sequence[int], nu: NewtonPoint, G: GroupDatum | None = None, scale: int = 1) -> Fraction:
    """Largest cell dimension ``<rho, mu_dom + lam>`` over the HN types of ``nu``.

    ``scale=2`` gives the variant with ``2 rho``, kept for comparison only.
    """
    _require_minuscule(mu)
    types = theta_set(_split(G, mu), mu, nu)
    if not types:
        raise ValueError(f"{nu} has no HN type; the stratum is empty")
    mu_dom = sort_desc(mu)
    return max(rho_pairing([m + x for m, x in zip(mu_dom, t.lam)], scale) for t in types)


def dims_equal_classification(mu: Sequence[int], nu: NewtonPoint, G: GroupDatum | None = None) -> bool:
    """``nu`` is basic in the smallest Levi for which it is Hodge-Newton decomposable."""
    _require_minuscule(mu)
    if not is_in_B_HN(_split(G, mu), mu, nu):
        raise ValueError(f"{nu} has no HN type; the stratum is empty")
    return all(len(set(b)) == 1 for b in blocks(nu.slopes, smallest_hnd_levi(mu, nu)))


@dataclass(frozen=True)
class StratumReport:
    nu: NewtonPoint
    in_B: bool
    in_B_HN: bool
    theta: tuple[HNType, ...]
    hnd_levi: Composition | str
    dim_newton: Fraction | None
    dim_hn_bound: Fraction | None
    dims_equal: bool | None
    dor_nonempty: bool


def stratum_report(G: GroupDatum, mu: Sequence[int], nu: NewtonPoint) -> StratumReport:
    require_in_B(mu, nu)
    types = tuple(theta_set(G, mu, nu))
    levi = smallest_hnd_levi(mu, nu)
    dims = is_minuscule(mu) and bool(types)
    return StratumReport(
        nu=nu,
        in_B=True,
        in_B_HN=bool(types),
        theta=types,
        hnd_levi=levi if len(levi) > 1 else "indecomposable",
        dim_newton=dim_newton(mu, nu) if is_minuscule(mu) else None,
        dim_hn_bound=dim_hn_bound(mu, nu, G) if dims else None,
        dims_equal=dims_equal_classification(mu, nu, G) if dims else None,
        dor_nonempty=bool(dor_nonempty(G, mu, nu)),
    )


# -- comparing Newton and HN indices -------------------------------------------


@dataclass(frozen=True)
class IndexRow:
    """Relations between the Newton stratum and the HN stratum indexed by ``nu``.

    ``newton_to_hn``: HN vectors that points of the Newton stratum can have,
    from HN <= Newton alone.  ``hn_to_newton``: Newton points that points of
    the HN stratum can have.  ``hn_possible`` sharpens ``newton_to_hn`` by
    Hodge-Newton decomposability, which HN vector and Newton point share,
    and by the equality of strata when ``nu`` decomposes along its own
    centralizer.
    """

    nu: NewtonPoint
    newton_to_hn: tuple[NewtonPoint, ...]
    hn_to_newton: tuple[NewtonPoint, ...]
    hn_possible: tuple[NewtonPoint, ...]


def _hnd_profile(mu: Sequence[int], nu: NewtonPoint) -> frozenset[Composition]:
    return frozenset(M for M in compositions(len(mu)) if len(M) > 1 and hn_decomposable(mu, nu, M))


def index_relations(G: GroupDatum, mu: Sequence[int]) -> list[IndexRow]:
    classes = enumerate_B(G, mu)
    hn = [nu for nu in classes if is_in_B_HN(G, mu, nu)]
    profile = {nu: _hnd_profile(mu, nu) for nu in classes}
    rows = []
    for nu in classes:
        below = tuple(x for x in hn if dominance_leq(x.slopes, nu.slopes))
        above = tuple(x for x in classes if dominance_leq(nu.slopes, x.slopes))
        if not nu.is_basic() and hn_decomposable(mu, nu, nu.centralizer()) and nu in hn:
            possible: tuple[NewtonPoint, ...] = (nu,)
        else:
            possible = tuple(x for x in below if profile[x] == profile[nu])
        rows.append(IndexRow(nu, below, above, possible))
    return rows


# -- Hodge-Newton decomposition of block-scalar instances ----------------------


@dataclass(frozen=True)
class HodgeNewtonSplit:
    levi: Composition
    parts: tuple[ModificationInstance, ...]
    part_polygons: tuple[Polygon, ...]
    polygon: Polygon


def hodge_newton_project(inst: ModificationInstance, levi: Sequence[int], G: GroupDatum | None = None) -> HodgeNewtonSplit:
    """Split a block-scalar instance along ``levi`` and check the decomposition.

    The blocks must fill the Levi blocks exactly, the slopes of each Levi
    block must all exceed those of the next (P-regularity), and then the
    global HN polygon is the concatenation of the blockwise ones.
    """
    ranks = [h for _, h, _ in inst.blocks]
    levi = check_composition(levi, sum(ranks))
    if G is not None and not levi_allowed(G, levi):
        raise DecompositionError(f"Levi {levi} does not exist for {G}")
    cuts = set(partial_sums(ranks))
    if not set(composition_boundaries(levi)) <= cuts:
        raise DecompositionError(f"blocks of ranks {ranks} are not aligned with the Levi {levi}")
    parts, current, filled = [], [], 0
    targets = iter(partial_sums(levi))
    target = next(targets)
    for blk in inst.blocks:
        current.append(blk)
        filled += blk[1]
        if filled == target:
            parts.append(ModificationInstance(tuple(current)))
            current = []
            target = next(targets, None)
    part_slopes = [p.block_slopes() for p in parts]
    for i, (upper, lower) in enumerate(zip(part_slopes, part_slopes[1:])):
        if min(upper) <= max(lower):
            raise DecompositionError(
                f"not P-regular: Levi block {i + 1} has slope {min(upper)}, block {i + 2} has slope {max(lower)}"
            )
    polygons = tuple(modification_hn(p) for p in parts)
    whole = modification_hn(inst)
    if tuple(itertools.chain.from_iterable(p.slopes() for p in polygons)) != whole.slopes():
        raise DecompositionError("blockwise polygons do not assemble to the global HN polygon")
    for p, poly in zip(parts, polygons):
        newton = NewtonPoint.from_blocks(modified_blocks(p))
        if newton.slopes != poly.slopes() or hn_polygon_lattice(p.subset_lattice()) != poly:
            raise DecompositionError("blockwise Newton and HN polygons disagree")
    return HodgeNewtonSplit(levi, tuple(parts), polygons, whole)


# -- weak admissibility of whole Newton strata ----------------------------------


RULES = {
    "R0": "no non-basic HN vector with an allowed Levi lies between the reduction and the Newton point",
    "R1": "the reduction does not destabilise",
    "R2": "the Newton point cannot be an extension of the graded pieces",
    "R3": "degrees of the graded pieces do not add up",
}


@dataclass(frozen=True)
class Scenario:
    """A candidate destabilising reduction: Levi, type on each block, Newton points of the pieces."""

    levi: Composition
    mu_blocks: tuple[Cocharacter, ...]
    reduction: RationalVector
    etas: tuple[NewtonPoint, ...] = ()


@dataclass(frozen=True)
class KilledSplit:
    """A Levi and a splitting of ``mu`` ruled out, with the rules responsible."""

    levi: Composition
    mu_blocks: tuple[Cocharacter, ...]
    rules: tuple[str, ...]


@dataclass(frozen=True)
class Contained:
    """Every point of the Newton stratum is semistable."""

    killed: tuple[KilledSplit, ...]


@dataclass(frozen=True)
class Inconclusive:
    """Some destabilising scenario survives every rule."""

    survivors: tuple[Scenario, ...]
    killed: tuple[KilledSplit, ...] = field(default=())


def _mu_splits(mu: Sequence[int], levi: Composition) -> Iterator[tuple[Cocharacter, ...]]:
    """Blockwise dominant types whose concatenation sorts below ``mu``."""
    mu_dom = sort_desc(mu)
    lo, hi = min(mu), max(mu)
    per_block = [
        [c for s in range(lo * k, hi * k + 1) for c in _multisets(k, s, lo, hi)] for k in levi
    ]
    for choice in itertools.product(*per_block):
        if sum(map(sum, choice)) == sum(mu_dom) and dominance_leq(
            sort_desc(itertools.chain.from_iterable(choice)), mu_dom
        ):
            yield choice


def _top_sum(slopes: Sequence[Fraction], k: int) -> Fraction:
    return sum(sort_desc(slopes)[:k], Fraction(0))


def _bottom_sum(slopes: Sequence[Fraction], k: int) -> Fraction:
    return sum(sorted(slopes)[:k], Fraction(0))


def _extension_rule(nu_prime: NewtonPoint, etas: Sequence[NewtonPoint]) -> bool:
    """Necessary conditions for a bundle with slopes ``nu_prime`` to be filtered with graded pieces ``etas``.

    * The first piece is a subbundle, so its HN polygon lies below that of
      the bundle; dually the last piece is a quotient, so its smallest
      slopes sum to at least those of the bundle.
    * The bundle lies below the direct sum of its graded pieces.
    * For each slope ``s`` of the bundle let ``F`` be its part of slopes
      ``>= s`` and take ``j`` least with ``F`` inside the ``j``-th
      filtration step.  Then ``F`` maps non-trivially to the ``j``-th graded
      piece, which therefore has a slope ``>= s``, and ``F`` lies below the
      HN polygon of the sum of the first ``j`` pieces.
    """
    first, last = etas[0].slopes, etas[-1].slopes
    if any(_top_sum(first, k) > _top_sum(nu_prime.slopes, k) for k in range(1, len(first) + 1)):
        return False
    if any(_bottom_sum(last, k) < _bottom_sum(nu_prime.slopes, k) for k in range(1, len(last) + 1)):
        return False
    if not dominance_leq(nu_prime.slopes, sort_desc(x for eta in etas for x in eta)):
        return False
    for s in nu_prime.distinct_slopes():
        rank_s = sum(1 for x in nu_prime if x >= s)
        deg_s = sum((x for x in nu_prime if x >= s), Fraction(0))
        ok = False
        for j in range(1, len(etas) + 1):
            head = [x for eta in etas[:j] for x in eta]
            if max(etas[j - 1].slopes) >= s and len(head) >= rank_s and _top_sum(head, rank_s) >= deg_s:
                ok = True
                break
        if not ok:
            return False
    return True


def wa_containment(b: IsocrystalBlocks, mu: Sequence[int], nu_prime: NewtonPoint) -> Contained | Inconclusive:
    """Try to show that the Newton stratum ``nu_prime`` lies in the semistable locus.

    The group is the inner form defined by the basic class ``b``.  A point
    outside the semistable locus has a destabilising reduction to a proper
    parabolic whose Levi exists for that inner form.  Such a reduction
    splits ``mu`` into blockwise types ``mu_i``, and the graded pieces are
    modifications of the blocks of ``b`` with Newton points ``eta_i``.
    Scenarios are discarded by:

    R1
        the reduction slope vector rises strictly above the average line
        at some block boundary.
    R0
        the HN vector is non-basic, has an allowed Levi, lies above the
        reduction vector in the coroot order and below ``nu_prime``.  Some
        class of ``B(G, mu, b)`` with these properties must exist.
    R3
        the degrees of the ``eta_i`` add up to the degree of ``nu_prime``.
    R2
        the condition of :func:`_extension_rule`.

    No surviving scenario proves containment; survivors prove nothing.
    """
    if not b.is_basic():
        raise ValueError(f"isocrystal {list(b.blocks)} is not basic")
    G = b.group()
    if len(mu) != G.n:
        raise ValueError(f"mu has length {len(mu)}, isocrystal has rank {G.n}")
    bound = modification_bound(mu, b)
    total = b.degree + sum(mu)
    if len(nu_prime) != G.n or sum(nu_prime.slopes) != total or not dominance_leq(nu_prime.slopes, bound):
        raise ValueError(f"{nu_prime} is not the Newton point of a modification of type mu of b")
    slope_b = Fraction(b.degree, G.n)
    average = Fraction(total, G.n)
    hn_candidates = [
        nu
        for nu in enumerate_B_mu_b(G, mu, b)
        if not nu.is_basic() and levi_allowed(G, nu.centralizer()) and dominance_leq(nu.slopes, nu_prime.slopes)
    ]
    killed: list[KilledSplit] = []
    survivors: list[Scenario] = []
    for levi in allowed_levis(G):
        if len(levi) == 1:
            continue
        pieces = [IsocrystalBlocks.basic(k, int(slope_b * k)) for k in levi]
        for split in _mu_splits(mu, levi):
            degs = [p.degree + sum(m) for p, m in zip(pieces, split)]
            reduction = tuple(Fraction(d, k) for d, k in zip(degs, levi) for _ in range(k))
            heads = zip(partial_sums(degs), partial_sums(levi))
            if not any(d > average * r for d, r in list(heads)[:-1]):
                killed.append(KilledSplit(levi, split, ("R1",)))
                continue
            if not any(coroot_order(reduction, nu.slopes) for nu in hn_candidates):
                killed.append(KilledSplit(levi, split, ("R0",)))
                continue
            options = [
                enumerate_B_mu_b(GroupDatum(k), m, p) for k, m, p in zip(levi, split, pieces)
            ]
            reasons: set[str] = set()
            alive = False
            for etas in itertools.product(*options):
                if sum(sum(e.slopes) for e in etas) != total:
                    reasons.add("R3")
                elif not _extension_rule(nu_prime, etas):
                    reasons.add("R2")
                else:
                    alive = True
                    survivors.append(Scenario(levi, split, reduction, tuple(etas)))
            if not alive:
                killed.append(KilledSplit(levi, split, tuple(sorted(reasons))))
    if survivors:
        return Inconclusive(tuple(survivors), tuple(killed))
    return Contained(tuple(killed))
