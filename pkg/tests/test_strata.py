import itertools
from fractions import Fraction

import pytest

from hnstrat import oracles
from hnstrat.hnengine import ModificationInstance
from hnstrat.kottwitz import GroupDatum, IsocrystalBlocks, NewtonPoint, NotInB, enumerate_B, enumerate_B_mu_b
from hnstrat.rootdata import blocks, coarsens, compositions, dominance_leq, sort_desc
from hnstrat.strata import (
    B_HN,
    Contained,
    DecompositionError,
    HNType,
    Inconclusive,
    dim_hn_bound,
    dim_newton,
    dims_equal_classification,
    dor_nonempty,
    fully_hnd,
    hn_decomposable,
    hodge_newton_project,
    index_relations,
    is_in_B_HN,
    is_minuscule,
    smallest_hnd_levi,
    stratum_report,
    theta_set,
    wa_containment,
)

from conftest import frac_vector

GL7_MU = (1, 1, 1, 1, 0, 0, 0)
GL7_NU_HND = NewtonPoint(frac_vector(1, (Fraction(3, 5), 5), 0))
GL7_NU_OTHER = NewtonPoint(frac_vector((Fraction(2, 3), 3), (Fraction(1, 2), 4)))
GL5_MU = (1, 1, 0, 0, 0)
GL5_NU = NewtonPoint(frac_vector((Fraction(1, 2), 2), (Fraction(1, 3), 3)))


def npt(*parts):
    return NewtonPoint(frac_vector(*parts))


def small_mus(max_n=5, bound=2):
    for n in range(1, max_n + 1):
        yield from itertools.combinations_with_replacement(range(bound, -bound - 1, -1), n)


def minuscule_mus(max_n):
    for n in range(1, max_n + 1):
        for k in range(n + 1):
            yield (1,) * k + (0,) * (n - k)


# -- HN types ------------------------------------------------------------------


def test_hn_type_validation_and_rendering():
    t = HNType((1, 5, 1), (-1, 0, 0, -1, -1, -1, 0))
    assert str(t) == "-lam=(1 | 0,0,1,1,1 | 0)"
    assert t.block_slopes() == (1, Fraction(3, 5), 0)
    assert t.is_hn_pair()
    assert t.newton_point() == GL7_NU_HND
    with pytest.raises(ValueError):
        HNType((2,), (0, 1))
    assert not HNType((1, 1), (0, 0)).is_hn_pair()


def test_theta_gl5_two_types():
    nu = npt((Fraction(5, 2), 2), (Fraction(5, 3), 3))
    types = theta_set(GroupDatum(5), (4, 3, 2, 1, 0), nu)
    neg = {t.neg_lam for t in types}
    assert {(1, 4, 0, 2, 3), (2, 3, 0, 1, 4)} <= neg
    assert all(t.levi == (2, 3) for t in types)
    assert len(types) == 7


def test_theta_gl7_unique_type():
    types = theta_set(GroupDatum(7), GL7_MU, GL7_NU_HND)
    assert [t.neg_lam for t in types] == [(1, 0, 0, 1, 1, 1, 0)]


def test_theta_superbasic_is_empty():
    G = GroupDatum(5, 2)
    mu = (0, 0, 0, -1, -1)
    assert theta_set(G, mu, npt((Fraction(-1, 3), 3), (Fraction(-1, 2), 2))) == []


def test_theta_requires_membership():
    with pytest.raises(NotInB):
        theta_set(GroupDatum(2), (1, 0), npt(2, -1))


def test_theta_matches_box_scan_exhaustively():
    mismatches = []
    for mu in small_mus():
        G = GroupDatum(len(mu))
        for nu in enumerate_B(G, mu):
            got = {(t.levi, t.neg_lam) for t in theta_set(G, mu, nu)}
            if got != oracles.theta(mu, nu.slopes):
                mismatches.append((mu, nu))
    assert mismatches == []


def test_every_type_is_an_hn_pair_with_the_right_newton_point():
    for mu in small_mus(4):
        G = GroupDatum(len(mu))
        for nu in enumerate_B(G, mu):
            for t in theta_set(G, mu, nu):
                assert t.is_hn_pair()
                assert t.newton_point() == nu


# -- B_HN and DOR --------------------------------------------------------------


def test_split_B_equals_B_HN_exhaustively():
    for mu in small_mus():
        G = GroupDatum(len(mu))
        assert B_HN(G, mu) == enumerate_B(G, mu)


def test_split_minuscule_B_HN_up_to_six():
    for mu in minuscule_mus(6):
        G = GroupDatum(len(mu))
        assert B_HN(G, mu) == enumerate_B(G, mu)


def test_superbasic_b_hn():
    G = GroupDatum(5, 2)
    mu = (0, 0, 0, -1, -1)
    for nu in enumerate_B(G, mu):
        assert bool(is_in_B_HN(G, mu, nu)) == nu.is_basic()
    basic = is_in_B_HN(G, mu, npt((Fraction(-2, 5), 5)))
    assert basic and basic.witness.neg_lam == (-1, -1, 0, 0, 0)


def test_dor_examples():
    d = dor_nonempty(GroupDatum(2), (1, 0), npt(1, 0))
    assert d and d.witness.neg_lam == (1, 0)
    G, mu = GroupDatum(3), (2, 0, 0)
    nu = npt(1, (Fraction(1, 2), 2))
    assert not dor_nonempty(G, mu, nu)
    hn = is_in_B_HN(G, mu, nu)
    assert hn and hn.witness.neg_lam == (1, 0, 1)
    assert str(hn.witness) == "-lam=(1 | 0,1)"


def test_dor_basic_uses_minus_mu():
    mu = (2, 1, 0)
    d = dor_nonempty(GroupDatum(3), mu, npt(1, 1, 1))
    assert d and sorted(d.witness.neg_lam) == sorted(mu)


def test_dor_types_are_theta_types():
    for mu in small_mus(4):
        G = GroupDatum(len(mu))
        for nu in enumerate_B(G, mu):
            exact = {(t.levi, t.neg_lam) for t in dor_nonempty_types(G, mu, nu)}
            assert exact <= {(t.levi, t.neg_lam) for t in theta_set(G, mu, nu)}
            assert exact == oracles.theta(mu, nu.slopes, exact=True)


def dor_nonempty_types(G, mu, nu):
    return [t for t in theta_set(G, mu, nu) if sorted(t.neg_lam) == sorted(mu)]


# -- Hodge-Newton decomposability --------------------------------------------


def test_hn_decomposable_examples():
    assert hn_decomposable((1, 0, 0), npt((Fraction(1, 2), 2), 0), (2, 1))
    assert not hn_decomposable((1, 0, 0), npt((Fraction(1, 3), 3)), (1, 2))
    assert not hn_decomposable(GL5_MU, GL5_NU, (2, 3))
    assert hn_decomposable(GL5_MU, GL5_NU, (5,))
    with pytest.raises(ValueError):
        hn_decomposable((1, 0), npt(1, 0), (1, 2))


def test_smallest_hnd_levi_examples():
    assert smallest_hnd_levi((1, 1, 0, 0), npt(1, (Fraction(1, 3), 3))) == (1, 3)
    assert smallest_hnd_levi(GL7_MU, GL7_NU_HND) == (1, 5, 1)
    assert smallest_hnd_levi(GL5_MU, GL5_NU) == (5,)


def test_smallest_hnd_levi_is_finest_valid_levi():
    for mu in itertools.chain(small_mus(5, 1), minuscule_mus(7)):
        for nu in enumerate_B(GroupDatum(len(mu)), mu):
            valid = [M for M in compositions(len(mu)) if hn_decomposable(mu, nu, M)]
            finest = smallest_hnd_levi(mu, nu)
            assert finest == oracles.smallest_hnd_levi(mu, nu.slopes)
            assert sorted(valid) == sorted(oracles.hnd_levis(mu, nu.slopes))
            assert all(coarsens(M, finest) for M in valid)
            # coarsening keeps validity
            for M in valid:
                for C in compositions(len(mu)):
                    if coarsens(C, M):
                        assert hn_decomposable(mu, nu, C)


def test_fully_hnd():
    assert fully_hnd(GroupDatum(3), (1, 0, 0))
    result = fully_hnd(GroupDatum(5), GL5_MU)
    assert not result and result.witness == GL5_NU
    assert fully_hnd(GroupDatum(1), (3,))


# -- dimensions ------------------------------------------------------------------


def test_dims_gl7():
    assert dim_newton(GL7_MU, GL7_NU_HND) == 6
    assert dim_hn_bound(GL7_MU, GL7_NU_HND) == 6
    assert dims_equal_classification(GL7_MU, GL7_NU_HND)
    assert dim_newton(GL7_MU, GL7_NU_OTHER) == 10
    assert dim_hn_bound(GL7_MU, GL7_NU_OTHER) == 8
    assert not dims_equal_classification(GL7_MU, GL7_NU_OTHER)
    assert dim_hn_bound(GL7_MU, GL7_NU_OTHER, scale=2) == 16


def test_dims_small_cases():
    assert dim_newton((1, 0), npt(1, 0)) == 0
    assert dim_hn_bound((1, 0), npt((Fraction(1, 2), 2))) == 1
    assert dim_newton(GL5_MU, GL5_NU) == 5
    assert dim_hn_bound(GL5_MU, GL5_NU) == 4
    assert not dims_equal_classification(GL5_MU, GL5_NU)


def test_dim_bound_refuses_non_minuscule_and_empty():
    with pytest.raises(ValueError, match="minuscule"):
        dim_hn_bound((2, 0), npt(1, 1))
    with pytest.raises(ValueError, match="no HN type"):
        dim_hn_bound((0, 0, 0, -1, -1), npt((Fraction(-1, 3), 3), (Fraction(-1, 2), 2)), GroupDatum(5, 2))


def test_dimension_inequality_and_classification():
    for mu in minuscule_mus(7):
        G = GroupDatum(len(mu))
        for nu in B_HN(G, mu):
            newton, bound = dim_newton(mu, nu), dim_hn_bound(mu, nu)
            assert newton == oracles.dim_newton(mu, nu.slopes)
            assert bound == oracles.dim_hn_bound(mu, nu.slopes)
            assert newton >= bound
            assert (newton == bound) == dims_equal_classification(mu, nu)


def test_dims_restrict_to_smallest_levi():
    for mu in minuscule_mus(7):
        G = GroupDatum(len(mu))
        for nu in enumerate_B(G, mu):
            M = smallest_hnd_levi(mu, nu)
            if len(M) == 1:
                continue
            parts = list(zip(blocks(mu, M), (NewtonPoint(b) for b in blocks(nu.slopes, M))))
            assert all(is_in_B_HN(GroupDatum(len(m)), m, v) for m, v in parts)
            assert sum(dim_newton(m, v) for m, v in parts) == dim_newton(mu, nu)
            assert sum(dim_hn_bound(m, v) for m, v in parts) == dim_hn_bound(mu, nu)


def test_is_minuscule():
    assert is_minuscule((1, 1, 0))
    assert is_minuscule((3, 3))
    assert not is_minuscule((2, 0))


# -- reports and index tables ------------------------------------------------


def test_stratum_report_consistent():
    for mu in minuscule_mus(5):
        G = GroupDatum(len(mu))
        for nu in enumerate_B(G, mu):
            r = stratum_report(G, mu, nu)
            assert r.in_B and r.in_B_HN
            assert r.dims_equal == (r.dim_newton == r.dim_hn_bound)


def test_stratum_report_non_minuscule():
    r = stratum_report(GroupDatum(3), (2, 0, 0), npt(1, (Fraction(1, 2), 2)))
    assert r.dim_newton is None and r.dims_equal is None
    assert r.in_B_HN and not r.dor_nonempty


def test_index_relations_gl2():
    rows = index_relations(GroupDatum(2), (1, 0))
    top, basic = npt(1, 0), npt((Fraction(1, 2), 2))
    assert [r.nu for r in rows] == [top, basic]
    assert rows[0].newton_to_hn == (top, basic)
    assert rows[0].hn_possible == (top,)
    assert rows[1].newton_to_hn == (basic,)
    assert rows[1].hn_possible == (basic,)
    assert rows[1].hn_to_newton == (top, basic)


def test_index_relations_fully_hnd_basic_row():
    for mu in [(1, 0, 0), (1, 1, 0, 0), (1, 0, 0, 0)]:
        G = GroupDatum(len(mu))
        assert fully_hnd(G, mu)
        rows = index_relations(G, mu)
        assert rows[0].hn_possible == (rows[0].nu,)
        assert rows[-1].hn_possible == (rows[-1].nu,)


# -- Hodge-Newton decomposition of instances ---------------------------------


def test_hodge_newton_project_two_blocks():
    inst = ModificationInstance(((0, 1, 1), (0, 1, 0)))
    split = hodge_newton_project(inst, (1, 1))
    assert [p.slopes() for p in split.part_polygons] == [(1,), (0,)]
    assert split.polygon.slopes() == (1, 0)


def test_hodge_newton_project_trivial_levi():
    inst = ModificationInstance(((5, 7, 1),))
    split = hodge_newton_project(inst, (7,))
    assert split.parts == (inst,)


def test_hodge_newton_project_errors():
    with pytest.raises(DecompositionError, match="P-regular"):
        hodge_newton_project(ModificationInstance(((0, 1, 1), (0, 1, 1), (0, 1, 1))), (2, 1))
    with pytest.raises(DecompositionError, match="P-regular"):
        hodge_newton_project(ModificationInstance(((0, 1, 1), (0, 1, 0), (0, 1, 1))), (2, 1))
    with pytest.raises(DecompositionError, match="aligned"):
        hodge_newton_project(ModificationInstance(((1, 2, 0), (0, 1, 0))), (1, 2))
    with pytest.raises(DecompositionError, match="exist"):
        hodge_newton_project(ModificationInstance(((0, 1, 1), (0, 1, 0))), (1, 1), GroupDatum(2, 1))


# -- weak admissibility ----------------------------------------------------------

GL14_B = IsocrystalBlocks(((5, 7), (5, 7)))
GL14_MU = (1,) * 4 + (0,) * 10


def _ones_in_first_block(k):
    return sum(k.mu_blocks[0])


def test_wa_gl14_first_point_contained():
    result = wa_containment(GL14_B, GL14_MU, npt((Fraction(3, 2), 4), (Fraction(4, 5), 10)))
    assert isinstance(result, Contained)
    rules = {_ones_in_first_block(k): k.rules for k in result.killed}
    assert rules == {0: ("R1",), 1: ("R1",), 2: ("R1",), 3: ("R2",), 4: ("R0",)}


def test_wa_gl14_second_point_inconclusive():
    result = wa_containment(GL14_B, GL14_MU, npt((Fraction(8, 7), 7), (Fraction(6, 7), 7)))
    assert isinstance(result, Inconclusive)
    (survivor,) = result.survivors
    assert survivor.levi == (7, 7)
    assert sum(survivor.mu_blocks[0]) == 3
    assert survivor.etas == (npt((Fraction(8, 7), 7)), npt((Fraction(6, 7), 7)))


def test_wa_superbasic_vacuous():
    b = IsocrystalBlocks.basic(5, 2)
    mu = (0, 0, 0, -1, -1)
    for nu in enumerate_B_mu_b(b.group(), mu, b):
        result = wa_containment(b, mu, nu)
        assert isinstance(result, Contained) and result.killed == ()


def test_wa_errors():
    with pytest.raises(ValueError, match="basic"):
        wa_containment(IsocrystalBlocks(((1, 1), (0, 1))), (1, 0), npt(1, 1))
    with pytest.raises(ValueError):
        wa_containment(IsocrystalBlocks.basic(2, 0), (1, 0), npt(2, -1))


def test_wa_sanity_on_small_groups():
    # basic strata are semistable; the maximal split stratum is not
    for n in range(2, 5):
        for degree in range(n + 1):
            b = IsocrystalBlocks.basic(n, degree)
            for mu in itertools.combinations_with_replacement((1, 0, -1), n):
                points = enumerate_B_mu_b(b.group(), mu, b)
                assert isinstance(wa_containment(b, mu, points[-1]), Contained)
                if degree % n == 0 and len(set(mu)) > 1:
                    assert isinstance(wa_containment(b, mu, points[0]), Inconclusive)


def test_wa_contained_ledger_covers_every_split():
    b = IsocrystalBlocks.basic(4, 0)
    for mu in itertools.combinations_with_replacement((1, 0, -1), 4):
        for nu in enumerate_B_mu_b(b.group(), mu, b):
            result = wa_containment(b, mu, nu)
            if isinstance(result, Contained):
                assert all(k.rules for k in result.killed)
                for k in result.killed:
                    combined = sort_desc(itertools.chain.from_iterable(k.mu_blocks))
                    assert dominance_leq(combined, sort_desc(mu))
