from fractions import Fraction
from itertools import permutations
from math import factorial

import pytest
from hypothesis import given, strategies as st

from qkadelic.exact_scalars import RootOfUnity, roots_up_to
from qkadelic.lambda_ring import GroundRingSpec, LambdaRing, adams
from qkadelic.loopspace import darboux_basis, omega_twisted
from qkadelic.potentials import (ContractError, CorrelatorTable, FunctionalSeries, Partition, SeriesBounds,
                                 adelic_tensor, assemble_descendant, assemble_genus_potential,
                                 block_pairing_preserved, check_relative_linearity, cycle_weight,
                                 descendant_log, disconnected_exp_check, hbar_adams_consistent,
                                 hbar_weighted, mobius_coefficients, mobius_recover, partitions,
                                 sector_reindex, sn_resum_check)
from qkadelic.target_model import load_target

RING = LambdaRing(GroundRingSpec(novikov_count=1, truncation_order=6))
Q = RING.Q()
ONE, MINUS = RootOfUnity(0), RootOfUnity(Fraction(1, 2))
BIG = SeriesBounds(max_slot_degree=4, max_index=40)


def lengths_of(perm):
    seen, out = set(), []
    for i in range(len(perm)):
        if i not in seen:
            j, k = i, 0
            while j not in seen:
                seen.add(j)
                j, k = perm[j], k + 1
            out.append(k)
    return tuple(sorted(out))


def test_cycle_weight_examples():
    assert cycle_weight(Partition.of({1: 1})) == 1
    assert cycle_weight(Partition.of({1: 1, 2: 1})) == 3
    assert cycle_weight(Partition.of({2: 2})) == 3


@pytest.mark.parametrize("n", range(1, 7))
def test_cycle_weight_counts_permutations(n):
    counts: dict = {}
    for p in permutations(range(n)):
        counts[lengths_of(p)] = counts.get(lengths_of(p), 0) + 1
    parts = list(partitions(n))
    assert len(parts) == len(counts)
    for l in parts:
        assert cycle_weight(l) == counts[tuple(sorted(l.lengths()))]


def slot(r, lab="a"):
    return FunctionalSeries.slot(("t", r, lab), Fraction(1), BIG)


def test_assembly_constant_and_symmetric_weight():
    T = CorrelatorTable({(0, Partition.of({}), 0): Fraction(7)}, ["a"], RING)
    F = assemble_genus_potential(T, 0, 3, 2, BIG)
    assert F == FunctionalSeries.const(Fraction(7), 0, BIG)
    T = CorrelatorTable({(0, Partition.of({1: 2}), 0): Fraction(1)}, ["a"], RING)
    F = assemble_genus_potential(T, 0, 3, 2, BIG)
    assert F == (slot(1) * slot(1)).scale(Fraction(1, 2))


def test_assembly_feeds_every_length_r_slot_with_t_r():
    T = CorrelatorTable({(1, Partition.of({1: 1, 2: 1}), 1): Fraction(2)}, ["a"], RING)
    F = assemble_genus_potential(T, 1, 3, 1, BIG)
    want = (slot(1) * slot(2)) * FunctionalSeries.const(Q * 2, 0, BIG)
    assert F == want


def test_rescaling_moves_slot_indices():
    F = slot(1) * slot(2) + slot(2)
    assert F.rescale_indices(2) == slot(2) * slot(4) + slot(4)


def table_with_labels():
    def three_point(groups):
        (labs,) = groups
        return Fraction(1 + labs.count("b"))

    return CorrelatorTable({
        (0, Partition.of({1: 3}), 0): three_point,
        (0, Partition.of({2: 1, 1: 1}), 1): Fraction(1, 3),
        (1, Partition.of({1: 1}), 0): Fraction(-1, 24),
        (1, Partition.of({3: 1}), 2): Fraction(5),
    }, ["a", "b"], RING)


def test_relative_linearity_contract():
    checks, failures = check_relative_linearity(table_with_labels(), trials=50, seed=3)
    assert checks == 50 and failures == []


def test_relative_linearity_with_novikov_scalar_at_length_two():
    T = table_with_labels()
    l = Partition.of({2: 1, 1: 1})
    # groups follow the sorted cycle lengths: length 1 first, then length 2
    inp = (({"a": Fraction(1)},), ({"b": Fraction(2)},))
    scaled = (({"a": Fraction(1)},), ({"b": Q * 2},))
    assert T.evaluate(0, l, 1, scaled) == Q * Q * T.evaluate(0, l, 1, inp)


def test_hbar_adams_consistency():
    assert hbar_adams_consistent(RING, 3, 4)


def test_descendant_of_constant():
    # F_1 = Q: exp(sum_k Psi^k(Q)/k) = 1/(1 - Q)
    D = assemble_descendant({1: FunctionalSeries.const(Q, 0, BIG)}, 6)
    geometric = RING.one()
    for n in range(1, 7):
        geometric = geometric + Q ** n
    assert D == FunctionalSeries.const(geometric, 0, BIG)


def test_descendant_genus_zero_hbar_weight():
    D = descendant_log({0: FunctionalSeries.const(Q, 0, BIG)}, 3)
    assert set(D.terms) == {((), -2), ((), -4), ((), -6)}


def mobius_mu(n):
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def largest_prime(n):
    best, p = 1, 2
    while n > 1:
        while n % p == 0:
            best, n = p, n // p
        p += 1
    return best


@pytest.mark.parametrize("P,N", [(5, 6), (11, 12), (3, 12), (2, 10)])
def test_mobius_coefficients_against_mu(P, N):
    got = mobius_coefficients(P, N)
    for n in range(1, N + 1):
        want = Fraction(sum(mobius_mu(d) for d in range(1, n + 1) if n % d == 0 and largest_prime(d) <= P), n)
        assert got.get(n, 0) == want


def test_mobius_examples():
    c = mobius_coefficients(5, 6)
    assert c.get(6, 0) == 0 and c[1] == 1


def test_mobius_round_trip_through_assembly():
    T = table_with_labels()
    Fs = {g: assemble_genus_potential(T, g, 3, 2, BIG) for g in (0, 1)}
    G = descendant_log(Fs, 12)
    got = mobius_recover(G.restrict_index(12), 11, 12)
    assert got == hbar_weighted(Fs).restrict_index(12)


def test_disconnected_exp_examples():
    assert disconnected_exp_check(Q, 6).passed
    assert disconnected_exp_check(RING.zero(), 6).passed
    assert disconnected_exp_check(Q * 3 - Q ** 2 * Fraction(1, 2), 2).passed


def test_disconnected_exp_degree_two_by_hand():
    nu = Q * 3 + Q ** 2
    e1, e2 = adams(1, nu), adams(2, nu)
    lhs = (RING.one() + e1 + e1 * e1 * Fraction(1, 2) + e2 * Fraction(1, 2)).truncate(2)
    s = e1 + e2 * Fraction(1, 2)
    rhs = (RING.one() + s + s * s * Fraction(1, 2)).truncate(2)
    assert lhs == rhs


def test_disconnected_exp_rejects_units():
    with pytest.raises(ValueError):
        disconnected_exp_check(RING.one() + Q, 3)


@given(st.lists(st.integers(-5, 5), min_size=9, max_size=9), st.sampled_from([1, 3, 4, 5]))
def test_sn_resummation(values, n):
    def class_fn(perm):
        lens = lengths_of(perm)
        return Fraction(values[len(lens)]) + values[max(lens)] * Fraction(1, 2)

    rep = sn_resum_check(class_fn, n)
    assert rep.passed and rep.checks == factorial(n)


def test_sn_resummation_limits():
    with pytest.raises(ValueError):
        sn_resum_check(lambda p: 1, 9)
    rep = sn_resum_check(lambda p: p[0], 3)  # not a class function
    assert not rep.passed


def test_sector_reindex_bijection():
    idx = sector_reindex(6)
    assert len(idx) == 21
    assert idx[(2, 1)] == (MINUS, 1) and idx[(2, 0)] == (ONE, 2)
    assert all(z.order * r == M for (M, _), (z, r) in idx.items())


def sec(M, j, lab="a"):
    return FunctionalSeries.slot(("sec", M, j, lab), Fraction(1), BIG)


def test_adelic_tensor_single_factor():
    F = FunctionalSeries({((((("sec", 1, 0, "a"), 1),), -1)): Q * 2}, BIG)
    out = adelic_tensor({1: F}, 6, BIG)
    assert out.terms == {(((("adel", ONE, 1, "a"), 1),), -1): Q * 2}


def test_adelic_tensor_routes_and_raises_novikov_power():
    F = FunctionalSeries({(((("sec", 2, 0, "a"), 1), (("sec", 2, 1, "a"), 1)), -2): Q}, BIG)
    out = adelic_tensor({2: F}, 6, BIG)
    ((mono, h), c), = out.terms.items()
    assert dict(mono) == {("adel", ONE, 2, "a"): 1, ("adel", MINUS, 1, "a"): 1}
    assert h == -3 and c == Q ** 2


def test_adelic_tensor_contract():
    bad = FunctionalSeries({(((("sec", 1, 0, "a"), 1),), 0): Fraction(1)}, BIG)
    with pytest.raises(ContractError):
        adelic_tensor({1: bad}, 6, BIG)
    wrong_slot = FunctionalSeries({(((("sec", 3, 0, "a"), 1),), -1): Fraction(1)}, BIG)
    with pytest.raises(ContractError):
        adelic_tensor({2: wrong_slot}, 6, BIG)
    # slot-free constants are exempt
    assert adelic_tensor({1: FunctionalSeries.const(Fraction(3), 0, BIG)}, 6, BIG).terms == {((), 0): Fraction(3)}


@pytest.mark.parametrize("M", [1, 2, 3, 4])
def test_block_pairing_preserved(M):
    T = load_target("point")
    nonzero = 0
    for z in roots_up_to(M):
        if M % z.order:
            continue
        for k in range(3):
            f, g = darboux_basis("twisted", k, 0, z, M=M, target=T, order=8)
            nonzero += omega_twisted(M, f, g) != 0
            assert block_pairing_preserved({M: f}, {M: g})
    assert nonzero
