import random
from fractions import Fraction
from itertools import permutations, product

import pytest

from soficlab import (BudgetError, Perm, PointMap, PatchSpec,
                      PreconditionError, SubsetFamily, averaging_bound,
                      blockify, copy_slices, deficit, family_cost,
                      majority_set, membership_counts, patchwork,
                      round_to_permutation, witness_permutation,
                      witness_value)
from oracles import (brute_best_family_cost, brute_min_disagreements,
                     random_perm)


def test_patchwork_single_block():
    p = Perm((2, 0, 1))
    spec = PatchSpec((frozenset({0, 1, 2}),), (p,))
    assert patchwork(spec).values == p.img


def test_patchwork_identity_blocks():
    spec = PatchSpec(
        (frozenset({0}), frozenset({1})),
        (Perm.identity(2), Perm.identity(2)))
    assert patchwork(spec).values == (0, 1)


def test_patchwork_collision():
    spec = PatchSpec(
        (frozenset({0}), frozenset({1})),
        (Perm((0, 1)), Perm((1, 0))))
    assert patchwork(spec).values == (0, 0)


def test_patchspec_validation():
    with pytest.raises(ValueError):
        PatchSpec((frozenset({0}), frozenset({0, 1})),
                  (Perm.identity(2), Perm.identity(2)))
    with pytest.raises(ValueError):
        PatchSpec((frozenset({0}),), (Perm.identity(2),))


def test_deficit():
    assert deficit(PointMap((0, 1, 2))) == 0
    assert deficit(PointMap((1, 1, 1, 1))) == 3
    assert deficit(PointMap((0, 0, 1, 2))) == 1


def test_round_keeps_permutations():
    rng = random.Random(0)
    for _ in range(20):
        p = random_perm(rng, rng.randrange(1, 8))
        w, disagreements = round_to_permutation(PointMap(p.img))
        assert w == p and disagreements == 0


def test_round_examples():
    w, d = round_to_permutation(PointMap((0, 0, 1, 2)))
    assert w.img == (0, 3, 1, 2) and d == 1
    w, d = round_to_permutation(PointMap((0, 0, 0)))
    assert d == 2


def test_round_matches_brute_force_exhaustively():
    for n in range(1, 5):
        for values in product(range(n), repeat=n):
            pm = PointMap(values)
            w, d = round_to_permutation(pm)
            assert d == deficit(pm)
            assert d == brute_min_disagreements(values)
            assert sum(1 for a, b in zip(w.img, values) if a != b) == d
            # the matrix identity of the rounding bound
            assert Fraction(2 * d, n) == Fraction(2 * deficit(pm), n)


def test_majority_examples():
    fam = SubsetFamily(3, ({0}, {1}, {0, 1}))
    a = majority_set(fam)
    assert sorted(a) == [0, 1]
    assert family_cost(fam, a) == 2
    assert membership_counts(fam) == (2, 2, 0)

    same = SubsetFamily(5, ({1, 2}, {1, 2}, {1, 2}))
    assert majority_set(same) == frozenset({1, 2})
    assert family_cost(same, majority_set(same)) == 0

    single = SubsetFamily(4, ({0, 3},))
    assert majority_set(single) == frozenset({0, 3})
    assert family_cost(single, majority_set(single)) == 0


def test_majority_tie_points_excluded():
    fam = SubsetFamily(2, ({0}, {1}))
    assert majority_set(fam) == frozenset()


def test_majority_cost_formula_and_optimality():
    rng = random.Random(1)
    for _ in range(60):
        n = rng.randrange(1, 9)
        r = rng.randrange(1, 5)
        fam = SubsetFamily(n, tuple(
            frozenset(x for x in range(n) if rng.random() < 0.5)
            for _ in range(r)))
        a = majority_set(fam)
        counts = membership_counts(fam)
        assert family_cost(fam, a) == sum(
            min(c, r - c) for c in counts)
        assert family_cost(fam, a) == brute_best_family_cost(n, fam.subsets)


def test_witness_example():
    fam = SubsetFamily(3, ({0}, {1}, {0, 1}))
    p, value = witness_permutation(fam)
    assert value == 4
    assert averaging_bound(fam) == Fraction(8, 3)
    assert value >= 3   # ceil of the averaging bound
    assert value >= family_cost(fam, majority_set(fam))


def test_witness_equal_family():
    fam = SubsetFamily(4, ({1}, {1}, {1}))
    p, value = witness_permutation(fam)
    assert value == 0
    assert family_cost(fam, majority_set(fam)) == 0


def test_witness_inequality_random():
    rng = random.Random(2)
    for _ in range(40):
        n = rng.randrange(1, 10)
        r = rng.randrange(1, 7)
        fam = SubsetFamily(n, tuple(
            frozenset(x for x in range(n) if rng.random() < 0.4)
            for _ in range(r)))
        p, value = witness_permutation(fam)
        assert value == max(
            witness_value(fam, Perm(q)) for q in permutations(range(r)))
        bound = averaging_bound(fam)
        assert value >= -(-bound.numerator // bound.denominator)
        assert value >= family_cost(fam, majority_set(fam))


def test_averaging_identity():
    # sum over all copy permutations of R equals (r-1)! * sum 2 a_i (r-a_i)
    rng = random.Random(3)
    cases = [(rng.randrange(1, 8), rng.randrange(1, 5)) for _ in range(20)]
    cases += [(5, 6), (3, 6)]   # exhaustive summation up to r = 6
    for n, r in cases:
        fam = SubsetFamily(n, tuple(
            frozenset(x for x in range(n) if rng.random() < 0.5)
            for _ in range(r)))
        total = sum(
            witness_value(fam, Perm(q)) for q in permutations(range(r)))
        counts = membership_counts(fam)
        factorial = 1
        for i in range(1, r):
            factorial *= i
        assert total == factorial * sum(2 * c * (r - c) for c in counts)


def test_witness_sampled_mode():
    rng = random.Random(4)
    n, r = 6, 9
    fam = SubsetFamily(n, tuple(
        frozenset(x for x in range(n) if rng.random() < 0.5)
        for _ in range(r)))
    p1, v1 = witness_permutation(fam, seed=11, budget=500)
    p2, v2 = witness_permutation(fam, seed=11, budget=500)
    assert (p1, v1) == (p2, v2)
    bound = averaging_bound(fam)
    assert v1 >= -(-bound.numerator // bound.denominator)
    with pytest.raises(BudgetError):
        witness_permutation(fam, seed=1, budget=0)


def test_copy_slices():
    slices = copy_slices({0, 3, 6, 9, 12, 15}, 6, 3)
    assert slices[0] == frozenset(range(6))
    assert slices[1] == slices[2] == frozenset()
    with pytest.raises(PreconditionError):
        copy_slices({100}, 6, 3)


def test_blockify_fixed_set():
    # S already of the form A x copies is untouched
    a = {1, 4}
    s = {i * 3 + j for i in a for j in range(3)}
    result = blockify(s, 6, 3)
    assert result.block_set == frozenset(s)
    assert result.majority == frozenset(a)
    assert result.sym_diff == 0


def test_blockify_single_full_copy():
    n, r = 6, 3
    s = {i * r for i in range(n)}   # copy 0 only
    result = blockify(s, n, r)
    assert result.majority == frozenset()
    assert result.block_set == frozenset()
    assert result.sym_diff == n


def test_blockify_contract_and_witness_bound():
    rng = random.Random(5)
    for _ in range(40):
        n = rng.randrange(1, 10)
        r = rng.randrange(1, 5)
        s = {x for x in range(n * r) if rng.random() < 0.5}
        result = blockify(s, n, r)
        fam = SubsetFamily(n, result.slices)
        assert result.sym_diff == sum(
            len(result.majority ^ sl) for sl in result.slices)
        _, witness = witness_permutation(fam)
        assert result.sym_diff <= witness
