import random
from fractions import Fraction

import pytest

from soficlab import (BudgetError, Perm, PreconditionError, SoficApprox,
                      WeightScheme, axiom_suite, conj_distance_anneal,
                      conj_distance_exact, conj_objective, conjugate_approx,
                      cycle_type, cyclic_shift_approx, equalize_dimensions,
                      enumerate_words, evaluate_word, trace_profile)
from oracles import random_approx, random_perm


def planted_pair(rng, n, names=("a", "b")):
    """Returns (theta, phi, aligner) with aligner phi aligner^-1 = theta."""
    theta = random_approx(rng, n, names)
    sigma = random_perm(rng, n)
    return theta, conjugate_approx(theta, sigma), sigma.inverse()


def test_weight_scheme_tail():
    ws = WeightScheme(3)
    assert ws.weight(1) == Fraction(1, 4)
    assert ws.tail_bound(4) == Fraction(2, 3 * 4 ** 4)


def test_objective_zero_on_planted():
    rng = random.Random(0)
    theta, phi, sigma = planted_pair(rng, 6)
    assert conj_objective(theta, phi, sigma) == 0
    assert conj_objective(theta, theta, Perm.identity(6)) == 0


def test_objective_frozen_example():
    # single generator, truncation at length 1: two words a, a^-1, each
    # with two mismatching points out of four
    theta = cyclic_shift_approx(4)
    phi = SoficApprox(("a",), (Perm((1, 0, 3, 2)),), ())
    obj = conj_objective(theta, phi, Perm.identity(4), WeightScheme(1))
    assert obj == Fraction(1, 4) + Fraction(1, 16)


def test_objective_symmetry():
    rng = random.Random(1)
    for _ in range(20):
        n = rng.randrange(2, 7)
        theta = random_approx(rng, n)
        phi = random_approx(rng, n)
        sigma = random_perm(rng, n)
        assert conj_objective(theta, phi, sigma) == \
            conj_objective(phi, theta, sigma.inverse())


def test_objective_diameter():
    rng = random.Random(2)
    for _ in range(30):
        n = rng.randrange(2, 8)
        obj = conj_objective(
            random_approx(rng, n), random_approx(rng, n),
            random_perm(rng, n))
        assert obj < Fraction(2, 3)


def test_objective_dimension_mismatch():
    with pytest.raises(PreconditionError):
        conj_objective(
            cyclic_shift_approx(3), cyclic_shift_approx(4),
            Perm.identity(3))


def test_exact_planted_is_zero():
    rng = random.Random(3)
    for _ in range(5):
        theta, phi, _ = planted_pair(rng, rng.randrange(2, 7))
        result = conj_distance_exact(theta, phi)
        assert result.objective == 0
        assert result.mode == "exact"
        assert conj_objective(theta, phi, result.conjugator) == 0


def test_exact_equals_brute_force():
    from itertools import permutations
    rng = random.Random(4)
    ws = WeightScheme(2)
    for _ in range(5):
        n = rng.randrange(2, 6)
        theta = random_approx(rng, n)
        phi = random_approx(rng, n)
        result = conj_distance_exact(theta, phi, ws)
        brute = min(
            conj_objective(theta, phi, Perm(s), ws)
            for s in permutations(range(n)))
        assert result.objective == brute


def test_exact_cycle_type_obstruction():
    # a 4-cycle is never conjugate to a (2,2) involution: at word "a"
    # (weight 1/4) at least one point must mismatch
    theta = cyclic_shift_approx(4)
    phi = SoficApprox(("a",), (Perm((1, 0, 3, 2)),), ())
    assert cycle_type(theta.perms[0]) != cycle_type(phi.perms[0])
    result = conj_distance_exact(theta, phi)
    assert result.objective >= Fraction(1, 4) * Fraction(2, 4)


def test_cycle_type_obstruction_general():
    # whenever the i-th word has different cycle types on the two sides,
    # the exact objective is at least 4^(-i) * (2/n)
    rng = random.Random(17)
    ws = WeightScheme(2)
    found = 0
    while found < 10:
        n = rng.randrange(3, 6)
        theta = random_approx(rng, n)
        phi = random_approx(rng, n)
        words = enumerate_words(("a", "b"), 2)
        theta_types = [
            cycle_type(evaluate_word(theta, w)) for w in words]
        phi_types = [cycle_type(evaluate_word(phi, w)) for w in words]
        mismatched = [
            i + 1 for i, (s, t) in enumerate(zip(theta_types, phi_types))
            if s != t]
        if not mismatched:
            continue
        found += 1
        result = conj_distance_exact(theta, phi, ws)
        i = mismatched[0]
        assert result.objective >= \
            Fraction(1, 4 ** i) * Fraction(2, n)


def test_exact_conjugation_invariance():
    rng = random.Random(5)
    for _ in range(5):
        n = rng.randrange(2, 7)
        theta = random_approx(rng, n)
        sigma = random_perm(rng, n)
        result = conj_distance_exact(theta, conjugate_approx(theta, sigma))
        assert result.objective == 0


def test_exact_cap():
    rng = random.Random(6)
    theta = random_approx(rng, 9)
    with pytest.raises(BudgetError):
        conj_distance_exact(theta, theta, cap=8)


def test_exact_deterministic_tiebreak():
    theta = cyclic_shift_approx(3)
    result = conj_distance_exact(theta, theta)
    assert result.objective == 0
    # identity is the lex-smallest zero-objective conjugator here
    assert result.conjugator == Perm.identity(3)


def test_anneal_zero_budget_returns_seeded_start():
    rng = random.Random(7)
    theta, phi, _ = planted_pair(rng, 12)
    result = conj_distance_anneal(theta, phi, seed=0, restarts=0, steps=0)
    assert result.mode == "annealed"
    assert result.objective >= 0


def test_anneal_identical_inputs():
    rng = random.Random(8)
    theta = random_approx(rng, 10)
    result = conj_distance_anneal(theta, theta, seed=0, steps=0)
    assert result.objective == 0


def test_anneal_planted_instances():
    rng = random.Random(9)
    for n in (8, 15, 24):
        theta, phi, _ = planted_pair(rng, n)
        result = conj_distance_anneal(theta, phi, seed=1)
        assert result.objective == 0


def test_anneal_never_beats_exact():
    rng = random.Random(10)
    for _ in range(6):
        n = rng.randrange(2, 7)
        theta = random_approx(rng, n)
        phi = random_approx(rng, n)
        exact = conj_distance_exact(theta, phi)
        annealed = conj_distance_anneal(
            theta, phi, seed=3, restarts=4, steps=300)
        assert annealed.objective >= exact.objective


def test_anneal_deterministic():
    rng = random.Random(11)
    theta = random_approx(rng, 8)
    phi = random_approx(rng, 8)
    first = conj_distance_anneal(theta, phi, seed=42, restarts=4, steps=300)
    second = conj_distance_anneal(theta, phi, seed=42, restarts=4, steps=300)
    assert first == second


def test_alignment_report_fields():
    theta = cyclic_shift_approx(4)
    result = conj_distance_exact(theta, theta)
    d = result.to_dict()
    assert d["objective"] == "0/1"
    assert d["mode"] == "exact"
    assert d["distance_display"] == 0.0
    words = enumerate_words(("a",), 3)
    assert result.tail_bound == WeightScheme(3).tail_bound(len(words))


def test_equalize_dimensions():
    rng = random.Random(12)
    a, b = random_approx(rng, 2), random_approx(rng, 3)
    a2, b2 = equalize_dimensions(a, b)
    assert a2.dimension == b2.dimension == 6
    assert trace_profile(a2, 3).entries == trace_profile(a, 3).entries
    assert trace_profile(b2, 3).entries == trace_profile(b, 3).entries
    same_a, same_b = equalize_dimensions(a, a)
    assert same_a == a and same_b == a
    with pytest.raises(BudgetError):
        equalize_dimensions(
            random_approx(rng, 997), random_approx(rng, 996),
            size_cap=10 ** 5)


def test_axiom_suite_zero_cases():
    rng = random.Random(13)
    blocks = [random_approx(rng, rng.randrange(2, 4)) for _ in range(3)]
    weights = (Fraction(1, 4), Fraction(1, 2), Fraction(1, 4))
    checks = axiom_suite(blocks, weights, seed=5)
    by_name = {c.axiom: c for c in checks}
    for name in ("commutativity", "linearity", "scalar-identity",
                 "algebraic-compatibility"):
        assert by_name[name].objective == 0
        assert by_name[name].passed
    assert by_name["metric-blocks"].passed


def test_axiom_metric_blocks_equality_with_real_partners():
    # with exactly realized weights the block-diagonal alignment achieves
    # the weighted sum of blockwise objectives exactly
    rng = random.Random(14)
    blocks = [random_approx(rng, 3), random_approx(rng, 3)]
    partners = [random_approx(rng, 3), random_approx(rng, 3)]
    weights = (Fraction(1, 3), Fraction(2, 3))
    checks = axiom_suite(blocks, weights, partners=partners, seed=6)
    check = next(c for c in checks if c.axiom == "metric-blocks")
    assert check.objective == check.bound
    assert check.passed


def test_axiom_metric_weights_diagnostic():
    rng = random.Random(15)
    blocks = [random_approx(rng, 2), random_approx(rng, 2)]
    weights = (Fraction(1, 2), Fraction(1, 2))
    alt = (Fraction(1, 4), Fraction(3, 4))
    checks = axiom_suite(blocks, weights, alt_weights=alt, seed=7)
    check = next(c for c in checks if c.axiom == "metric-weights")
    assert check.bound == (2 * Fraction(1, 2)) ** 2
    assert "empirical_constant_display" in check.details
    assert check.objective < Fraction(2, 3)


def test_axiom_suite_validation():
    rng = random.Random(16)
    blocks = [random_approx(rng, 2)]
    with pytest.raises(PreconditionError):
        axiom_suite(blocks, (Fraction(1),))
    blocks = [random_approx(rng, 2), random_approx(rng, 2)]
    with pytest.raises(PreconditionError):
        axiom_suite(blocks, (Fraction(1), Fraction(0)))
    with pytest.raises(PreconditionError):
        axiom_suite(blocks, (Fraction(1, 2),))
