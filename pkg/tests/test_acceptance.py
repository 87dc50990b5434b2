"""Acceptance suite: one test per criterion, each printing a PASS line
with its runtime (run with -s to see them).  Every tolerance is exact; the
only measured quantities are runtimes against each criterion's budget.
"""

import random
import time
from fractions import Fraction
from itertools import permutations, product
from math import factorial

from soficlab import (Perm, SubsetFamily, PointMap, axiom_suite, blockify,
                      centralizer_exact, conj_distance_anneal,
                      conj_distance_exact, conj_objective, conjugate_approx,
                      cut, cyclic_shift_approx, cyclic_table, deficit,
                      dihedral_table, direct_sum_approx,
                      ergodicity_certificate, family_cost, fixed_fraction,
                      klein_table, majority_set, membership_counts, orbits,
                      quaternion_table, recovery_conjugator, regular_action,
                      relator_defect, round_to_permutation, tensor,
                      tensor_power, trace_profile, verify_certificate,
                      witness_value, witness_permutation, word_images)
from oracles import (brute_best_family_cost, brute_centralizer,
                     random_approx, random_perm)


def _report(num, name, started, limit):
    elapsed = time.perf_counter() - started
    print(f"criterion {num:2d} {name}: PASS ({elapsed:.2f}s < {limit}s)")
    assert elapsed < limit, f"criterion {num} exceeded {limit}s"


def test_criterion_01_rounding_lemma():
    started = time.perf_counter()
    for n in range(1, 6):
        perms = list(permutations(range(n)))
        for values in product(range(n), repeat=n):
            pm = PointMap(values)
            w, disagreements = round_to_permutation(pm)
            r = deficit(pm)
            assert disagreements == r == n - len(set(values))
            best = min(
                sum(1 for a, b in zip(imgs, values) if a != b)
                for imgs in perms)
            assert disagreements == best
            assert Fraction(2 * disagreements, n) == Fraction(2 * r, n)
    _report(1, "rounding lemma", started, 10)


def test_criterion_02_majority_lemma():
    started = time.perf_counter()

    def check(fam, verify_averaging):
        n, r = fam.n, fam.r
        a = majority_set(fam)
        counts = membership_counts(fam)
        cost = family_cost(fam, a)
        assert cost == sum(min(c, r - c) for c in counts)
        assert cost == brute_best_family_cost(n, fam.subsets)
        _, best_r = witness_permutation(fam)
        assert cost <= best_r
        if verify_averaging:
            total = sum(
                witness_value(fam, Perm(q))
                for q in permutations(range(r)))
            assert total == factorial(r - 1) * sum(
                2 * c * (r - c) for c in counts)

    for n in range(1, 5):
        points = list(range(n))
        subsets = [frozenset(s) for k in range(n + 1)
                   for s in _subsets_of(points, k)]
        for r in range(1, 4):
            for family in product(subsets, repeat=r):
                check(SubsetFamily(n, family), verify_averaging=True)

    rng = random.Random(202)
    for _ in range(200):
        n = rng.randrange(1, 13)
        r = rng.randrange(1, 7)
        fam = SubsetFamily(n, tuple(
            frozenset(x for x in range(n) if rng.random() < 0.5)
            for _ in range(r)))
        check(fam, verify_averaging=(r <= 5))
    _report(2, "majority lemma", started, 60)


def _subsets_of(points, k):
    from itertools import combinations
    return combinations(points, k)


def test_criterion_03_tensor_trace_law():
    started = time.perf_counter()
    rng = random.Random(303)
    for _ in range(1000):
        p = random_perm(rng, rng.randrange(1, 51))
        q = random_perm(rng, rng.randrange(1, 51))
        assert fixed_fraction(tensor(p, q)) == \
            fixed_fraction(p) * fixed_fraction(q)
    for _ in range(20):
        theta = random_approx(rng, rng.randrange(2, 13))
        base = {w: fixed_fraction(img) for w, img in word_images(theta, 4)}
        for m in (2, 3):
            powered = tensor_power(theta, m)
            for w, img in word_images(powered, 4):
                assert fixed_fraction(img) == base[w] ** m
    _report(3, "tensor-power trace law", started, 30)


def test_criterion_04_centralizer_oracle():
    started = time.perf_counter()
    rng = random.Random(404)
    for _ in range(100):
        n = rng.randrange(2, 8)
        theta = random_approx(rng, n)
        desc = centralizer_exact(theta)
        enumerated = list(desc.elements())
        assert desc.order == len(enumerated)
        assert set(enumerated) == set(brute_centralizer(theta))
    _report(4, "centralizer oracle", started, 60)


def test_criterion_05_regular_action_certificates():
    started = time.perf_counter()
    corpus = [cyclic_table(n) for n in range(1, 17)]
    corpus += [dihedral_table(m) for m in range(1, 9)]
    corpus += [klein_table(), quaternion_table()]
    for table in corpus:
        left = regular_action(table, "left")
        right = regular_action(table, "right")
        desc = centralizer_exact(left)
        assert desc.order == table.order
        assert set(desc.elements()) == set(right.perms)
        cert = ergodicity_certificate(left)
        assert cert.verdict == "transitive"
        assert verify_certificate(left, cert)
    _report(5, "regular-action certificates", started, 30)


def test_criterion_06_convex_axiom_certificates():
    started = time.perf_counter()
    rng = random.Random(606)
    for instance in range(20):
        k = rng.randrange(2, 7)
        dims = [rng.randrange(1, 4) for _ in range(k)]
        mults = [rng.randrange(1, 3) for _ in range(k)]
        total = sum(m * r for m, r in zip(dims, mults))
        weights = [Fraction(m * r, total) for m, r in zip(dims, mults)]
        blocks = [random_approx(rng, m) for m in dims]
        if instance % 2 == 0:
            partners = [random_approx(rng, m) for m in dims]
            checks = axiom_suite(
                blocks, weights, partners=partners, seed=instance)
        else:
            checks = axiom_suite(blocks, weights, seed=instance)
        by_name = {c.axiom: c for c in checks}
        for name in ("commutativity", "linearity", "scalar-identity",
                     "algebraic-compatibility"):
            assert by_name[name].objective == 0, (instance, name)
            assert by_name[name].passed
        blockwise = by_name["metric-blocks"]
        assert blockwise.objective <= blockwise.bound
        assert blockwise.passed
    _report(6, "convex axiom certificates", started, 30)


def test_criterion_07_metric_sanity():
    started = time.perf_counter()
    rng = random.Random(707)
    objectives = []

    # exact search finds planted conjugacies, n <= 7
    for _ in range(6):
        n = rng.randrange(3, 8)
        theta = random_approx(rng, n)
        phi = conjugate_approx(theta, random_perm(rng, n))
        exact = conj_distance_exact(theta, phi)
        assert exact.objective == 0
        objectives.append(exact.objective)

    # annealing with the default budget, 50 seeded runs, >= 90% zeros
    zeros = 0
    for trial, n in enumerate((10, 16, 22, 27, 30)):
        theta = random_approx(rng, n)
        phi = conjugate_approx(theta, random_perm(rng, n))
        for seed in range(10):
            annealed = conj_distance_anneal(theta, phi, seed=seed)
            objectives.append(annealed.objective)
            if annealed.objective == 0:
                zeros += 1
    assert zeros >= 45, f"only {zeros}/50 annealing runs reached zero"

    # annealing never beats exact where both run
    for _ in range(5):
        n = rng.randrange(3, 7)
        theta = random_approx(rng, n)
        phi = random_approx(rng, n)
        exact = conj_distance_exact(theta, phi)
        annealed = conj_distance_anneal(
            theta, phi, seed=1, restarts=4, steps=500)
        assert annealed.objective >= exact.objective
        objectives.extend([exact.objective, annealed.objective])

    # diameter bound
    for obj in objectives:
        assert obj < Fraction(2, 3)
    _report(7, "metric sanity", started, 120)


def test_criterion_08_cut_recover():
    started = time.perf_counter()
    rng = random.Random(808)
    done = 0
    while done < 50:
        a = random_approx(rng, rng.randrange(2, 6))
        b = random_approx(rng, rng.randrange(2, 6))
        theta = direct_sum_approx(a, b)
        parts = orbits(theta)
        assert len(parts) >= 2
        keep = [p for p in parts if rng.random() < 0.5]
        inside = {x for orbit in keep for x in orbit}
        if not inside or len(inside) == theta.dimension:
            continue
        outside = set(range(theta.dimension)) - inside
        rebuilt = direct_sum_approx(cut(theta, inside), cut(theta, outside))
        sigma = recovery_conjugator(inside, theta.dimension)
        assert conj_objective(theta, rebuilt, sigma) == 0
        done += 1
    _report(8, "cut/recover", started, 20)


def test_criterion_09_blockify():
    started = time.perf_counter()
    rng = random.Random(909)
    for _ in range(100):
        n = rng.randrange(1, 21)
        r = rng.randrange(1, 6)
        subset = {x for x in range(n * r) if rng.random() < 0.5}
        result = blockify(subset, n, r)
        assert result.sym_diff == sum(
            len(result.majority ^ sl) for sl in result.slices)
        _, best_r = witness_permutation(SubsetFamily(n, result.slices))
        assert result.sym_diff <= best_r
    _report(9, "blockify", started, 20)


def test_criterion_10_trace_profile():
    started = time.perf_counter()
    for n in (6, 12, 60):
        theta = cyclic_shift_approx(n)
        profile = trace_profile(theta, 3)
        assert profile.score == 0
        assert relator_defect(theta) == 0
    _report(10, "trace profile", started, 5)
