"""Weighted conjugacy alignment between two approximation stages.

The objective for a conjugator sigma is the truncated weighted sum

    sum_{i=1..M} 4^(-i) * hs_dist_sq(theta(g_i), sigma phi(g_i) sigma^-1)

over the enumerated words g_1, g_2, ... of bounded length, an exact
rational.  The square root is the reported (display-only) distance, and the
geometric tail beyond the truncation is certified, not guessed.  Exact
search minimizes over all conjugators; annealing gives a seeded,
reproducible upper bound.  Internally objectives are compared through the
integer key  sum_i mismatches_i * 4^(M-i),  which orders identically.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import lcm
from random import Random

from .convex import (DEFAULT_SIZE_CAP, amplify, block_reorder_conjugator,
                     check_weights, convex_combine, direct_sum_approx,
                     exact_total, interleave_conjugator, overlap_conjugator,
                     _reorder_like)
from .errors import BudgetError, PreconditionError
from .groups import conjugate_approx, word_images
from .perm import Perm, direct_sum, tensor
from .util import format_fraction, split_seed

EXACT_SEARCH_CAP = 8
ANNEAL_RESTARTS = 20
ANNEAL_STEPS = 5000
ANNEAL_COOLING = 0.995
TEMPERATURE_PROBES = 50


@dataclass(frozen=True, slots=True)
class WeightScheme:
    """Word-length truncation of the 4^(-i) weighted sum.

    With M enumerated words the discarded tail is bounded by
    2 * sum_{i>M} 4^(-i) = (2/3) * 4^(-M).
    """

    max_len: int = 3

    def weight(self, i):
        return Fraction(1, 4 ** i)

    def tail_bound(self, word_count):
        return Fraction(2, 3 * 4 ** word_count)


@dataclass(frozen=True, slots=True)
class Alignment:
    """A conjugator with its exact objective value and provenance."""

    conjugator: Perm
    objective: Fraction
    tail_bound: Fraction
    mode: str   # "exact" | "annealed" | "constructed"

    @property
    def distance(self):
        """Display-only square root of the objective."""
        return math.sqrt(self.objective)

    def to_dict(self):
        return {
            "conjugator": list(self.conjugator.img),
            "objective": format_fraction(self.objective),
            "tail_bound": format_fraction(self.tail_bound),
            "mode": self.mode,
            "distance_display": self.distance,
        }


def _pair_setup(theta, phi, ws):
    """Shared-dimension checks plus the word image tables of both sides."""
    phi = _reorder_like(phi, theta.generators)
    if theta.dimension != phi.dimension:
        raise PreconditionError(
            f"dimension mismatch: {theta.dimension} vs {phi.dimension}")
    phi_images = [img for _, img in word_images(phi, ws.max_len)]
    pairs = [
        (img_t.img, img_p.img)
        for (_, img_t), img_p in zip(
            word_images(theta, ws.max_len), phi_images)]
    return phi, pairs


def _objective_from_key(key, n, word_count):
    return Fraction(2 * key, n * 4 ** word_count)


def _full_key(pairs, sigma, n):
    """Integer objective key of a conjugator given as a one-line sequence."""
    key = 0
    for a, b in pairs:
        key = 4 * key + sum(
            1 for y in range(n) if a[sigma[y]] != sigma[b[y]])
    return key


def conj_objective(theta, phi, sigma, ws=WeightScheme()):
    """Exact truncated objective of one conjugator."""
    if sigma.n != theta.dimension:
        raise PreconditionError(
            f"conjugator dimension {sigma.n} does not match {theta.dimension}")
    _, pairs = _pair_setup(theta, phi, ws)
    n = theta.dimension
    return _objective_from_key(_full_key(pairs, sigma.img, n), n, len(pairs))


def conj_distance_exact(theta, phi, ws=WeightScheme(), cap=EXACT_SEARCH_CAP):
    """Global minimum of the objective over all n! conjugators.

    Deterministic: among minimizers the lex-smallest one-line form wins.
    Words are scanned most-significant first, so a partial sum already at or
    above the incumbent prunes the rest of the candidate.
    """
    n = theta.dimension
    if n > cap:
        raise BudgetError(
            f"dimension {n} exceeds the exact search cap {cap}")
    _, pairs = _pair_setup(theta, phi, ws)
    word_count = len(pairs)
    shifts = [4 ** (word_count - j) for j in range(word_count + 1)]
    best_key = None
    best_sigma = None
    for sigma in permutations(range(n)):
        key = 0
        pruned = False
        for j, (a, b) in enumerate(pairs):
            key = 4 * key + sum(
                1 for y in range(n) if a[sigma[y]] != sigma[b[y]])
            if best_key is not None and key * shifts[j + 1] >= best_key:
                pruned = True
                break
        if pruned:
            continue
        best_key = key
        best_sigma = sigma
        if key == 0:
            break
    return Alignment(
        Perm(best_sigma),
        _objective_from_key(best_key, n, word_count),
        ws.tail_bound(word_count),
        "exact")


def equalize_dimensions(theta, phi, size_cap=DEFAULT_SIZE_CAP):
    """Amplify both stages to their least common dimension."""
    n, m = theta.dimension, phi.dimension
    common = lcm(n, m)
    if common > size_cap:
        raise BudgetError(
            f"common dimension {common} exceeds size cap {size_cap}")
    return amplify(theta, common // n), amplify(phi, common // m)


def _cycle_len_map(p):
    lengths = [0] * p.n
    for cycle in p.cycles():
        for x in cycle:
            lengths[x] = len(cycle)
    return lengths


def _joint_propagation_start(theta, phi, rng=None):
    """Conjugator candidate matching points across the full generator
    structure: anchor a base point on a candidate of equal cycle length
    under generator 0 and propagate the pairing along all generator images,
    orbit by orbit.  On exactly conjugate inputs this reconstructs a perfect
    conjugator; unresolved points are filled in afterwards."""
    n = theta.dimension
    t_imgs = [p.img for p in theta.perms] + [
        p.inverse().img for p in theta.perms]
    p_imgs = [p.img for p in phi.perms] + [
        p.inverse().img for p in phi.perms]
    t_len = _cycle_len_map(theta.perms[0])
    p_len = _cycle_len_map(phi.perms[0])
    sigma = [None] * n
    used = [False] * n
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        orbit = [start]
        seen[start] = True
        pos = 0
        while pos < len(orbit):
            x = orbit[pos]
            pos += 1
            for img in p_imgs:
                y = img[x]
                if not seen[y]:
                    seen[y] = True
                    orbit.append(y)
        candidates = [
            t for t in range(n) if not used[t] and t_len[t] == p_len[start]]
        if rng is not None:
            rng.shuffle(candidates)
        for t0 in candidates:
            assign = {start: t0}
            claimed = {t0}
            queue = [start]
            ok = True
            while queue and ok:
                p = queue.pop()
                t = assign[p]
                for p_img, t_img in zip(p_imgs, t_imgs):
                    p2 = p_img[p]
                    t2 = t_img[t]
                    got = assign.get(p2)
                    if got is None:
                        if used[t2] or t2 in claimed:
                            ok = False
                            break
                        assign[p2] = t2
                        claimed.add(t2)
                        queue.append(p2)
                    elif got != t2:
                        ok = False
                        break
            if ok:
                for p, t in assign.items():
                    sigma[p] = t
                    used[t] = True
                break
    leftover_p = [p for p in range(n) if sigma[p] is None]
    leftover_t = [t for t in range(n) if not used[t]]
    if rng is not None:
        rng.shuffle(leftover_t)
    for p, t in zip(leftover_p, leftover_t):
        sigma[p] = t
    return sigma


def _cycle_matching_start(u_theta, u_phi, rng=None):
    """Conjugator candidate pairing equal-length cycles of one generator
    image across the two sides; deterministic when rng is None."""
    n = len(u_theta.img)
    by_len_t = {}
    for c in u_theta.cycles():
        by_len_t.setdefault(len(c), []).append(c)
    by_len_p = {}
    for c in u_phi.cycles():
        by_len_p.setdefault(len(c), []).append(c)
    sigma = [None] * n
    leftover_t = []
    leftover_p = []
    for length in sorted(set(by_len_t) | set(by_len_p)):
        ts = list(by_len_t.get(length, []))
        ps = list(by_len_p.get(length, []))
        if rng is not None:
            rng.shuffle(ps)
        matched = min(len(ts), len(ps))
        for tc, pc in zip(ts[:matched], ps[:matched]):
            rot = rng.randrange(length) if rng is not None else 0
            for i in range(length):
                sigma[pc[i]] = tc[(i + rot) % length]
        for tc in ts[matched:]:
            leftover_t.extend(tc)
        for pc in ps[matched:]:
            leftover_p.extend(pc)
    for src, dst in zip(sorted(leftover_p), sorted(leftover_t)):
        sigma[src] = dst
    return sigma


def conj_distance_anneal(theta, phi, ws=WeightScheme(), seed=0,
                         restarts=ANNEAL_RESTARTS, steps=ANNEAL_STEPS,
                         cooling=ANNEAL_COOLING):
    """Simulated annealing over conjugators with transposition moves.

    An upper bound on the exact optimum; deterministic given the seed.
    Restart states match points across the generator images' cycle and
    orbit structure (exactly conjugate inputs are typically aligned before
    any annealing happens), the merged result is the best alignment found
    over all restarts, and the search stops early once an exact zero is
    reached.  steps=0 evaluates the seeded starts only.
    """
    phi, pairs = _pair_setup(theta, phi, ws)
    n = theta.dimension
    word_count = len(pairs)
    weights4 = [4 ** (word_count - i) for i in range(1, word_count + 1)]
    tables = [
        (a, b, tuple(_invert(b)), w)
        for (a, b), w in zip(pairs, weights4)]

    t_start = None   # probed lazily, only if any restart actually anneals

    def initial_state(restart, rng):
        if restart == 0:
            return _joint_propagation_start(theta, phi, None)
        if restart == 1:
            return _cycle_matching_start(theta.perms[0], phi.perms[0], None)
        selector = restart % 4
        if selector == 0:
            return _joint_propagation_start(theta, phi, rng)
        if selector == 3:
            return list(Perm.random(n, rng).img)
        g = restart % max(1, len(theta.generators))
        return _cycle_matching_start(theta.perms[g], phi.perms[g], rng)

    best_key = None
    best_sigma = None
    for restart in range(restarts + 1):
        rng = Random(split_seed(seed, "restart", restart))
        sigma = initial_state(restart, rng)
        key = _full_key(pairs, sigma, n)
        if best_key is None or key < best_key:
            best_key, best_sigma = key, tuple(sigma)
        if best_key == 0:
            break
        if steps <= 0 or n < 2:
            continue
        if t_start is None:
            probe_rng = Random(split_seed(seed, "probe"))
            probe_keys = [
                _full_key(pairs, Perm.random(n, probe_rng).img, n)
                for _ in range(TEMPERATURE_PROBES)]
            spread = float(max(probe_keys) - min(probe_keys))
            t_start = spread if spread > 0 else 1.0
        temperature = t_start
        current = key
        for _ in range(steps):
            a = rng.randrange(n)
            b = rng.randrange(n)
            if a == b:
                temperature *= cooling
                continue
            delta = _swap_delta(tables, sigma, a, b)
            if delta <= 0 or rng.random() < math.exp(
                    -float(delta) / temperature):
                sigma[a], sigma[b] = sigma[b], sigma[a]
                current += delta
                if current < best_key:
                    best_key, best_sigma = current, tuple(sigma)
                    if best_key == 0:
                        break
            temperature *= cooling
        if best_key == 0:
            break
    return Alignment(
        Perm(best_sigma),
        _objective_from_key(best_key, n, word_count),
        ws.tail_bound(word_count),
        "annealed")


def _invert(img):
    inv = [0] * len(img)
    for x, y in enumerate(img):
        inv[y] = x
    return inv


def _swap_delta(tables, sigma, a, b):
    """Exact objective-key change of swapping sigma at positions a, b."""
    sa = sigma[a]
    sb = sigma[b]
    delta = 0
    for t_img, p_img, p_inv, weight in tables:
        ys = {a, b, p_inv[a], p_inv[b]}
        change = 0
        for y in ys:
            sy = sigma[y]
            py = p_img[y]
            spy = sigma[py]
            change -= t_img[sy] != spy
            sy2 = sb if y == a else sa if y == b else sy
            spy2 = sb if py == a else sa if py == b else spy
            change += t_img[sy2] != spy2
        delta += change * weight
    return delta


# ---------------------------------------------------------------------------
# Certificates for the convex-structure axioms


@dataclass(frozen=True, slots=True)
class AxiomCheck:
    """One axiom instance: an explicit conjugator with its exact values."""

    axiom: str
    description: str
    objective: Fraction          # left-hand side
    bound: Fraction              # right-hand side (0 for the exact cases)
    conjugator: Perm
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self):
        d = {
            "axiom": self.axiom,
            "description": self.description,
            "objective": format_fraction(self.objective),
            "bound": format_fraction(self.bound),
            "conjugator": list(self.conjugator.img),
            "passed": self.passed,
        }
        d.update(self.details)
        return d


def _blockwise_conjugator(sigmas, multiplicities):
    parts = [
        tensor(s, Perm.identity(r)) for s, r in zip(sigmas, multiplicities)]
    out = parts[0]
    for part in parts[1:]:
        out = direct_sum(out, part)
    return out


def axiom_suite(approxes, weights, *, alt_weights=None, partners=None,
                partner_conjugators=None, ws=WeightScheme(),
                c_bound=Fraction(2), seed=0):
    """Run the convex-axiom certificate instances on the given blocks.

    approxes share one generator set; weights are positive rationals summing
    to one (so they are realized exactly at some finite total dimension).
    The commutativity, linearity, scalar-identity and algebraic-compatibility
    instances must reach objective exactly 0 with their explicit
    conjugators.  The two metric-compatibility inequalities are checked with
    constructed alignments: the blockwise one is exact, the weight one is a
    diagnostic with configurable constant (the smallest constant observed is
    reported, never asserted).

    partners, when given, are same-dimension stages used for the blockwise
    metric check; by default seeded planted conjugates of the blocks are
    used, with their planting conjugators as the blockwise alignments.
    """
    approxes = list(approxes)
    if len(approxes) < 2:
        raise PreconditionError("axiom suite needs at least two blocks")
    weights = check_weights(weights)
    if len(weights) != len(approxes):
        raise PreconditionError("one weight per block required")
    if any(w == 0 for w in weights):
        raise PreconditionError("axiom instances need strictly positive "
                                "weights")
    gens = approxes[0].generators
    approxes = [_reorder_like(t, gens) for t in approxes]
    dims = [t.dimension for t in approxes]
    k = len(approxes)
    checks = []

    # (1) commutativity: summing in reversed order is a block reshuffle.
    cap = exact_total(weights, dims)
    combined, plan = convex_combine(list(zip(weights, approxes)), cap)
    reversed_comb, _ = convex_combine(
        list(zip(reversed(weights), reversed(approxes))), cap)
    block_dims = [m * r for m, r in zip(dims, plan.multiplicities)]
    sigma = block_reorder_conjugator(block_dims, tuple(reversed(range(k))))
    obj = conj_objective(combined, reversed_comb, sigma, ws)
    checks.append(AxiomCheck(
        "commutativity",
        f"weighted sum of {k} blocks vs the reversed listing",
        obj, Fraction(0), sigma, obj == 0,
        {"total_dimension": combined.dimension}))

    # (2) linearity: doubling a block equals amplifying it.
    base = approxes[0]
    n0 = dims[0]
    sigma = interleave_conjugator(n0, 2)
    obj = conj_objective(
        amplify(base, 2), direct_sum_approx(base, base), sigma, ws)
    checks.append(AxiomCheck(
        "linearity",
        "twofold amplification vs the double direct sum of block 0",
        obj, Fraction(0), sigma, obj == 0,
        {"total_dimension": 2 * n0}))

    # (3) scalar identity: weight one returns the block itself.
    solo, solo_plan = convex_combine([(Fraction(1), base)], n0)
    sigma = Perm.identity(n0)
    obj = conj_objective(base, solo, sigma, ws)
    checks.append(AxiomCheck(
        "scalar-identity",
        "combination with weight 1 vs the block itself",
        obj, Fraction(0), sigma, obj == 0,
        {"multiplicities": list(solo_plan.multiplicities)}))

    # (4) first inequality: moving the weights moves the sum by at most a
    # constant times the weight change (diagnostic; constant configurable).
    if alt_weights is not None:
        alt = check_weights(alt_weights)
        if len(alt) != k or any(w == 0 for w in alt):
            raise PreconditionError(
                "alternative weights must be positive, one per block")
        alt_comb, alt_plan = convex_combine(
            list(zip(alt, approxes)), exact_total(alt, dims))
        common = lcm(combined.dimension, alt_comb.dimension)
        factor_x = common // combined.dimension
        factor_y = common // alt_comb.dimension
        mults_x = [r * factor_x for r in plan.multiplicities]
        mults_y = [q * factor_y for q in alt_plan.multiplicities]
        sigma = overlap_conjugator(dims, mults_x, mults_y)
        obj = conj_objective(
            amplify(combined, factor_x), amplify(alt_comb, factor_y),
            sigma, ws)
        weight_gap = sum(
            abs(t - s) for t, s in zip(weights, alt)) \
            + plan.max_error + alt_plan.max_error
        bound = (Fraction(c_bound) * weight_gap) ** 2
        details = {"weight_gap": format_fraction(weight_gap)}
        if weight_gap > 0:
            details["empirical_constant_display"] = \
                math.sqrt(obj) / float(weight_gap)
        checks.append(AxiomCheck(
            "metric-weights",
            "same blocks under two weight vectors, overlap alignment "
            "(squared bound, diagnostic)",
            obj, bound, sigma, obj <= bound, details))

    # (4) second inequality: distance between sums is at most the weighted
    # sum of blockwise distances, witnessed by the block-diagonal conjugator.
    if partners is None:
        rng = Random(split_seed(seed, "axiom-partners"))
        plantings = [Perm.random(m, rng) for m in dims]
        partners = [
            conjugate_approx(t, s) for t, s in zip(approxes, plantings)]
        partner_conjugators = [s.inverse() for s in plantings]
    else:
        partners = [_reorder_like(p, gens) for p in partners]
        if [p.dimension for p in partners] != dims:
            raise PreconditionError(
                "partners must match the block dimensions")
        if partner_conjugators is None:
            partner_conjugators = [Perm.identity(m) for m in dims]
    partner_comb, partner_plan = convex_combine(
        list(zip(weights, partners)), cap)
    assert partner_plan.multiplicities == plan.multiplicities
    sigma = _blockwise_conjugator(
        partner_conjugators, plan.multiplicities)
    obj = conj_objective(combined, partner_comb, sigma, ws)
    blockwise = [
        conj_objective(t, p, s, ws)
        for t, p, s in zip(approxes, partners, partner_conjugators)]
    bound = sum(
        (w * o for w, o in zip(weights, blockwise)), Fraction(0))
    checks.append(AxiomCheck(
        "metric-blocks",
        "sum vs sum of partner blocks under the block-diagonal conjugator",
        obj, bound, sigma, obj <= bound,
        {"blockwise_objectives": [format_fraction(o) for o in blockwise]}))

    # (5) algebraic compatibility: nesting combinations flattens exactly.
    half = (k + 1) // 2
    t_outer = sum(weights[:half], Fraction(0))
    inner1_w = [w / t_outer for w in weights[:half]]
    inner2_w = [w / (1 - t_outer) for w in weights[half:]]
    inner1, _ = convex_combine(
        list(zip(inner1_w, approxes[:half])),
        exact_total(inner1_w, dims[:half]))
    inner2, _ = convex_combine(
        list(zip(inner2_w, approxes[half:])),
        exact_total(inner2_w, dims[half:]))
    outer_w = (t_outer, 1 - t_outer)
    outer_dims = (inner1.dimension, inner2.dimension)
    nested, _ = convex_combine(
        [(outer_w[0], inner1), (outer_w[1], inner2)],
        exact_total(outer_w, outer_dims))
    flat, _ = convex_combine(list(zip(weights, approxes)), cap)
    nested_eq, flat_eq = equalize_dimensions(nested, flat)
    sigma = Perm.identity(nested_eq.dimension)
    obj = conj_objective(nested_eq, flat_eq, sigma, ws)
    checks.append(AxiomCheck(
        "algebraic-compatibility",
        f"nested combination over a {half}/{k - half} split vs the flat "
        "combination",
        obj, Fraction(0), sigma, obj == 0,
        {"total_dimension": nested_eq.dimension}))

    return checks
