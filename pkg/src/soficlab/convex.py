"""The convex-like calculus on finite approximation stages.

Amplification tensors every image with an identity block, direct sums
concatenate blocks, a convex combination is a direct sum of amplifications
whose block proportions realize the requested weights, and cutting
restricts to an invariant set of points.  The index layout is coarse-left
throughout: amplifying by r keeps r consecutive indices per base point,
which makes amplification distribute literally over direct sums.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import BudgetError, PreconditionError
from .groups import SoficApprox
from .perm import Perm, tensor, direct_sum
from .util import UnionFind, format_fraction
from .words import Word

DEFAULT_SIZE_CAP = 1_000_000


def check_weights(weights):
    """Validate a weight vector: nonnegative rationals summing to one."""
    ws = tuple(Fraction(w) for w in weights)
    if any(w < 0 for w in ws):
        raise PreconditionError("weights must be nonnegative")
    if sum(ws, Fraction(0)) != 1:
        raise PreconditionError("weights must sum to 1")
    return ws


def amplify(theta, r):
    """Tensor every generator image with identity(r); every word keeps its
    fixed-point fraction."""
    if r < 1:
        raise PreconditionError("amplification factor must be >= 1")
    ident = Perm.identity(r)
    return SoficApprox(
        theta.generators,
        tuple(tensor(p, ident) for p in theta.perms),
        theta.relators)


def _reorder_like(theta, generators):
    """Reorder theta's generators to match the given name order."""
    if theta.generators == tuple(generators):
        return theta
    if set(theta.generators) != set(generators):
        raise PreconditionError(
            f"generator sets differ: {sorted(theta.generators)} vs "
            f"{sorted(generators)}")
    order = [theta.generators.index(g) for g in generators]
    relators = theta.relators
    if relators is not None:
        remap = {old: new for new, old in enumerate(order)}
        relators = tuple(
            Word(tuple((remap[g], s) for g, s in w.letters))
            for w in relators)
    return SoficApprox(
        tuple(generators), tuple(theta.perms[i] for i in order), relators)


def direct_sum_approx(a, b):
    """Generatorwise block sum; relator lists are merged when both carry
    presentations."""
    b = _reorder_like(b, a.generators)
    perms = tuple(direct_sum(p, q) for p, q in zip(a.perms, b.perms))
    if a.relators is None and b.relators is None:
        relators = None
    else:
        relators = tuple(dict.fromkeys(
            (a.relators or ()) + (b.relators or ())))
    return SoficApprox(a.generators, perms, relators)


def tensor_power(theta, m, size_cap=DEFAULT_SIZE_CAP):
    """m-fold tensor power; fixed-point fractions of every word are raised
    to the m-th power."""
    if m < 1:
        raise PreconditionError("tensor power must be >= 1")
    n = theta.dimension
    if n ** m > size_cap:
        raise BudgetError(
            f"tensor power dimension {n}^{m} exceeds size cap {size_cap}")
    perms = theta.perms
    for _ in range(m - 1):
        perms = tuple(tensor(p, q) for p, q in zip(perms, theta.perms))
    return SoficApprox(theta.generators, perms, theta.relators)


@dataclass(frozen=True, slots=True)
class CombinePlan:
    """Chosen multiplicities realizing a weight vector under a size cap."""

    requested: tuple        # weight Fractions
    dims: tuple             # block dimensions m_i
    multiplicities: tuple   # chosen r_i >= 1
    total: int              # sum m_i * r_i
    achieved: tuple         # m_i * r_i / total
    max_error: Fraction     # max_j |achieved_j - requested_j|

    def to_dict(self):
        return {
            "requested": [format_fraction(w) for w in self.requested],
            "dims": list(self.dims),
            "multiplicities": list(self.multiplicities),
            "total": self.total,
            "achieved": [format_fraction(w) for w in self.achieved],
            "max_error": format_fraction(self.max_error),
        }


def _plan_for(weights, dims, mults):
    total = sum(m * r for m, r in zip(dims, mults))
    achieved = tuple(Fraction(m * r, total) for m, r in zip(dims, mults))
    err = max(abs(a - w) for a, w in zip(achieved, weights))
    return CombinePlan(tuple(weights), tuple(dims), tuple(mults),
                       total, achieved, err)


def approximate_weights(weights, dims, cap, node_budget=2_000_000):
    """Multiplicities r_i >= 1 with sum m_i r_i <= cap minimizing the max
    weight error; ties broken by smaller total dimension, then lex-smallest
    r.  Exactly realizable weights give error 0.

    Two blocks are solved in closed form per leading multiplicity; more
    blocks fall back to exhaustive search bounded by node_budget.
    """
    weights = check_weights(weights)
    dims = tuple(int(m) for m in dims)
    if len(weights) != len(dims):
        raise PreconditionError("one weight per block dimension required")
    if any(m < 1 for m in dims):
        raise PreconditionError("block dimensions must be >= 1")
    if cap < sum(dims):
        raise PreconditionError(
            f"cap {cap} cannot fit one copy of every block "
            f"(needs {sum(dims)})")
    if len(dims) == 2:
        return _two_block_plan(weights, dims, cap)
    k = len(dims)
    suffix = [0] * (k + 1)
    for i in range(k - 1, -1, -1):
        suffix[i] = suffix[i + 1] + dims[i]

    best = None  # (error, total, r) compared lexicographically
    r = [0] * k
    nodes = 0

    def descend(i, used):
        nonlocal best, nodes
        if i == k:
            cand = _plan_for(weights, dims, tuple(r))
            key = (cand.max_error, cand.total, tuple(r))
            if best is None or key < best[0]:
                best = (key, cand)
            return
        limit = (cap - used - suffix[i + 1]) // dims[i]
        for ri in range(1, limit + 1):
            nodes += 1
            if nodes > node_budget:
                raise BudgetError(
                    "exhaustive weight search exceeded its node budget; "
                    "lower the cap")
            r[i] = ri
            descend(i + 1, used + dims[i] * ri)
        r[i] = 0

    descend(0, 0)
    return best[1]


def _two_block_plan(weights, dims, cap):
    """Exact two-block optimum: both blocks share one error value, which is
    strictly V-shaped in the second multiplicity, so only the integers
    around the continuous minimizer can win for each first multiplicity."""
    m1, m2 = dims
    lam = weights[0]
    best = None
    for r1 in range(1, (cap - m2) // m1 + 1):
        base = m1 * r1
        r2_cap = (cap - base) // m2
        candidates = {1, r2_cap}
        if 0 < lam < 1:
            # error vanishes at total = base / lam
            target = (Fraction(base, 1) / lam - base) / m2
            floor = target.numerator // target.denominator
            for r2 in (floor, floor + 1):
                if 1 <= r2 <= r2_cap:
                    candidates.add(r2)
        for r2 in sorted(candidates):
            cand = _plan_for(weights, dims, (r1, r2))
            key = (cand.max_error, cand.total, (r1, r2))
            if best is None or key < best[0]:
                best = (key, cand)
    return best[1]


def exact_total(weights, dims):
    """Smallest total dimension at which the weight vector is realized
    exactly (all weights must be positive)."""
    weights = check_weights(weights)
    if any(w == 0 for w in weights):
        raise PreconditionError("zero weights are never realized exactly")
    denom_lcm = 1
    lower = 1
    for w, m in zip(weights, dims):
        ratio = w / m
        denom_lcm = lcm(denom_lcm, ratio.denominator)
        need = Fraction(m, 1) / w
        lower = max(lower, -(-need.numerator // need.denominator))
    return -(-lower // denom_lcm) * denom_lcm


def convex_combine(pairs, cap, node_budget=2_000_000):
    """Direct sum of amplifications realizing the given weights.

    pairs: sequence of (weight, approximation) sharing one generator set.
    Returns (combined approximation, plan).
    """
    if not pairs:
        raise PreconditionError("need at least one weighted block")
    weights = [w for w, _ in pairs]
    approxes = [t for _, t in pairs]
    gens = approxes[0].generators
    approxes = [_reorder_like(t, gens) for t in approxes]
    dims = [t.dimension for t in approxes]
    plan = approximate_weights(weights, dims, cap, node_budget)
    blocks = [amplify(t, ri)
              for t, ri in zip(approxes, plan.multiplicities)]
    combined = blocks[0]
    for block in blocks[1:]:
        combined = direct_sum_approx(combined, block)
    return combined, plan


def orbits(theta):
    """Orbit partition of the group generated by the generator images,
    as a tuple of sorted tuples ordered by least element."""
    uf = UnionFind(theta.dimension)
    for p in theta.perms:
        for x, y in enumerate(p.img):
            uf.union(x, y)
    return uf.classes()


def cut(theta, subset):
    """Restrict every image to an invariant set of points, re-indexed by
    the sorted order of the set."""
    n = theta.dimension
    points = sorted(set(int(x) for x in subset))
    if not points:
        raise PreconditionError("cut set is empty")
    if points[0] < 0 or points[-1] >= n:
        raise PreconditionError("cut set contains out-of-range points")
    member = [False] * n
    for x in points:
        member[x] = True
    for name, p in zip(theta.generators, theta.perms):
        for x in points:
            if not member[p.img[x]]:
                raise PreconditionError(
                    f"set is not invariant: generator {name!r} maps point "
                    f"{x} to {p.img[x]} outside the set")
    index = {x: i for i, x in enumerate(points)}
    perms = tuple(
        Perm(tuple(index[p.img[x]] for x in points)) for p in theta.perms)
    return SoficApprox(theta.generators, perms, theta.relators)


# ---------------------------------------------------------------------------
# Explicit conjugators witnessing the calculus identities


def recovery_conjugator(subset, n):
    """Sorting permutation mapping cut(theta, S) (+) cut(theta, S^c)
    coordinates back onto theta's."""
    inside = sorted(set(int(x) for x in subset))
    outside = [x for x in range(n) if x not in set(inside)]
    return Perm(tuple(inside + outside))


def block_reorder_conjugator(dims, order):
    """Permutation mapping the direct sum taken in the given block order
    back onto the sum taken in the original order."""
    if sorted(order) != list(range(len(dims))):
        raise PreconditionError("order must be a permutation of the blocks")
    offsets = [0]
    for m in dims:
        offsets.append(offsets[-1] + m)
    img = []
    for j in order:
        img.extend(range(offsets[j], offsets[j] + dims[j]))
    return Perm(tuple(img))


def interleave_conjugator(n, r):
    """Permutation mapping the r-fold direct sum of a dimension-n stage
    onto its r-fold amplification: block j, point i  ->  i*r + j."""
    img = [0] * (n * r)
    for j in range(r):
        for i in range(n):
            img[j * n + i] = i * r + j
    return Perm(tuple(img))


def overlap_conjugator(dims, mults_x, mults_y):
    """Both sides being (+)_i block_i (x) 1_{R_i} and (+)_i block_i (x)
    1_{Q_i} of one common total dimension, map side-Y coordinates onto
    side-X coordinates so that min(R_i, Q_i) copies of every block match
    identically; leftover coordinates are paired in increasing order."""
    total_x = sum(m * r for m, r in zip(dims, mults_x))
    total_y = sum(m * q for m, q in zip(dims, mults_y))
    if total_x != total_y:
        raise PreconditionError(
            f"total dimensions differ: {total_x} vs {total_y}")
    img = [None] * total_y
    offx = offy = 0
    leftover_x = []
    leftover_y = []
    for m, big_r, big_q in zip(dims, mults_x, mults_y):
        common = min(big_r, big_q)
        for pt in range(m):
            for copy in range(common):
                img[offy + pt * big_q + copy] = offx + pt * big_r + copy
            for copy in range(common, big_r):
                leftover_x.append(offx + pt * big_r + copy)
            for copy in range(common, big_q):
                leftover_y.append(offy + pt * big_q + copy)
        offx += m * big_r
        offy += m * big_q
    for src, dst in zip(leftover_y, leftover_x):
        img[src] = dst
    return Perm(tuple(img))
