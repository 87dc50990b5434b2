"""Combinatorial rounding engines.

Two independent tools: rounding a point map (a 0-1 matrix with one entry
per row) to a genuine permutation while touching as few points as
possible, and summarizing a family of subsets by its majority set together
with a copy-permuting witness that certifies the summary's quality.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from random import Random

from .errors import BudgetError, PreconditionError
from .perm import Perm
from .util import split_seed

EXHAUSTIVE_WITNESS_LIMIT = 8


@dataclass(frozen=True, slots=True)
class PointMap:
    """A not-necessarily-injective self-map of {0..n-1}."""

    values: tuple

    def __post_init__(self):
        values = tuple(int(x) for x in self.values)
        object.__setattr__(self, "values", values)
        n = len(values)
        if n == 0:
            raise ValueError("point map must have dimension >= 1")
        if any(not 0 <= x < n for x in values):
            raise ValueError("point map has out-of-range values")

    @property
    def n(self):
        return len(self.values)


@dataclass(frozen=True, slots=True)
class PatchSpec:
    """A partition of {0..n-1} into blocks plus one permutation per block."""

    blocks: tuple   # of frozensets
    perms: tuple    # of Perms, all of dimension n

    def __post_init__(self):
        blocks = tuple(frozenset(int(x) for x in b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "perms", tuple(self.perms))
        if len(blocks) != len(self.perms):
            raise ValueError("one permutation per block required")
        if not self.perms:
            raise ValueError("patch spec must have at least one block")
        n = self.perms[0].n
        if any(p.n != n for p in self.perms):
            raise ValueError("all patch permutations must share dimension")
        seen = set()
        for b in blocks:
            if b & seen:
                raise ValueError("blocks are not disjoint")
            seen |= b
        if seen != set(range(n)):
            raise ValueError("blocks do not cover 0..n-1")

    @property
    def n(self):
        return self.perms[0].n


def patchwork(spec):
    """Glue the block permutations into one point map: on block i the map
    acts as the i-th permutation."""
    values = [0] * spec.n
    for block, p in zip(spec.blocks, spec.perms):
        for x in block:
            values[x] = p.img[x]
    return PointMap(tuple(values))


def deficit(pm):
    """Number of missed columns: n - |image|."""
    return pm.n - len(set(pm.values))


def round_to_permutation(pm):
    """Closest permutation to a point map, with the disagreement count.

    For each value in the image the lowest-index preimage keeps it; the
    remaining points are matched to the missing values in increasing
    order.  The disagreement count equals the deficit, which is the
    minimum over all permutations.
    """
    n = pm.n
    keeper = {}
    for x, y in enumerate(pm.values):
        if y not in keeper:
            keeper[y] = x
    img = [None] * n
    for y, x in keeper.items():
        img[x] = y
    missing = sorted(set(range(n)) - set(pm.values))
    free_rows = [x for x in range(n) if img[x] is None]
    for x, y in zip(free_rows, missing):
        img[x] = y
    w = Perm(tuple(img))
    disagreements = sum(1 for a, b in zip(w.img, pm.values) if a != b)
    return w, disagreements


@dataclass(frozen=True, slots=True)
class SubsetFamily:
    """Subsets A_1..A_r of {0..n-1} (repetitions allowed)."""

    n: int
    subsets: tuple

    def __post_init__(self):
        subsets = tuple(
            frozenset(int(x) for x in s) for s in self.subsets)
        object.__setattr__(self, "subsets", subsets)
        if self.n < 0:
            raise ValueError("ambient size must be >= 0")
        for s in subsets:
            if any(not 0 <= x < self.n for x in s):
                raise ValueError("subset has out-of-range points")

    @property
    def r(self):
        return len(self.subsets)


def membership_counts(fam):
    """a_i = number of subsets containing point i."""
    counts = [0] * fam.n
    for s in fam.subsets:
        for x in s:
            counts[x] += 1
    return tuple(counts)


def family_cost(fam, subset):
    """Sum over the family of |subset (sym diff) A_j|."""
    b = frozenset(subset)
    return sum(len(b ^ s) for s in fam.subsets)


def majority_set(fam):
    """Points contained in strictly more than half the subsets.

    Its cost equals sum_i min(a_i, r - a_i), the minimum over all subsets.
    Ties 2*a_i = r are excluded.
    """
    if fam.r < 1:
        raise PreconditionError("family must contain at least one subset")
    r = fam.r
    return frozenset(
        i for i, a in enumerate(membership_counts(fam)) if 2 * a > r)


def witness_value(fam, p):
    """R(p) = sum_j |A_{p(j)} (sym diff) A_j| for a copy permutation p."""
    if p.n != fam.r:
        raise PreconditionError("witness permutation must act on the copies")
    return sum(
        len(fam.subsets[p.img[j]] ^ fam.subsets[j]) for j in range(fam.r))


def averaging_bound(fam):
    """Mean of R over all copy permutations: sum_i 2 a_i (r - a_i) / r."""
    r = fam.r
    return Fraction(
        sum(2 * a * (r - a) for a in membership_counts(fam)), r)


def witness_permutation(fam, seed=0, budget=2000):
    """A copy permutation maximizing R, exhaustively for r <= 8, by seeded
    sampling above that.  The returned value is guaranteed to be at least
    ceil(averaging bound) and at least the majority set's cost."""
    if fam.r < 1:
        raise PreconditionError("family must contain at least one subset")
    r = fam.r
    if r <= EXHAUSTIVE_WITNESS_LIMIT:
        best_p = None
        best_val = -1
        for imgs in permutations(range(r)):
            p = Perm(imgs)
            val = witness_value(fam, p)
            if val > best_val:
                best_p, best_val = p, val
        return best_p, best_val
    if budget < 1:
        raise BudgetError(
            f"copy count {r} needs sampling but the budget is 0")
    bound = averaging_bound(fam)
    floor_needed = max(
        -(-bound.numerator // bound.denominator),
        family_cost(fam, majority_set(fam)))
    rng = Random(split_seed(seed, "witness"))
    best_p = None
    best_val = -1
    for _ in range(budget):
        p = Perm.random(r, rng)
        val = witness_value(fam, p)
        if val > best_val:
            best_p, best_val = p, val
    if best_val < floor_needed:
        raise BudgetError(
            f"sampling budget {budget} found witness value {best_val} "
            f"below the guaranteed floor {floor_needed}")
    return best_p, best_val


def copy_slices(subset, n, r):
    """Slice a subset of {0..n*r-1} into its r copies: slice j collects the
    base points i with i*r + j in the subset."""
    s = set(int(x) for x in subset)
    if any(not 0 <= x < n * r for x in s):
        raise PreconditionError(
            f"subset does not fit the ambient size {n}*{r}")
    slices = [set() for _ in range(r)]
    for x in s:
        i, j = divmod(x, r)
        slices[j].add(i)
    return tuple(frozenset(sl) for sl in slices)


@dataclass(frozen=True, slots=True)
class BlockifyResult:
    block_set: frozenset    # T, a full-copies set closest to the input
    majority: frozenset     # A, with T = A x copies
    slices: tuple           # the r copy slices of the input
    sym_diff: int           # |T (sym diff) S| = sum_j |A (sym diff) A^j|


def blockify(subset, n, r):
    """Round a subset of {0..n*r-1} to a union of full copy fibers.

    Points are read as i*r + j (base point i, copy j), matching the tensor
    layout of amplification.  The majority set A of the copy slices gives
    T = A x {0..r-1}, and |T (sym diff) S| equals the summed slice costs.
    """
    s = frozenset(int(x) for x in subset)
    slices = copy_slices(s, n, r)
    fam = SubsetFamily(n, slices)
    majority = majority_set(fam)
    block_set = frozenset(
        i * r + j for i in majority for j in range(r))
    return BlockifyResult(
        block_set, majority, slices, len(block_set ^ s))
