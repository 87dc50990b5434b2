"""Exact centralizer of the generated permutation group, transitivity
certificates, and the mixing statistic of commutant elements.

A centralizing permutation maps every orbit of the generated group onto an
isomorphic orbit and is determined on an orbit by the image of its base
point: sigma(t(base)) = t(sigma(base)) along the Schreier tree.  Validity
of a base image is checked edge-wise (every non-tree edge of the orbit
graph is a point-stabilizer Schreier generator applied to the candidate),
the group order comes from a product-over-matchings formula without any
enumeration, and elements are enumerated lazily up to a hard cap.

The transitivity verdict is a finite-stage PROXY diagnostic: it reports
whether the centralizer acts transitively on the points of this stage, and
never claims more than that.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial
from random import Random

from .errors import BudgetError, PreconditionError
from .perm import Perm, conjugate, hs_dist_sq, mismatch_count
from .util import format_fraction, split_seed

DEFAULT_ENUM_CAP = 100_000
DEFAULT_STRUCTURE_BOUND = 10_000


@dataclass(frozen=True, slots=True)
class OrbitStructure:
    """Orbits with their Schreier-tree discovery edges."""

    orbits: tuple        # sorted point tuples, ordered by least element
    orbit_of: tuple      # point -> orbit index
    discovery: tuple     # per orbit: ((x, prev, gen_idx, sign), ...) BFS order


def orbit_structure(theta):
    n = theta.dimension
    perms = theta.perms
    inverses = [p.inverse() for p in perms]
    orbit_of = [-1] * n
    orbits = []
    discovery = []
    for start in range(n):
        if orbit_of[start] != -1:
            continue
        idx = len(orbits)
        orbit_of[start] = idx
        edges = [(start, -1, -1, 0)]
        queue = [start]
        pos = 0
        while pos < len(queue):
            x = queue[pos]
            pos += 1
            for g, (p, pinv) in enumerate(zip(perms, inverses)):
                for sign, img in ((1, p.img), (-1, pinv.img)):
                    y = img[x]
                    if orbit_of[y] == -1:
                        orbit_of[y] = idx
                        edges.append((y, x, g, sign))
                        queue.append(y)
        orbits.append(tuple(sorted(queue)))
        discovery.append(tuple(edges))
    return OrbitStructure(tuple(orbits), tuple(orbit_of), tuple(discovery))


def _propagate(theta, structure, inverses, orbit_idx, y):
    """sigma restricted to one orbit when its base maps to y, or None.

    Consistency of every (point, generator) edge is exactly the condition
    that each Schreier generator of the base's stabilizer fixes y.
    """
    assign = {}
    for x, prev, g, sign in structure.discovery[orbit_idx]:
        if prev == -1:
            assign[x] = y
        else:
            img = theta.perms[g].img if sign == 1 else inverses[g].img
            assign[x] = img[assign[prev]]
    for x in structure.orbits[orbit_idx]:
        ax = assign[x]
        for p in theta.perms:
            if assign.get(p.img[x]) != p.img[ax]:
                return None
    return assign


@dataclass(frozen=True, slots=True)
class CentralizerDescription:
    """Structure of the centralizer of the generated permutation group."""

    theta: object
    structure: OrbitStructure
    orbit_classes: tuple   # tuples of orbit indices, isomorphic as actions
    base_images: tuple     # per orbit: sorted valid global images of its base
    order: int
    enum_cap: int

    def elements(self):
        """Yield centralizer elements, deterministically, up to enum_cap."""
        return _enumerate_elements(self)

    def to_dict(self):
        return {
            "order": str(self.order),
            "orbits": [list(o) for o in self.structure.orbits],
            "orbit_classes": [list(c) for c in self.orbit_classes],
            "base_images": [list(b) for b in self.base_images],
            "enum_cap": self.enum_cap,
        }


def centralizer_exact(theta, cap=DEFAULT_ENUM_CAP,
                      structure_bound=DEFAULT_STRUCTURE_BOUND):
    """Compute the centralizer structure, exact order included.

    Enumeration cost is deferred: the order uses the formula
    product over classes of k! * c^k with k the class size and c the
    per-orbit count of compatible base images.
    """
    n = theta.dimension
    if n > structure_bound:
        raise BudgetError(
            f"dimension {n} exceeds the structure bound {structure_bound}")
    structure = orbit_structure(theta)
    inverses = [p.inverse() for p in theta.perms]
    sizes = [len(o) for o in structure.orbits]
    base_images = []
    for idx, orbit in enumerate(structure.orbits):
        valid = []
        for y in range(n):
            if sizes[structure.orbit_of[y]] != sizes[idx]:
                continue
            if _propagate(theta, structure, inverses, idx, y) is not None:
                valid.append(y)
        base_images.append(tuple(valid))

    k_orbits = len(structure.orbits)
    parent = list(range(k_orbits))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for idx, valid in enumerate(base_images):
        for y in valid:
            a, b = find(idx), find(structure.orbit_of[y])
            if a != b:
                parent[max(a, b)] = min(a, b)
    grouped = {}
    for idx in range(k_orbits):
        grouped.setdefault(find(idx), []).append(idx)
    classes = tuple(tuple(v) for _, v in sorted(grouped.items()))

    order = 1
    for cls in classes:
        counts = set()
        for member in cls:
            per_target = {}
            for y in base_images[member]:
                per_target[structure.orbit_of[y]] = \
                    per_target.get(structure.orbit_of[y], 0) + 1
            if set(per_target) != set(cls):
                raise RuntimeError("orbit class structure is inconsistent")
            counts.update(per_target.values())
        if len(counts) != 1:
            raise RuntimeError("compatible image counts differ inside a "
                               "class")
        c = counts.pop()
        order *= factorial(len(cls)) * c ** len(cls)

    return CentralizerDescription(
        theta, structure, classes, tuple(base_images), order, cap)


def _class_assignments(desc, cls):
    """Yield {orbit index: base image} maps for one class, in a fixed
    order: target matchings lexicographically, image choices ascending."""
    structure = desc.structure
    points_of = [set(structure.orbits[i]) for i in range(len(
        structure.orbits))]
    for targets in permutations(cls):
        choice_lists = []
        for member, target in zip(cls, targets):
            choices = sorted(
                y for y in desc.base_images[member]
                if y in points_of[target])
            choice_lists.append(choices)
        stack = [(0, {})]
        # depth-first product over the members' choice lists
        while stack:
            depth, partial = stack.pop()
            if depth == len(cls):
                yield partial
                continue
            for y in reversed(choice_lists[depth]):
                nxt = dict(partial)
                nxt[cls[depth]] = y
                stack.append((depth + 1, nxt))


def _enumerate_elements(desc):
    theta = desc.theta
    structure = desc.structure
    inverses = [p.inverse() for p in theta.perms]
    cap = desc.enum_cap
    partial = [{}]
    for cls in desc.orbit_classes:
        grown = []
        for prev in partial:
            for assignment in _class_assignments(desc, cls):
                merged = dict(prev)
                merged.update(assignment)
                grown.append(merged)
                if len(grown) >= cap:
                    break
            if len(grown) >= cap:
                break
        partial = grown
    produced = 0
    for assignment in partial:
        if produced >= cap:
            return
        img = [None] * theta.dimension
        for orbit_idx, y in assignment.items():
            mapping = _propagate(theta, structure, inverses, orbit_idx, y)
            for x, v in mapping.items():
                img[x] = v
        produced += 1
        yield Perm(tuple(img))


@dataclass(frozen=True, slots=True)
class ErgodicityCertificate:
    """Finite-stage transitivity verdict with checkable witnesses.

    A proxy diagnostic only: "transitive" states that the centralizer acts
    transitively on the points of this stage.
    """

    verdict: str                 # "transitive" | "split"
    order: int
    witnesses: tuple = ()        # centralizer elements (transitive case)
    invariant_set: frozenset = None   # proper invariant subset (split case)

    def to_dict(self):
        d = {"verdict": self.verdict, "order": str(self.order)}
        if self.verdict == "transitive":
            d["witnesses"] = [list(p.img) for p in self.witnesses]
        else:
            d["witnesses"] = [sorted(self.invariant_set)]
        return d


def _element_from_assignment(desc, inverses, assignment):
    theta = desc.theta
    img = [None] * theta.dimension
    for orbit_idx, y in assignment.items():
        mapping = _propagate(
            theta, desc.structure, inverses, orbit_idx, y)
        for x, v in mapping.items():
            img[x] = v
    return Perm(tuple(img))


def ergodicity_certificate(theta, cap=DEFAULT_ENUM_CAP,
                           structure_bound=DEFAULT_STRUCTURE_BOUND):
    """Transitive iff the centralizer acts transitively on the points.

    Decided on the orbit-matching structure; witnesses are extracted
    constructively.  Transitive: elements whose compositions move point 0
    onto every point.  Split: a proper nonempty centralizer-invariant set.
    """
    desc = centralizer_exact(theta, cap, structure_bound)
    structure = desc.structure
    inverses = [p.inverse() for p in theta.perms]
    n = theta.dimension
    base_orbit = structure.orbit_of[0]
    if len(desc.base_images[base_orbit]) == n:
        identity_part = {
            idx: structure.orbits[idx][0]
            for idx in range(len(structure.orbits))}
        witnesses = []
        own_points = set(structure.orbits[base_orbit])
        for y in desc.base_images[base_orbit]:
            if y not in own_points:
                continue
            assignment = dict(identity_part)
            assignment[base_orbit] = y
            witnesses.append(
                _element_from_assignment(desc, inverses, assignment))
        for other in range(len(structure.orbits)):
            if other == base_orbit:
                continue
            other_points = set(structure.orbits[other])
            forward = min(
                y for y in desc.base_images[base_orbit]
                if y in other_points)
            backward = min(
                y for y in desc.base_images[other] if y in own_points)
            assignment = dict(identity_part)
            assignment[base_orbit] = forward
            assignment[other] = backward
            witnesses.append(
                _element_from_assignment(desc, inverses, assignment))
        return ErgodicityCertificate(
            "transitive", desc.order, tuple(witnesses), None)

    class_of_base = next(
        cls for cls in desc.orbit_classes if base_orbit in cls)
    class_points = set()
    for idx in class_of_base:
        class_points.update(structure.orbits[idx])
    if 0 < len(class_points) < n:
        invariant = frozenset(class_points)
    else:
        invariant = frozenset(desc.base_images[base_orbit])
    return ErgodicityCertificate("split", desc.order, (), invariant)


def verify_certificate(theta, cert, enum_cap=200):
    """Exact re-check of a certificate's witnesses.

    Transitive: every witness commutes with all images and their closure
    moves 0 onto every point.  Split: the set is proper, nonempty and
    mapped onto itself by every enumerated centralizer element.
    """
    n = theta.dimension
    if cert.verdict == "transitive":
        for w in cert.witnesses:
            if any(mismatch_count(conjugate(w, p), p) for p in theta.perms):
                return False
        reached = {0}
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for w in cert.witnesses:
                y = w.img[x]
                if y not in reached:
                    reached.add(y)
                    frontier.append(y)
        return len(reached) == n
    subset = cert.invariant_set
    if not 0 < len(subset) < n:
        return False
    desc = centralizer_exact(theta, enum_cap)
    for u in desc.elements():
        if {u.img[x] for x in subset} != subset:
            return False
    return True


def comm_defect(theta, sigma):
    """max over generators g of hs_dist_sq(sigma g sigma^-1, g)."""
    return max(
        hs_dist_sq(conjugate(sigma, p), p) for p in theta.perms)


def approx_commutant_search(theta, eps=Fraction(0), seed=0, budget=20,
                            steps=None):
    """Stochastic local search for almost-commuting permutations.

    budget counts restarts; every visited state with defect <= eps is
    collected.  Deterministic per seed.  Returns deduplicated (sigma,
    defect) pairs sorted by defect then one-line form.
    """
    eps = Fraction(eps)
    if eps < 0:
        raise PreconditionError("tolerance must be >= 0")
    n = theta.dimension
    if steps is None:
        steps = 40 * n
    images = [p.img for p in theta.perms]

    def defect_count(sigma):
        worst = 0
        for img in images:
            bad = sum(
                1 for x in range(n) if sigma[img[x]] != img[sigma[x]])
            if bad > worst:
                worst = bad
        return worst

    threshold = eps * n / 2   # counts satisfying 2*count/n <= eps
    found = {}
    for restart in range(budget):
        rng = Random(split_seed(seed, "commutant", restart))
        if restart == 0:
            sigma = list(range(n))
        else:
            sigma = list(Perm.random(n, rng).img)
        current = defect_count(sigma)
        if current <= threshold:
            found.setdefault(tuple(sigma), current)
        for _ in range(steps):
            a = rng.randrange(n)
            b = rng.randrange(n)
            if a == b:
                continue
            sigma[a], sigma[b] = sigma[b], sigma[a]
            cand = defect_count(sigma)
            if cand <= current:
                current = cand
                if current <= threshold:
                    found.setdefault(tuple(sigma), current)
            else:
                sigma[a], sigma[b] = sigma[b], sigma[a]
    results = []
    for img, count in found.items():
        sigma = Perm(img)
        value = Fraction(2 * count, n)
        if eps == 0:
            assert comm_defect(theta, sigma) == 0
        results.append((sigma, value))
    results.sort(key=lambda pair: (pair[1], pair[0].img))
    return results


@dataclass(frozen=True, slots=True)
class MixingResult:
    """Best overlap a centralizer element achieves between two subsets."""

    statistic: Fraction      # max |u(Y) & Z| / n over enumerated u
    min_fraction: Fraction   # min(|Y|, |Z|) / n, reported alongside
    witness: Perm            # an element achieving the maximum (or None)

    def to_dict(self):
        return {
            "statistic": format_fraction(self.statistic),
            "min_fraction": format_fraction(self.min_fraction),
            "witness": list(self.witness.img) if self.witness else None,
        }


def mixing_statistic(theta, y_set, z_set, cap=DEFAULT_ENUM_CAP,
                     structure_bound=DEFAULT_STRUCTURE_BOUND):
    """Raw mixing statistic over enumerated centralizer elements.

    No claim is made about any lower-bound function; the value is reported
    next to min(|Y|, |Z|)/n for comparison.
    """
    n = theta.dimension
    ys = frozenset(int(x) for x in y_set)
    zs = frozenset(int(x) for x in z_set)
    for s in (ys, zs):
        if any(not 0 <= x < n for x in s):
            raise PreconditionError("subset has out-of-range points")
    min_fraction = Fraction(min(len(ys), len(zs)), n)
    if not ys or not zs:
        return MixingResult(Fraction(0), min_fraction, None)
    desc = centralizer_exact(theta, cap, structure_bound)
    best = -1
    witness = None
    for u in desc.elements():
        overlap = sum(1 for x in ys if u.img[x] in zs)
        if overlap > best:
            best = overlap
            witness = u
    return MixingResult(Fraction(best, n), min_fraction, witness)
