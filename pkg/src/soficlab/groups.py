"""Finite stages of sofic approximations and the constructions that
produce them.

A SoficApprox is a dimension plus one permutation per named generator; it
is the finite stage of a representation into a product of permutation
groups.  Trace profiles quantify how close the stage is to being
fixed-point free on nontrivial words, relator defects quantify how badly
the relations fail.  Finite quotients enter as explicit Cayley tables and
give regular and coset actions.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError, PreconditionError
from .perm import Perm, conjugate, fixed_fraction, hs_dist_sq
from .words import (Presentation, Word, word_from_string, word_to_string)


@dataclass(frozen=True, slots=True)
class SoficApprox:
    """Named generator images of one common dimension, with optional
    relators attached.  relators=None means no presentation is carried;
    relators=() means an explicitly relator-free presentation."""

    generators: tuple
    perms: tuple
    relators: tuple = None

    def __post_init__(self):
        gens = tuple(str(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "perms", tuple(self.perms))
        if self.relators is not None:
            object.__setattr__(self, "relators", tuple(self.relators))
        if len(set(gens)) != len(gens):
            raise ValueError("generator names must be distinct")
        if len(gens) != len(self.perms):
            raise ValueError("one image per generator required")
        dims = {p.n for p in self.perms}
        if len(dims) > 1:
            raise ValueError(f"images have mixed dimensions {sorted(dims)}")
        if self.relators is not None:
            Presentation(gens, self.relators)  # index-range validation

    @property
    def dimension(self):
        if not self.perms:
            raise ValueError("approximation with no generators has no "
                             "intrinsic dimension")
        return self.perms[0].n

    @property
    def presentation(self):
        if self.relators is None:
            return None
        return Presentation(self.generators, self.relators)

    def image(self, name):
        try:
            return self.perms[self.generators.index(name)]
        except ValueError:
            raise PreconditionError(f"unknown generator {name!r}") from None

    def with_relators(self, relators):
        return SoficApprox(self.generators, self.perms, tuple(relators))


def evaluate_word(theta, word):
    """Image of a word: the product of generator images and inverses in
    word order, so evaluate(w1 * w2) = evaluate(w1) * evaluate(w2)."""
    n = theta.dimension
    acc = Perm.identity(n)
    for g, s in word.letters:
        if g >= len(theta.generators):
            raise PreconditionError(
                f"word uses generator index {g}, approximation has "
                f"{len(theta.generators)}")
        p = theta.perms[g]
        acc = acc * (p if s == 1 else p.inverse())
    return acc


def word_images(theta, max_len):
    """Yield (word, image) for every enumerated word of length <= max_len,
    in enumeration order, sharing prefix products across the word tree."""
    symbols = []
    for g in range(len(theta.generators)):
        p = theta.perms[g]
        symbols.append(((g, 1), p))
        symbols.append(((g, -1), p.inverse()))
    level = [((), Perm.identity(theta.dimension))] if symbols else []
    for _ in range(max_len):
        nxt = []
        for prefix, acc in level:
            for letter, p in symbols:
                if prefix and prefix[-1] == (letter[0], -letter[1]):
                    continue
                nxt.append((prefix + (letter,), acc * p))
        for letters, image in nxt:
            yield Word(letters), image
        level = nxt


@dataclass(frozen=True, slots=True)
class TraceProfile:
    """Fixed-point fractions of all enumerated words plus their maximum."""

    entries: tuple      # ((Word, Fraction), ...) in enumeration order
    score: Fraction     # max over nontrivial words; 0 is ideal

    def value(self, word):
        for w, v in self.entries:
            if w == word:
                return v
        raise KeyError(word)


def trace_profile(theta, max_len):
    """Fixed-point fraction of every reduced word of length <= max_len."""
    if max_len < 1:
        raise PreconditionError("max_len must be >= 1")
    entries = tuple(
        (w, fixed_fraction(p)) for w, p in word_images(theta, max_len))
    score = max((v for _, v in entries), default=Fraction(0))
    return TraceProfile(entries, score)


def relator_defect(theta):
    """Max over relators of hs_dist_sq(image, identity); 0 iff all relators
    hold exactly.  Requires a presentation to be attached."""
    if theta.relators is None:
        raise PreconditionError("approximation carries no presentation")
    ident = Perm.identity(theta.dimension)
    return max(
        (hs_dist_sq(evaluate_word(theta, rel), ident)
         for rel in theta.relators),
        default=Fraction(0))


def soficity_score(theta, max_len):
    return trace_profile(theta, max_len).score


def conjugate_approx(theta, sigma):
    """Apply sigma * image * sigma^-1 to every generator image."""
    return SoficApprox(
        theta.generators,
        tuple(conjugate(sigma, p) for p in theta.perms),
        theta.relators)


def cyclic_shift_approx(n):
    """One generator mapped to the n-cycle [1, 2, ..., n-1, 0]."""
    if n < 1:
        raise PreconditionError("dimension must be >= 1")
    shift = Perm(tuple((x + 1) % n for x in range(n)))
    return SoficApprox(("a",), (shift,), relators=())


# ---------------------------------------------------------------------------
# Cayley tables and the actions they induce


@dataclass(frozen=True, slots=True)
class CayleyTable:
    """Explicit multiplication table of a finite group.

    table[a][b] is the index of a*b; rows and columns are permutations,
    the identity index behaves neutrally and associativity holds.
    """

    table: tuple
    identity: int

    def __post_init__(self):
        table = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", table)
        m = len(table)
        if m == 0:
            raise ValueError("table must be nonempty")
        full = list(range(m))
        for row in table:
            if sorted(row) != full:
                raise ValueError("a row is not a permutation of 0..m-1")
        for j in range(m):
            if sorted(row[j] for row in table) != full:
                raise ValueError("a column is not a permutation of 0..m-1")
        e = self.identity
        if not (0 <= e < m):
            raise ValueError("identity index out of range")
        for x in range(m):
            if table[e][x] != x or table[x][e] != x:
                raise ValueError("identity element is not neutral")
        for a in range(m):
            for b in range(m):
                ab = table[a][b]
                for c in range(m):
                    if table[ab][c] != table[a][table[b][c]]:
                        raise ValueError(
                            f"associativity fails at ({a},{b},{c})")

    @property
    def order(self):
        return len(self.table)

    def mult(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        for b in range(self.order):
            if self.table[a][b] == self.identity:
                return b
        raise ValueError(f"element {a} has no inverse")  # unreachable


def _element_names(order):
    return tuple(f"g{i}" for i in range(order))


def regular_action(table, side="left"):
    """Left: g acts by x -> g*x.  Right: g acts by x -> x*g^-1 (so it is a
    homomorphism, and it commutes with the left action elementwise)."""
    m = table.order
    perms = []
    if side == "left":
        for g in range(m):
            perms.append(Perm(tuple(table.mult(g, x) for x in range(m))))
    elif side == "right":
        for g in range(m):
            ginv = table.inv(g)
            perms.append(Perm(tuple(table.mult(x, ginv) for x in range(m))))
    else:
        raise PreconditionError(f"side must be left or right, got {side!r}")
    return SoficApprox(_element_names(m), tuple(perms), relators=())


def check_subgroup(table, subset):
    """Raise PreconditionError unless subset is a subgroup of table."""
    sub = set(int(x) for x in subset)
    m = table.order
    for h in sub:
        if not (0 <= h < m):
            raise PreconditionError(f"subgroup index {h} out of range")
    if table.identity not in sub:
        raise PreconditionError("subset does not contain the identity")
    for a in sub:
        if table.inv(a) not in sub:
            raise PreconditionError(
                f"subset not closed under inverse at element {a}")
        for b in sub:
            if table.mult(a, b) not in sub:
                raise PreconditionError(
                    f"subset not closed under product at ({a},{b})")
    return sub


def coset_action(table, subgroup):
    """Left action of the group on the left cosets of a subgroup.

    Cosets are indexed in first-appearance order of their minimal
    representative; with the trivial subgroup this equals the left regular
    action.
    """
    sub = check_subgroup(table, subgroup)
    m = table.order
    coset_of = [None] * m
    reps = []
    for x in range(m):
        if coset_of[x] is None:
            idx = len(reps)
            reps.append(x)
            for h in sub:
                coset_of[table.mult(x, h)] = idx
    k = len(reps)
    perms = []
    for g in range(m):
        perms.append(Perm(tuple(
            coset_of[table.mult(g, reps[i])] for i in range(k))))
    return SoficApprox(_element_names(m), tuple(perms), relators=())


# ---------------------------------------------------------------------------
# Stock tables used by tests, docs and the CLI


def cyclic_table(n):
    if n < 1:
        raise PreconditionError("order must be >= 1")
    return CayleyTable(
        tuple(tuple((a + b) % n for b in range(n)) for a in range(n)), 0)


def dihedral_table(m):
    """Dihedral group of order 2m: indices 0..m-1 are rotations r^i,
    indices m..2m-1 are reflections s*r^i."""
    if m < 1:
        raise PreconditionError("rotation order must be >= 1")

    def mult(a, b):
        flip_a, i = divmod(a, m)
        flip_b, j = divmod(b, m)
        if flip_a == 0 and flip_b == 0:
            return (i + j) % m
        if flip_a == 0:
            return m + (j - i) % m       # r^i * s r^j = s r^(j-i)
        if flip_b == 0:
            return m + (i + j) % m       # s r^i * r^j = s r^(i+j)
        return (j - i) % m               # s r^i * s r^j = r^(j-i)

    order = 2 * m
    return CayleyTable(
        tuple(tuple(mult(a, b) for b in range(order)) for a in range(order)),
        0)


def quaternion_table():
    """The quaternion group of order 8: 1, -1, i, -i, j, -j, k, -k."""
    unit_mult = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"),
        ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("j", "1"): (1, "j"), ("k", "1"): (1, "k"),
        ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
        ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
        ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j"),
    }
    elements = [(1, "1"), (-1, "1"), (1, "i"), (-1, "i"),
                (1, "j"), (-1, "j"), (1, "k"), (-1, "k")]
    index = {e: i for i, e in enumerate(elements)}

    def mult(a, b):
        sa, ua = elements[a]
        sb, ub = elements[b]
        sc, uc = unit_mult[(ua, ub)]
        return index[(sa * sb * sc, uc)]

    return CayleyTable(
        tuple(tuple(mult(a, b) for b in range(8)) for a in range(8)), 0)


def product_table(t1, t2):
    """Direct product; element (a, b) has index a * order(t2) + b."""
    m1, m2 = t1.order, t2.order

    def mult(x, y):
        a1, b1 = divmod(x, m2)
        a2, b2 = divmod(y, m2)
        return t1.mult(a1, a2) * m2 + t2.mult(b1, b2)

    order = m1 * m2
    return CayleyTable(
        tuple(tuple(mult(x, y) for y in range(order)) for x in range(order)),
        t1.identity * m2 + t2.identity)


def klein_table():
    return product_table(cyclic_table(2), cyclic_table(2))


# ---------------------------------------------------------------------------
# JSON forms


def approx_to_dict(theta):
    d = {
        "dimension": theta.dimension,
        "generators": list(theta.generators),
        "images": {name: list(p.img)
                   for name, p in zip(theta.generators, theta.perms)},
    }
    if theta.relators is not None:
        d["relators"] = [
            word_to_string(w, theta.generators) for w in theta.relators]
    return d


def approx_from_dict(data):
    try:
        gens = tuple(str(g) for g in data["generators"])
        images = data["images"]
        if set(images) != set(gens):
            raise ParseError("images do not match the generator list")
        perms = tuple(Perm(tuple(images[g])) for g in gens)
        relators = None
        if "relators" in data:
            relators = tuple(
                word_from_string(s, gens) for s in data["relators"])
        theta = SoficApprox(gens, perms, relators)
        if "dimension" in data and int(data["dimension"]) != theta.dimension:
            raise ParseError("declared dimension does not match the images")
        return theta
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed approximation: {exc}") from exc


def table_to_dict(table):
    return {
        "order": table.order,
        "identity": table.identity,
        "table": [list(row) for row in table.table],
    }


def table_from_dict(data):
    try:
        table = CayleyTable(
            tuple(tuple(row) for row in data["table"]),
            int(data["identity"]))
        if "order" in data and int(data["order"]) != table.order:
            raise ParseError("declared order does not match the table")
        return table
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed Cayley table: {exc}") from exc
