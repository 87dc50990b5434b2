"""Permutations in one-line form and their trace/metric primitives.

A permutation of {0..n-1} is stored as the tuple img with img[x] the image
of x.  Composition is (p * q)(x) = p(q(x)), i.e. right-to-left, matching
multiplication of the corresponding permutation matrices.  All measures are
exact rationals; no floating point enters any predicate here.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError


@dataclass(frozen=True, slots=True)
class Perm:
    """A bijection of {0..n-1} in one-line form."""

    img: tuple

    def __post_init__(self):
        img = self.img
        if type(img) is not tuple or any(type(x) is not int for x in img):
            img = tuple(int(x) for x in img)
        object.__setattr__(self, "img", img)
        n = len(img)
        if n == 0:
            raise ValueError("permutation must have dimension >= 1")
        seen = bytearray(n)
        for x in img:
            if not 0 <= x < n or seen[x]:
                raise ValueError(
                    "not a permutation of 0..n-1: %r" % (img,))
            seen[x] = 1

    @property
    def n(self):
        return len(self.img)

    def __call__(self, x):
        return self.img[x]

    def __mul__(self, other):
        """Composition: (self * other)(x) = self(other(x))."""
        if self.n != other.n:
            raise PreconditionError(
                f"dimension mismatch: {self.n} vs {other.n}")
        return Perm(tuple(self.img[y] for y in other.img))

    def inverse(self):
        inv = [0] * self.n
        for x, y in enumerate(self.img):
            inv[y] = x
        return Perm(tuple(inv))

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        result = Perm.identity(self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_identity(self):
        return all(i == x for i, x in enumerate(self.img))

    @classmethod
    def identity(cls, n):
        return cls(tuple(range(n)))

    @classmethod
    def random(cls, n, rng):
        lst = list(range(n))
        rng.shuffle(lst)
        return cls(tuple(lst))

    def cycles(self):
        """Cycle decomposition, fixed points included, each cycle starting
        at its least element, cycles ordered by that element."""
        seen = [False] * self.n
        out = []
        for start in range(self.n):
            if seen[start]:
                continue
            cycle = [start]
            seen[start] = True
            x = self.img[start]
            while x != start:
                seen[x] = True
                cycle.append(x)
                x = self.img[x]
            out.append(tuple(cycle))
        return tuple(out)


def fixed_count(p):
    """Number of fixed points of p."""
    return sum(1 for x, y in enumerate(p.img) if x == y)


def fixed_fraction(p):
    """Normalized trace of the permutation matrix of p: |Fix(p)| / n."""
    return Fraction(fixed_count(p), p.n)


def mismatch_count(u, v):
    """|{x : u(x) != v(x)}| for permutations of equal dimension."""
    if u.n != v.n:
        raise PreconditionError(f"dimension mismatch: {u.n} vs {v.n}")
    return sum(1 for a, b in zip(u.img, v.img) if a != b)


def hs_dist_sq(u, v):
    """Squared normalized Hilbert-Schmidt distance: 2 * mismatches / n.

    Takes values in [0, 2]; equals 2 * (1 - fixed_fraction(u^-1 * v)).
    """
    return Fraction(2 * mismatch_count(u, v), u.n)


def tensor(p, q):
    """Kronecker product: (p (x) q)(i*m + j) = p(i)*m + q(j).

    The left factor is the coarse index, so p (x) identity(r) keeps r
    consecutive indices per base point.
    """
    m = q.n
    img = [0] * (p.n * m)
    for i, pi in enumerate(p.img):
        base_src = i * m
        base_dst = pi * m
        for j, qj in enumerate(q.img):
            img[base_src + j] = base_dst + qj
    return Perm(tuple(img))


def direct_sum(p, q):
    """Block permutation acting as p on 0..n-1 and as q shifted by n."""
    n = p.n
    return Perm(p.img + tuple(n + y for y in q.img))


def cycle_type(p):
    """Multiset of cycle lengths, as a sorted tuple summing to n."""
    return tuple(sorted(len(c) for c in p.cycles()))


def conjugate(sigma, p):
    """sigma * p * sigma^-1."""
    if sigma.n != p.n:
        raise PreconditionError(f"dimension mismatch: {sigma.n} vs {p.n}")
    img = [0] * p.n
    for x, px in enumerate(p.img):
        img[sigma.img[x]] = sigma.img[px]
    return Perm(tuple(img))
