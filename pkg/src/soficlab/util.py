"""Small shared helpers: deterministic seed splitting, rational formatting,
union-find.
"""

import hashlib
from fractions import Fraction

from .errors import ParseError


def split_seed(seed, *path):
    """Derive a child seed from a root seed and a label path.

    Deterministic across processes and platforms, so concurrent sub-searches
    started from the same config always see the same randomness regardless of
    scheduling order.
    """
    text = repr((int(seed),) + tuple(path))
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def format_fraction(x):
    """Render a rational as "p/q" in lowest terms (q always present)."""
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def parse_fraction(text):
    """Inverse of format_fraction; also accepts a bare integer string."""
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"invalid rational {text!r}") from exc


class UnionFind:
    """Disjoint sets over 0..n-1 with path compression."""

    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx

    def classes(self):
        """Partition as a tuple of sorted tuples, ordered by least element."""
        groups = {}
        for x in range(len(self.parent)):
            groups.setdefault(self.find(x), []).append(x)
        return tuple(tuple(sorted(g)) for _, g in sorted(groups.items()))
