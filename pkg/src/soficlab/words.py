"""Reduced words over a finite generating set, and their enumeration.

A letter is a pair (generator index, sign) with sign +1 or -1.  Words are
kept freely reduced at all times.  The enumeration order is length-lex: by
length first, then lexicographically with symbol order
(g0, +1) < (g0, -1) < (g1, +1) < (g1, -1) < ...
"""

from dataclasses import dataclass

from .errors import ParseError, PreconditionError


@dataclass(frozen=True, slots=True)
class Word:
    """A freely reduced sequence of signed generator letters."""

    letters: tuple

    def __post_init__(self):
        letters = tuple((int(g), int(s)) for g, s in self.letters)
        object.__setattr__(self, "letters", letters)
        for g, s in letters:
            if g < 0:
                raise ValueError(f"negative generator index {g}")
            if s not in (1, -1):
                raise ValueError(f"sign must be +-1, got {s}")
        for (g1, s1), (g2, s2) in zip(letters, letters[1:]):
            if g1 == g2 and s1 == -s2:
                raise ValueError("word is not freely reduced")

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other):
        return free_reduce(self.letters + other.letters)

    def inverse(self):
        return Word(tuple((g, -s) for g, s in reversed(self.letters)))

    @classmethod
    def empty(cls):
        return cls(())


def free_reduce(raw_letters):
    """Cancel adjacent inverse pairs until none remain; idempotent."""
    stack = []
    for g, s in raw_letters:
        g, s = int(g), int(s)
        if s not in (1, -1):
            raise PreconditionError(f"sign must be +-1, got {s}")
        if stack and stack[-1] == (g, -s):
            stack.pop()
        else:
            stack.append((g, s))
    return Word(tuple(stack))


@dataclass(frozen=True, slots=True)
class Presentation:
    """Ordered generator names plus a list of relator words."""

    generators: tuple
    relators: tuple = ()

    def __post_init__(self):
        gens = tuple(str(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relators", tuple(self.relators))
        if len(set(gens)) != len(gens):
            raise ValueError("generator names must be distinct")
        if any(not g for g in gens):
            raise ValueError("generator names must be nonempty")
        for w in self.relators:
            for g, _ in w.letters:
                if g >= len(gens):
                    raise ValueError(
                        f"relator uses undeclared generator index {g}")


def word_from_string(text, generators):
    """Parse a compact word string where an uppercase letter is the inverse
    of the lowercase-named generator.  Requires every generator name to be a
    single lowercase letter.  The result is freely reduced.
    """
    index = {}
    for i, name in enumerate(generators):
        if len(name) != 1 or not name.islower():
            raise ParseError(
                f"compact word syntax needs single lowercase generator "
                f"names, got {name!r}")
        index[name] = i
    letters = []
    for ch in text:
        if ch in index:
            letters.append((index[ch], 1))
        elif ch.lower() in index:
            letters.append((index[ch.lower()], -1))
        else:
            raise ParseError(f"unknown generator symbol {ch!r}")
    return free_reduce(letters)


def word_to_string(word, generators):
    """Inverse of word_from_string (single-letter names only)."""
    for name in generators:
        if len(name) != 1 or not name.islower():
            raise ParseError(
                f"compact word syntax needs single lowercase generator "
                f"names, got {name!r}")
    return "".join(
        generators[g] if s == 1 else generators[g].upper()
        for g, s in word.letters)


def word_tokens(word, generators):
    """Word as a list of tokens "name" / "name^-1"; works for any names."""
    return [
        generators[g] if s == 1 else generators[g] + "^-1"
        for g, s in word.letters]


def enumerate_words(generators, max_len):
    """All freely reduced nonempty words of length <= max_len, length-lex.

    Within one length, words are ordered lexicographically by the symbol
    order (gen 0, +1), (gen 0, -1), (gen 1, +1), ...  Deterministic.
    """
    if max_len < 0:
        raise PreconditionError("max_len must be >= 0")
    symbols = []
    for g in range(len(generators)):
        symbols.append((g, 1))
        symbols.append((g, -1))
    out = []
    level = [()]
    for _ in range(max_len):
        nxt = []
        for prefix in level:
            for g, s in symbols:
                if prefix and prefix[-1] == (g, -s):
                    continue
                nxt.append(prefix + ((g, s),))
        out.extend(nxt)
        level = nxt
    return [Word(w) for w in out]
