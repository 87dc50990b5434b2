"""Exception hierarchy shared by the whole package.

The three leaf classes map onto the CLI exit codes: ParseError -> 2,
PreconditionError -> 3, BudgetError -> 4.
"""


class SoficlabError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SoficlabError):
    """A serialized artifact (JSON file, relator string, ...) is malformed."""


class PreconditionError(SoficlabError):
    """An operation was called on inputs violating its stated precondition."""


class BudgetError(SoficlabError):
    """A size cap, enumeration cap or search budget was exhausted."""
