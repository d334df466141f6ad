"""Error types shared across the package.

DomainError marks arguments outside an operation's contract; CapacityError
marks inputs that exceed configured coverage (sieve limit, enumeration
budget, table range).  CLI maps the former to exit 2 at validation time and
everything raised during computation to exit 1.
"""


class DomainError(ValueError):
    pass


class CapacityError(RuntimeError):
    pass
