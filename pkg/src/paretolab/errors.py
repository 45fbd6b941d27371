"""Error taxonomy shared across the package.

The CLI maps these onto exit codes (input errors -> 1, runtime/numerical
errors -> 2) and the HTTP service maps them onto status codes.
"""


class InputError(ValueError):
    """Caller passed invalid data (bad shapes, out-of-domain points, ...)."""


class NumericalError(RuntimeError):
    """A numerical routine failed beyond recovery (e.g. factorization)."""


class FitError(NumericalError):
    """Every restart of a hyperparameter search failed."""
