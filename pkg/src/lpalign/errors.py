"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Malformed or inconsistent input data (dimensions, empty sets, bad files)."""


class UnsupportedModeError(ValueError):
    """A requested mode is outside the method's validity range (e.g. p > 1)."""


class GridTooLargeError(ValueError):
    """A requested exhaustive grid exceeds the hard size guard."""


class BoundValidityError(ValueError):
    """A closed-form bound's validity condition fails.

    ``fallback`` names the guarantee that still applies (e.g. the
    majority-inlier requirement, or switching to the exponent-limit rule).
    """

    def __init__(self, message: str, fallback: str | None = None):
        super().__init__(message)
        self.fallback = fallback
