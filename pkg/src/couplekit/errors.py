"""Error types with machine-readable codes (the CLI maps codes to exit status)."""


class CoupleKitError(Exception):
    code = "error"


class HypothesisError(CoupleKitError):
    """A construction's mathematical hypothesis failed on the given data."""

    code = "hypothesis-violation"


class UsageError(CoupleKitError):
    code = "usage"
