"""Exception hierarchy shared across the package."""


class IntentSenseError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(IntentSenseError):
    """Invalid pipeline configuration (unknown key, bad value, schema violation)."""


class DataError(IntentSenseError):
    """Dataset cannot be loaded or violates a structural invariant."""


class LeakageError(IntentSenseError):
    """A fitted component saw epochs that later appear in its test set."""
