"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: ConfigError/UsageError -> 1,
DataError (and subclasses) -> 2, NumericalError -> 3.
"""


class ConfigError(ValueError):
    """Bad configuration value or incompatible option combination."""


class UsageError(ConfigError):
    """Malformed command line."""


class DataError(ValueError):
    """Malformed or inconsistent input data (parse/index/value errors)."""


class StaleCacheError(DataError):
    """A cached matrix does not match the current graph/walk configuration."""


class DegenerateInputError(DataError):
    """Structurally valid input on which the operation is undefined (e.g. all-zero counts)."""


class DimensionError(ValueError):
    """Shape mismatch between operands."""


class NumericalError(RuntimeError):
    """Non-finite values encountered during optimization."""
