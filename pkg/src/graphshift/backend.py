"""Kernel backend selection.

The loop-bound kernels (walk stepping, window pair emission) exist twice:
a numba @njit version and a pure-numpy vectorized version. Both consume the
same precomputed random table, so their outputs are bit-identical; the choice
only affects speed. Selection order: explicit argument > GRAPHSHIFT_BACKEND
env var > "auto" (numba when importable, numpy otherwise).
"""
import os

from .errors import ConfigError

try:
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

ENV_VAR = "GRAPHSHIFT_BACKEND"
_VALID = ("auto", "numba", "numpy")


def resolve(name=None):
    """Return 'numba' or 'numpy'. Reads the env var at call time."""
    if name is None:
        name = os.environ.get(ENV_VAR, "auto")
    name = name.lower()
    if name not in _VALID:
        raise ConfigError(f"unknown backend {name!r}, expected one of {_VALID}")
    if name == "auto":
        return "numba" if HAVE_NUMBA else "numpy"
    if name == "numba" and not HAVE_NUMBA:
        raise ConfigError("backend 'numba' requested but numba is not importable")
    return name
