"""Picks the compiled kernels when the extension is built, numpy otherwise."""
from . import _fallback

try:
    from . import _kernels as _impl

    BACKEND = "cython"
except ImportError:  # extension not built
    _impl = _fallback
    BACKEND = "numpy"

diagonal_phases = _impl.diagonal_phases
apply_diagonal = _impl.apply_diagonal
