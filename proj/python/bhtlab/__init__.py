"""Bilinear Hilbert transform lab.

Catalog test functions, the truncated/regularized/principal-value transforms,
the product-inversion identity, mollifier pairings, and p-Lebesgue-point
diagnostics, backed by the C++ core.
"""

try:
    from bhtlab._core import *  # noqa: F401,F403  (installed layout)
    from bhtlab import _core as _impl
except ImportError:  # development layout: _core.so on PYTHONPATH
    from _core import *  # noqa: F401,F403
    import _core as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
__version__ = "0.1.0"
