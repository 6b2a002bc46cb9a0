"""hsikit: hyperspectral composite-degradation synthesis and frequency-adaptive
restoration.

The heavy lifting lives in the _hsikit extension module; this package just
re-exports it.
"""

try:
    from ._hsikit import *  # noqa: F401,F403  (installed layout)
    from ._hsikit import __doc__ as _doc
except ImportError:
    from _hsikit import *  # noqa: F401,F403  (build-tree layout)
    from _hsikit import __doc__ as _doc

__doc__ = _doc
__version__ = "0.1.0"
