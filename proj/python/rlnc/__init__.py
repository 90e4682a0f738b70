"""Random linear network coding toolkit.

Thin package wrapper around the compiled _rlnc extension module: RLNC
codec (standard/systematic/sparse), closed-form and Monte-Carlo decoding
analytics, erasure-channel simulators and the GRAP resource-allocation
solver.
"""

try:
    # wheel layout: extension installed inside the package
    from ._rlnc import *  # noqa: F401,F403
    from ._rlnc import __version__  # noqa: F401
except ImportError:
    # build-tree layout: extension next to the package on sys.path
    from _rlnc import *  # noqa: F401,F403
    from _rlnc import __version__  # noqa: F401
