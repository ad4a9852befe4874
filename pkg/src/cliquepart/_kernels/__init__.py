"""Hot-loop kernels.

The compiled extension ``_ckernels`` is used when it was built; otherwise
the pure-Python module is used. Set ``CLIQUEPART_PURE=1`` to force the
fallback.
"""

import os

from . import _pykernels as python

compiled = None
if os.environ.get("CLIQUEPART_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

active = compiled if compiled is not None else python
BACKEND = "cython" if compiled is not None else "python"

enumerate_chains = active.enumerate_chains
bfs_path = active.bfs_path
has_negative_in_positive_component = active.has_negative_in_positive_component
drain_negative_edges = active.drain_negative_edges
rgs_optimum = active.rgs_optimum

__all__ = [
    "BACKEND",
    "active",
    "bfs_path",
    "compiled",
    "drain_negative_edges",
    "enumerate_chains",
    "has_negative_in_positive_component",
    "python",
    "rgs_optimum",
]
