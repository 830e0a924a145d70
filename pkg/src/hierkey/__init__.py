"""hierkey: hierarchical access-control key management, desk scale.

Publishes per-class "secure filters" (monic polynomials over Z_p) from
which authorized predecessors derive encryption keys, supports six
assignment schemes, incremental dynamic updates, and the two classic
coefficient-comparison attacks for demonstration.  Educational
parameters only; nothing here is hardened cryptography.
"""

from .errors import HierKeyError
from .hierarchy import Hierarchy
from .modmath import Poly, poly, poly_eval, poly_from_roots
from .radixshift import RadixContext, cyclic_shift, shiftable
from .schemes import CaState, SCHEME_TAGS, derive_key, setup

__all__ = [
    "CaState",
    "HierKeyError",
    "Hierarchy",
    "Poly",
    "RadixContext",
    "SCHEME_TAGS",
    "cyclic_shift",
    "derive_key",
    "poly",
    "poly_eval",
    "poly_from_roots",
    "setup",
    "shiftable",
]

__version__ = "0.1.0"
