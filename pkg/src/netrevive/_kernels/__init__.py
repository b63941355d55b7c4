"""Integrator kernel selection.

Two interchangeable implementations of rk4_csr live here: a Cython
extension (_rk4c) and a numpy/scipy fallback (_numpy_backend). The
extension wins when it imported cleanly; NETREVIVE_BACKEND=c or =numpy
forces the choice, with =c failing loudly if the build is missing.
"""
import os

from ..errors import ConfigError

GENE_FAMILY = 0
MUTUALISM_FAMILY = 1
_FAMILY_IDS = {"gene": GENE_FAMILY, "mutualism": MUTUALISM_FAMILY}

_choice = os.environ.get("NETREVIVE_BACKEND", "auto").strip().lower() or "auto"
if _choice not in ("auto", "c", "numpy"):
    raise ConfigError(
        f"NETREVIVE_BACKEND={_choice!r}; expected 'c', 'numpy', or unset")

if _choice == "numpy":
    from ._numpy_backend import rk4_csr
    BACKEND = "numpy"
else:
    try:
        from ._rk4c import rk4_csr
        BACKEND = "c"
    except ImportError:
        if _choice == "c":
            raise
        from ._numpy_backend import rk4_csr
        BACKEND = "numpy"


def family_id(spec):
    return _FAMILY_IDS[spec.family]
