"""Two-dimensional elastodynamic boundary integral operators.

Layer operators under a generalized traction on closed curves and open arcs,
their Calderon compositions and spectra, and preconditioned scattering solves.
"""

import os as _os

# thread count for BLAS must be fixed before numpy loads
_threads = _os.environ.get("ELASTOCALD_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .material import Material, OperatorConstants, check_admissible, constants  # noqa: E402

__version__ = "0.1.0"

__all__ = ["Material", "OperatorConstants", "check_admissible", "constants", "__version__"]
