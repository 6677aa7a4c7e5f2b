"""reflectal: reflection symmetry on arithmetic hyperbolic surfaces.

Core pipeline: exact fixed-point-set construction for the reflection
z -> -conj(z) on congruence and cocompact quotients, separation
analysis with exponential-sum counts, and numerical machinery
(restriction identities, eigenfunction solver, nodal-domain counts)
built on top of it.
"""

import os as _os

# honor the thread cap before numpy/scipy spin up their pools
_cap = _os.environ.get("REFLECTAL_THREADS")
if _cap:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                 "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _cap)
del _os, _cap

__version__ = "0.1.0"

from . import exact, geometry  # noqa: E402,F401
from . import congruence, fixedsets  # noqa: E402,F401
from . import specfun  # noqa: E402,F401
from . import vinberg  # noqa: E402,F401
from . import restriction  # noqa: E402,F401
from . import maass  # noqa: E402,F401
from . import nodal  # noqa: E402,F401
from . import svg  # noqa: E402,F401
