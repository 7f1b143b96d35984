"""DPG solver for planar linear elasticity.

Thin Python layer over the C++ core: uniform-refinement convergence tables,
Poisson-ratio locking sweeps and adaptive L-shape estimator studies, with the
same CSV table format as the command-line tool.
"""

from ._core import (
    LockingStudy,
    LshapeStudy,
    StudyRecord,
    __version__,
    convergence,
    csv,
    locking,
    lshape,
    write_csv,
)

__all__ = [
    "LockingStudy",
    "LshapeStudy",
    "StudyRecord",
    "__version__",
    "convergence",
    "csv",
    "locking",
    "lshape",
    "write_csv",
]
