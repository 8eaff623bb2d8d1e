"""Deterministic planar visual-docking toolkit.

Synthetic fisheye data generation, a from-scratch convolutional relative
dock-pose estimator, and a closed-loop position-based visual-servo docking
controller for a differential-thrust surface vessel, all reproducible from
a single seed.
"""

import os as _os

# Pin BLAS threading before numpy spins up its pools, so results do not
# depend on the host's core count. DOCKPILOT_THREADS overrides.
_threads = _os.environ.get("DOCKPILOT_THREADS", "1")
for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    _os.environ.setdefault(_var, _threads)

from .se2 import (Pose2, RelativePose, apply_relative, compose, inverse,
                  normalize_angle, relative_pose)

__version__ = "0.1.0"

__all__ = [
    "Pose2", "RelativePose", "apply_relative", "compose", "inverse",
    "normalize_angle", "relative_pose", "__version__",
]
