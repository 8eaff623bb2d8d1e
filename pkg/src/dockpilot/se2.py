"""Planar rigid-transform algebra.

Frames follow the usual convention: a ``Pose2`` named ``a_in_b`` is the pose
of frame {A} expressed in frame {B}, equivalent to the 3x3 homogeneous matrix
that maps A-frame coordinates into B-frame coordinates. Headings are always
stored normalized to [-pi, pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def normalize_angle(theta: float) -> float:
    """Wrap an angle to the half-open interval [-pi, pi).

    The result differs from the input by an exact multiple of 2*pi.
    Raises ValueError for non-finite input.
    """
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    wrapped = math.remainder(theta, TWO_PI)
    if wrapped >= math.pi:  # remainder returns (-pi, pi]; fold pi to -pi
        wrapped -= TWO_PI
    return wrapped


@dataclass(frozen=True)
class Pose2:
    """Planar rigid pose (x, y in meters, heading in radians).

    The heading is normalized on construction, so two poses representing
    the same transform compare equal field-by-field up to float rounding.
    """

    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))

    @classmethod
    def identity(cls) -> "Pose2":
        return cls(0.0, 0.0, 0.0)

    def to_matrix(self) -> np.ndarray:
        """3x3 homogeneous transform [[R, p], [0, 1]]."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array([[c, -s, self.x], [s, c, self.y], [0.0, 0.0, 1.0]])

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "Pose2":
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
        return cls(m[0, 2], m[1, 2], math.atan2(m[1, 0], m[0, 0]))

    def translation(self) -> np.ndarray:
        return np.array([self.x, self.y])


# A relative pose is structurally a Pose2; the alias marks values meaning
# "pose of the dock frame {D} expressed in the vessel base frame {B}".
RelativePose = Pose2


def compose(a: Pose2, b: Pose2) -> Pose2:
    """Chain two transforms: returns the pose equal to matrix(a) @ matrix(b)."""
    c, s = math.cos(a.theta), math.sin(a.theta)
    return Pose2(
        a.x + c * b.x - s * b.y,
        a.y + s * b.x + c * b.y,
        a.theta + b.theta,
    )


def inverse(a: Pose2) -> Pose2:
    """Inverse transform: compose(a, inverse(a)) is the identity."""
    c, s = math.cos(a.theta), math.sin(a.theta)
    return Pose2(-(c * a.x + s * a.y), s * a.x - c * a.y, -a.theta)


def relative_pose(base_in_world: Pose2, dock_in_world: Pose2) -> RelativePose:
    """Pose of the dock frame expressed in the base frame.

    This is the auto-label: inverse(world pose of the base) chained with the
    world pose of the dock.
    """
    return compose(inverse(base_in_world), dock_in_world)


def apply_relative(base_in_world: Pose2, delta: RelativePose) -> Pose2:
    """World pose of the frame sitting at ``delta`` relative to the base.

    Inverse operation of relative_pose: feeding a predicted dock offset gives
    the world-frame dock pose the vessel should move to.
    """
    return compose(base_in_world, delta)


def heading_error(a: Pose2, b: Pose2) -> float:
    """Smallest signed angle taking heading of ``a`` onto heading of ``b``."""
    return normalize_angle(b.theta - a.theta)


def planar_distance(a: Pose2, b: Pose2) -> float:
    return math.hypot(b.x - a.x, b.y - a.y)


def transform_point(pose: Pose2, point_xy) -> np.ndarray:
    """Map a point from the pose's local frame into its parent frame."""
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    p = np.asarray(point_xy, dtype=float)
    return np.array([pose.x + c * p[0] - s * p[1], pose.y + s * p[0] + c * p[1]])


def transform_points(pose: Pose2, points_xy: np.ndarray) -> np.ndarray:
    """Vectorized transform_point for an (N, 2) array."""
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    pts = np.asarray(points_xy, dtype=float)
    out = np.empty_like(pts)
    out[:, 0] = pose.x + c * pts[:, 0] - s * pts[:, 1]
    out[:, 1] = pose.y + s * pts[:, 0] + c * pts[:, 1]
    return out
