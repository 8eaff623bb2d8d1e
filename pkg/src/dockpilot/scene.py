"""Dock scene geometry: the floating-block U, the docking area, the hull.

The dock frame {D} is the vessel's initial docked pose: its origin sits at
the center of the docking area and its +x axis points at the closed end of
the U, so the opening faces -x and an approaching vessel drives toward +x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .se2 import Pose2, compose, inverse, relative_pose, transform_points

# Vessel hull footprint (length x width, meters), base origin at the center.
HULL_LENGTH = 1.10
HULL_WIDTH = 0.78


@dataclass(frozen=True)
class Block:
    """Axis-aligned rectangle in the dock frame: center, size, height above water."""

    cx: float
    cy: float
    width: float
    depth: float
    height: float

    def corners(self) -> np.ndarray:
        """4x2 corner array (dock frame), counterclockwise."""
        hw, hd = self.width / 2.0, self.depth / 2.0
        return np.array([
            [self.cx - hw, self.cy - hd],
            [self.cx + hw, self.cy - hd],
            [self.cx + hw, self.cy + hd],
            [self.cx - hw, self.cy + hd],
        ])


@dataclass(frozen=True)
class DockScene:
    """World placement of the dock plus its rendering brightnesses."""

    dock_pose: Pose2 = Pose2()
    blocks: tuple[Block, ...] = ()
    docking_area: float = 1.5  # interior square side, meters
    outer_extent: float = 2.5  # overall square side, meters
    block_height: float = 0.24  # freeboard, kept below the camera height so floats read bright against water
    water_brightness: int = 60
    sky_brightness: int = 180
    block_brightness: int = 230

    def block_corners_world(self) -> list[np.ndarray]:
        return [transform_points(self.dock_pose, b.corners()) for b in self.blocks]


def u_block_layout(outer: float = 2.5, interior: float = 1.5,
                   height: float = 0.24, fill: float = 1.0) -> tuple[Block, ...]:
    """16 rectangular blocks forming a U with the opening toward -x.

    Two 6-block arms run the full outer length along +y and -y; a 4-block
    closed end spans the interior width at +x. No block intrudes into the
    interior docking square. fill < 1 shrinks each block inside its slot,
    leaving seams that give the silhouette a modular-float texture.
    """
    if not 0.0 < fill <= 1.0:
        raise ValueError("fill must lie in (0, 1]")
    half_in = interior / 2.0
    half_out = outer / 2.0
    arm_depth = half_out - half_in  # 0.5 m for the defaults
    blocks = []
    # arms: y in +/-[half_in, half_out], x spanning the full outer extent
    arm_len = outer / 6.0
    arm_cy = half_in + arm_depth / 2.0
    for i in range(6):
        cx = -half_out + (i + 0.5) * arm_len
        blocks.append(Block(cx, +arm_cy, arm_len * fill, arm_depth, height))
        blocks.append(Block(cx, -arm_cy, arm_len * fill, arm_depth, height))
    # closed end: x in [half_in, half_out], y spanning the interior width
    end_h = interior / 4.0
    end_cx = half_in + arm_depth / 2.0
    for j in range(4):
        cy = -half_in + (j + 0.5) * end_h
        blocks.append(Block(end_cx, cy, arm_depth, end_h * fill, height))
    return tuple(blocks)


def make_scene(dock_pose: Pose2 = Pose2(), *, docking_area: float = 1.5,
               outer_extent: float = 2.5, block_height: float = 0.24,
               block_fill: float = 1.0, water_brightness: int = 60,
               sky_brightness: int = 180, block_brightness: int = 230) -> DockScene:
    if not docking_area < outer_extent:
        raise ValueError("docking area must be strictly inside the outer extent")
    return DockScene(
        dock_pose=dock_pose,
        blocks=u_block_layout(outer_extent, docking_area, block_height, block_fill),
        docking_area=docking_area,
        outer_extent=outer_extent,
        block_height=block_height,
        water_brightness=water_brightness,
        sky_brightness=sky_brightness,
        block_brightness=block_brightness,
    )


def hull_corners(pose: Pose2, length: float = HULL_LENGTH,
                 width: float = HULL_WIDTH) -> np.ndarray:
    """World-frame corners of the vessel footprint at a pose."""
    hl, hw = length / 2.0, width / 2.0
    local = np.array([[-hl, -hw], [hl, -hw], [hl, hw], [-hl, hw]])
    return transform_points(pose, local)


def _project(points: np.ndarray, axis: np.ndarray) -> tuple[float, float]:
    d = points @ axis
    return float(d.min()), float(d.max())


def convex_polygons_intersect(a: np.ndarray, b: np.ndarray) -> bool:
    """Separating-axis test for two convex polygons (Nx2 corner arrays)."""
    for poly in (a, b):
        n = len(poly)
        for i in range(n):
            edge = poly[(i + 1) % n] - poly[i]
            axis = np.array([-edge[1], edge[0]])
            norm = math.hypot(axis[0], axis[1])
            if norm < 1e-12:
                continue
            axis = axis / norm
            amin, amax = _project(a, axis)
            bmin, bmax = _project(b, axis)
            if amax < bmin or bmax < amin:
                return False  # separating axis found, no overlap
    return True


def hull_block_contact(scene: DockScene, usv_pose: Pose2) -> bool:
    """True if the vessel footprint touches any dock block."""
    hull = hull_corners(usv_pose)
    for corners in scene.block_corners_world():
        if convex_polygons_intersect(hull, corners):
            return True
    return False


def in_docking_area(scene: DockScene, usv_pose: Pose2) -> bool:
    """True if the vessel base point lies inside the interior square."""
    rel = relative_pose(scene.dock_pose, usv_pose)
    half = scene.docking_area / 2.0
    return abs(rel.x) <= half and abs(rel.y) <= half


def dock_range_bearing(scene: DockScene, usv_pose: Pose2) -> tuple[float, float]:
    """Distance to the dock origin and its bearing in the vessel body frame."""
    rel = relative_pose(usv_pose, scene.dock_pose)
    return math.hypot(rel.x, rel.y), math.atan2(rel.y, rel.x)


def opening_polar(scene: DockScene, world_xy) -> tuple[float, float]:
    """(radius, angle-off-opening-axis) of a world point, dock-centered.

    The angle is measured from the -x dock axis (the opening direction), so
    points straight out in front of the opening sit at angle 0.
    """
    inv = inverse(scene.dock_pose)
    c, s = math.cos(inv.theta), math.sin(inv.theta)
    px = inv.x + c * world_xy[0] - s * world_xy[1]
    py = inv.y + s * world_xy[0] + c * world_xy[1]
    return math.hypot(px, py), math.atan2(py, -px)


def pre_docking_pose(scene: DockScene, radius: float, angle: float,
                     heading_offset: float = 0.0) -> Pose2:
    """World pose at polar (radius, angle) off the opening, facing the dock.

    angle 0 puts the vessel straight out from the opening; positive angles
    sweep counterclockwise. heading_offset rotates the vessel away from the
    exact dock-center bearing.
    """
    local = Pose2(-radius * math.cos(angle), radius * math.sin(angle), 0.0)
    spot = compose(scene.dock_pose, local)
    bearing_to_dock = math.atan2(scene.dock_pose.y - spot.y, scene.dock_pose.x - spot.x)
    return Pose2(spot.x, spot.y, bearing_to_dock + heading_offset)
