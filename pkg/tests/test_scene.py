"""Dock scene geometry and collision tests."""

import math

import numpy as np
import pytest

from dockpilot.scene import (DockScene, convex_polygons_intersect, hull_block_contact,
                             hull_corners, in_docking_area, make_scene, opening_polar,
                             pre_docking_pose, u_block_layout)
from dockpilot.se2 import Pose2, transform_points


class TestBlockLayout:
    def test_sixteen_blocks(self):
        assert len(u_block_layout()) == 16

    def test_no_block_enters_interior(self):
        half_in = 1.5 / 2.0
        for b in u_block_layout():
            corners = b.corners()
            # strict separation from the open interior square (dock frame)
            inside = (np.abs(corners[:, 0]) < half_in - 1e-9) & (
                np.abs(corners[:, 1]) < half_in - 1e-9)
            assert not inside.any()

    def test_blocks_stay_inside_outer_extent(self):
        half_out = 2.5 / 2.0
        for b in u_block_layout():
            corners = b.corners()
            assert (np.abs(corners) <= half_out + 1e-9).all()

    def test_opening_faces_negative_x(self):
        # no block material on the -x edge of the footprint along the interior band
        for b in u_block_layout():
            corners = b.corners()
            in_band = np.abs(corners[:, 1]) < 1.5 / 2.0 - 1e-9
            assert not (in_band & (corners[:, 0] < -1.5 / 2.0)).any()

    def test_blocks_do_not_overlap_each_other(self):
        blocks = [b.corners() for b in u_block_layout()]
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                shrunk_i = blocks[i].mean(axis=0) + 0.99 * (blocks[i] - blocks[i].mean(axis=0))
                assert not convex_polygons_intersect(shrunk_i, blocks[j])


class TestMakeScene:
    def test_invariants_enforced(self):
        scene = make_scene(Pose2(3, -1, 0.7))
        assert scene.docking_area < scene.outer_extent
        assert len(scene.blocks) == 16

    def test_world_corners_follow_dock_pose(self):
        pose = Pose2(2, 1, math.pi / 2)
        scene = make_scene(pose)
        local = scene.blocks[0].corners()
        np.testing.assert_allclose(scene.block_corners_world()[0],
                                   transform_points(pose, local), atol=1e-12)


class TestPolygonIntersection:
    def test_disjoint_squares(self):
        a = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
        b = a + [2.0, 0.0]
        assert not convex_polygons_intersect(a, b)

    def test_overlapping_squares(self):
        a = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
        b = a + [0.5, 0.5]
        assert convex_polygons_intersect(a, b)

    def test_rotated_near_miss(self):
        a = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
        diamond = np.array([[2.1, 0.5], [2.6, 1.0], [2.1, 1.5], [1.6, 1.0]])
        assert not convex_polygons_intersect(a, diamond)


class TestHullContact:
    def test_clear_water(self):
        scene = make_scene(Pose2(0, 0, 0))
        assert not hull_block_contact(scene, Pose2(-4, 0, 0))

    def test_docked_pose_is_contact_free(self):
        scene = make_scene(Pose2(0, 0, 0))
        assert not hull_block_contact(scene, Pose2(0, 0, 0))

    def test_ramming_the_closed_end(self):
        scene = make_scene(Pose2(0, 0, 0))
        assert hull_block_contact(scene, Pose2(1.0, 0, 0))

    def test_sideswiping_an_arm(self):
        scene = make_scene(Pose2(0, 0, 0))
        assert hull_block_contact(scene, Pose2(0, 1.0, 0))

    def test_hull_corners_shape(self):
        corners = hull_corners(Pose2(1, 1, 0.3))
        assert corners.shape == (4, 2)


class TestAreaAndPolar:
    def test_in_docking_area_center(self):
        scene = make_scene(Pose2(5, 5, 1.0))
        assert in_docking_area(scene, Pose2(5, 5, 0))

    def test_outside_docking_area(self):
        scene = make_scene(Pose2(0, 0, 0))
        assert not in_docking_area(scene, Pose2(-2, 0, 0))

    def test_opening_polar_axis(self):
        scene = make_scene(Pose2(0, 0, 0))
        r, phi = opening_polar(scene, (-3.0, 0.0))
        assert r == pytest.approx(3.0)
        assert phi == pytest.approx(0.0)

    def test_opening_polar_respects_dock_heading(self):
        scene = make_scene(Pose2(1, 1, math.pi / 2))
        # opening now faces -y in the world; a point below the dock is on-axis
        r, phi = opening_polar(scene, (1.0, -2.0))
        assert r == pytest.approx(3.0)
        assert phi == pytest.approx(0.0, abs=1e-12)

    def test_pre_docking_pose_faces_the_dock(self):
        scene = make_scene(Pose2(0, 0, 0))
        pose = pre_docking_pose(scene, 4.0, math.radians(30))
        r, phi = opening_polar(scene, (pose.x, pose.y))
        assert r == pytest.approx(4.0)
        assert phi == pytest.approx(math.radians(30))
        bearing = math.atan2(0 - pose.y, 0 - pose.x)
        assert abs(bearing - pose.theta) < 1e-9
