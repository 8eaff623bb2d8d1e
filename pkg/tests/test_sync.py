"""Approximate-time stream pairing."""

import numpy as np
import pytest

from dockpilot.sync import MatchedPair, approximate_time_pair


class TestPairing:
    def test_identical_streams_zero_offset(self):
        t = [0.0, 0.1, 0.2, 0.3]
        pairs = approximate_time_pair(t, t, 0.05)
        assert len(pairs) == 4
        assert all(p.offset == 0.0 for p in pairs)
        assert [p.pose_index for p in pairs] == [0, 1, 2, 3]

    def test_nearest_within_threshold(self):
        pairs = approximate_time_pair([0.98, 1.05], [1.00], 0.05)
        assert len(pairs) == 1
        assert pairs[0].pose_time == pytest.approx(0.98)

    def test_outside_threshold_dropped(self):
        assert approximate_time_pair([0.0], [1.0], 0.05) == []

    def test_two_hundred_hz_poses_thirty_fps_images(self):
        # every image must match, offsets bounded by half the pose period
        pose_times = np.arange(0, 10, 1 / 200.0)
        image_times = np.arange(0, 9.9, 1 / 30.0)
        pairs = approximate_time_pair(pose_times, image_times, 0.005)
        assert len(pairs) == len(image_times)
        assert max(p.offset for p in pairs) <= 0.0025 + 1e-12

        # exhaustive nearest-neighbor oracle
        for p in pairs:
            best = np.abs(pose_times - p.image_time).min()
            assert p.offset == pytest.approx(best, abs=1e-12)

    def test_empty_streams(self):
        assert approximate_time_pair([], [1.0], 0.1) == []
        assert approximate_time_pair([1.0], [], 0.1) == []

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            approximate_time_pair([1.0, 0.5], [0.7], 0.1)

    def test_pose_claimed_once(self):
        # two images near one pose: the second falls back to the next pose
        pairs = approximate_time_pair([1.0, 1.2], [0.99, 1.01], 0.3)
        assert len(pairs) == 2
        assert pairs[0].pose_index != pairs[1].pose_index

    def test_offset_property(self):
        p = MatchedPair(image_time=1.0, pose_time=0.97, image_index=0, pose_index=3)
        assert p.offset == pytest.approx(0.03)
