"""Closed-loop docking trials with the ground-truth pose oracle."""

import math

import pytest

from dockpilot.control import ControllerConfig
from dockpilot.docking import (OraclePredictor, TRIAL_LOG_COLUMNS, TrialConfig,
                               canonical_starts, docking_trial, start_pose,
                               write_trial_log)
from dockpilot.plant import UsvParams
from dockpilot.scene import dock_range_bearing, hull_block_contact, in_docking_area, make_scene
from dockpilot.se2 import Pose2, normalize_angle
from dockpilot.util import make_rng, read_csv


def run_oracle(scene, start, mode="continuous", seed=0):
    return docking_trial(UsvParams(), scene, OraclePredictor(scene), mode,
                         ControllerConfig(), TrialConfig(), seed, start=start)


class TestCanonicalStarts:
    def test_eight_poses_within_band(self):
        scene = make_scene(Pose2(3.0, -2.0, 0.7))
        starts = canonical_starts(scene)
        assert len(starts) == 8
        for pose in starts:
            rng, bearing = dock_range_bearing(scene, pose)
            assert 2.0 - 1e-9 <= rng <= 8.0 + 1e-9
            assert abs(bearing) <= math.radians(60.0) + 1e-9
            assert not hull_block_contact(scene, pose)

    def test_start_pose_draws_are_contact_free(self):
        scene = make_scene(Pose2(0.0, 0.0, 0.0))
        cfg = TrialConfig()
        for seed in range(5):
            pose = start_pose(scene, cfg, make_rng(seed, "start"))
            rng, _ = dock_range_bearing(scene, pose)
            assert cfg.start_radius_low <= rng <= cfg.start_radius_high
            assert not hull_block_contact(scene, pose)


class TestOracleTrial:
    def test_succeeds_from_dead_ahead(self):
        scene = make_scene(Pose2(0.0, 0.0, 0.0))
        res = run_oracle(scene, Pose2(-4.0, 0.0, 0.0))
        assert res.success
        assert not res.collided
        assert in_docking_area(scene, Pose2(*res.rows[-1][1:4]))

    def test_succeeds_from_all_canonical_starts(self):
        scene = make_scene(Pose2(1.5, 0.5, -0.4))
        for start in canonical_starts(scene):
            res = run_oracle(scene, start)
            assert res.success, f"failed from {start}"

    def test_position_error_converges_below_decimeter(self):
        # asymptotic convergence of the loop, not just area entry: with the
        # goal band tightened under 0.1 m the error still gets there in time
        scene = make_scene(Pose2(0.0, 0.0, 0.0))
        ctrl = ControllerConfig(position_tolerance=0.09)
        for start in canonical_starts(scene):
            res = docking_trial(UsvParams(), scene, OraclePredictor(scene),
                                "continuous", ctrl, TrialConfig(), 0, start=start)
            assert res.success
            assert res.final_position_error < 0.1

    def test_records_full_trajectory(self):
        scene = make_scene(Pose2(0.0, 0.0, 0.0))
        res = run_oracle(scene, Pose2(-3.0, 1.0, 0.0))
        assert res.steps == len(res.rows)
        assert res.sim_time == pytest.approx(res.steps * 0.1)
        ts = [row[0] for row in res.rows]
        assert ts == sorted(ts)

    def test_heading_within_tolerance_at_finish(self):
        scene = make_scene(Pose2(2.0, -1.0, 1.1))
        res = run_oracle(scene, canonical_starts(scene)[3])
        assert res.final_heading_error <= ControllerConfig().heading_tolerance


class TestServoModes:
    def test_single_shot_predicts_once(self):
        scene = make_scene(Pose2(0.0, 0.0, 0.0))
        res = run_oracle(scene, Pose2(-5.0, 1.5, 0.2), mode="single_shot")
        assert res.predictions == 1

    def test_continuous_predicts_at_capped_rate(self):
        # 6 Hz cadence against the 10 Hz loop: exactly 6 refreshes per second
        scene = make_scene(Pose2(0.0, 0.0, 0.0))
        res = run_oracle(scene, Pose2(-6.0, -1.0, 0.0))
        whole_seconds = int(res.sim_time)
        assert res.predictions >= whole_seconds * 6 - 1
        assert res.predictions <= res.steps

    def test_rejects_unknown_mode(self):
        scene = make_scene(Pose2(0.0, 0.0, 0.0))
        with pytest.raises(ValueError):
            run_oracle(scene, Pose2(-3.0, 0.0, 0.0), mode="warp")


class TestTrialLog:
    def test_columns_and_roundtrip(self, tmp_path):
        scene = make_scene(Pose2(0.0, 0.0, 0.0))
        res = run_oracle(scene, Pose2(-3.0, 0.5, 0.0))
        path = tmp_path / "trial.csv"
        write_trial_log(path, res)
        header, rows = read_csv(path)
        assert header == list(TRIAL_LOG_COLUMNS)
        assert len(rows) == res.steps

    def test_summary_fields(self):
        scene = make_scene(Pose2(0.0, 0.0, 0.0))
        res = run_oracle(scene, Pose2(-3.0, 0.0, 0.0))
        s = res.summary()
        assert s["success"] is True
        assert s["mode"] == "continuous"
        assert s["predictions"] == res.predictions


class TestCollisionRule:
    def test_misaligned_ram_is_collision(self):
        # aim the hull straight at a side arm with a big heading error
        scene = make_scene(Pose2(0.0, 0.0, 0.0))

        class RammingPredictor:
            def predict(self, pose):
                # claim the dock sits ahead-left so the loop drives across the arm
                return Pose2(2.0, 2.2, 1.4)

        res = docking_trial(UsvParams(), scene, RammingPredictor(), "continuous",
                            ControllerConfig(), TrialConfig(), 0,
                            start=Pose2(-2.2, -2.4, 0.8))
        assert not res.success

    def test_aligned_graze_counts_as_arrival(self):
        # start already inside the slot, aligned: any block touch is contact
        scene = make_scene(Pose2(0.0, 0.0, 0.0))
        res = run_oracle(scene, Pose2(-1.1, 0.05, 0.02))
        assert not res.collided
        assert res.success
