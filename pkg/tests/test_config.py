"""Run-config parsing, canonical dump, and hashing."""

import dataclasses

import pytest

from dockpilot.config import (RunConfig, config_hash, default_config, dump_config,
                              load_config, loads_config, with_seed)
from dockpilot.se2 import Pose2


class TestDefaults:
    def test_empty_text_gives_defaults(self):
        assert loads_config("") == default_config()

    def test_absent_keys_keep_section_defaults(self):
        cfg = loads_config("[plant]\nalpha = 0.9\n")
        assert cfg.plant.alpha == 0.9
        assert cfg.plant.beta == default_config().plant.beta

    def test_every_stage_has_a_section(self):
        text = dump_config(default_config())
        for name in ("run", "plant", "disturbance", "camera", "scene", "collect",
                     "augment", "network", "train", "controller", "dock", "evaluation"):
            assert f"[{name}]" in text


class TestRoundTrip:
    def test_dump_reload_dump_is_byte_identical(self):
        text = dump_config(default_config())
        again = dump_config(loads_config(text))
        assert again == text

    def test_overridden_run_survives_round_trip(self):
        src = "\n".join([
            "[run]", "seed = 11",
            "[plant]", "alpha = 0.7", "max_thrust = 1.5",
            "[camera]", "width = 424", "height = 400", "mount_x = 0.5",
            "[scene]", "block_height = 0.31", "water_brightness = 70",
            "[collect]", "scenes = 2", "samples_per_scene = 5",
            "[augment]", "copies = 2", "gaussian_noise_std = 4.0",
            "[network]", "input_side = 32", "conv_channels = [4, 8]",
            "[train]", "epochs = 3", "train_fraction = 0.75",
            "[controller]", "distance_kp = 0.5", "switch_radius = 1.25",
            "[dock]", "trials = 3", "timeout_s = 60.0",
            "[disturbance]", "enabled = false", "wind_force_std = 0.1",
        ])
        cfg = loads_config(src)
        assert cfg.seed == 11
        assert cfg.plant.alpha == 0.7
        assert cfg.camera.width == 424
        assert cfg.camera.mount.x == 0.5
        assert cfg.scene.block_height == 0.31
        assert cfg.collect.scenes == 2
        assert cfg.augment_copies == 2
        assert cfg.network.conv_channels == (4, 8)
        assert cfg.train.epochs == 3
        assert cfg.train_fraction == 0.75
        assert cfg.controller.distance.kp == 0.5
        assert cfg.controller.switch_radius == 1.25
        assert cfg.dock_trials == 3
        assert cfg.dock.timeout_s == 60.0
        assert cfg.disturbance_enabled is False
        assert loads_config(dump_config(cfg)) == cfg

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text(dump_config(default_config(seed=5)))
        assert load_config(path) == default_config(seed=5)


class TestSeedReflow:
    def test_run_seed_reaches_every_seeded_stage(self):
        cfg = loads_config("[run]\nseed = 7\n")
        assert cfg.seed == 7
        assert cfg.train.seed == 7
        assert cfg.augment.seed == 7
        assert cfg.disturbance.seed == 7

    def test_with_seed_matches_parse(self):
        assert with_seed(default_config(), 9) == loads_config("[run]\nseed = 9\n")


class TestRejection:
    def test_unknown_section(self):
        with pytest.raises(ValueError, match="unknown key"):
            loads_config("[thrusters]\nkp = 1.0\n")

    def test_unknown_key_in_section(self):
        with pytest.raises(ValueError, match="unknown key"):
            loads_config("[plant]\ndrag = 2.0\n")

    def test_unknown_controller_key(self):
        with pytest.raises(ValueError, match="unknown key"):
            loads_config("[controller]\ndistance_kp2 = 1.0\n")

    def test_bare_top_level_value(self):
        with pytest.raises(ValueError):
            loads_config("seed = 3\n")

    def test_bool_where_number_expected(self):
        with pytest.raises(ValueError, match="must be a number"):
            loads_config("[plant]\nalpha = true\n")

    def test_float_where_integer_expected(self):
        with pytest.raises(ValueError, match="must be an integer"):
            loads_config("[collect]\nscenes = 2.5\n")

    def test_pwm_bounds_cross_validated(self):
        with pytest.raises(ValueError, match="pwm_min"):
            loads_config("[controller]\npwm_min = 1.0\npwm_max = -1.0\n")

    def test_train_fraction_bounds(self):
        with pytest.raises(ValueError, match="train_fraction"):
            loads_config("[train]\ntrain_fraction = 1.5\n")

    def test_slow_control_rate_rejected(self):
        # the plant integrator caps steps at 0.1 s
        with pytest.raises(ValueError, match="control rate"):
            loads_config("[collect]\ncontrol_rate_hz = 5.0\n")


class TestHash:
    def test_identical_configs_share_a_hash(self):
        assert config_hash(default_config()) == config_hash(loads_config(""))

    def test_any_field_change_renames_the_run(self):
        base = config_hash(default_config())
        assert config_hash(loads_config("[plant]\nalpha = 0.81\n")) != base
        assert config_hash(loads_config("[run]\nseed = 1\n")) != base

    def test_hash_is_hex_sha256(self):
        digest = config_hash(default_config())
        assert len(digest) == 64
        int(digest, 16)


class TestSceneBuild:
    def test_scene_knobs_reach_built_scene(self):
        cfg = loads_config("[scene]\nblock_height = 0.4\nblock_brightness = 200\n")
        scene = cfg.scene.build(Pose2(1.0, 0.0, 0.2))
        assert scene.block_height == 0.4
        assert scene.block_brightness == 200
        assert scene.dock_pose == Pose2(1.0, 0.0, 0.2)

    def test_config_is_immutable(self):
        cfg = default_config()
        with pytest.raises(dataclasses.FrozenInstanceError):
            cfg.seed = 3
