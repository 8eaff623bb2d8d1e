"""Single-file run configuration.

One TOML-style file drives every pipeline stage. Loading applies defaults,
rejects unknown sections and keys, and validates cross-field constraints.
Dumping emits canonical text that reloads to an identical run, so the
effective config can sit next to every output as its reproducibility
record; hashing that text names the run.

Keys mirror the owning dataclass fields and use their native units
(angles already expressed in degrees keep the _deg suffix; everything
else is SI). One [run] seed feeds every stage; per-stage streams are
separated by name inside the modules, never by extra config knobs.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace

try:
    import tomllib
except ModuleNotFoundError:  # 3.10 fallback
    import tomli as tomllib

from .augment import AugmentationConfig
from .camera import CameraModel
from .cnn import NetworkConfig
from .collect import CollectionConfig
from .control import ControllerConfig, PidGains
from .docking import TrialConfig
from .estimator import TrainConfig
from .plant import DisturbanceConfig, UsvParams
from .scene import DockScene, make_scene
from .se2 import Pose2


@dataclass(frozen=True)
class SceneConfig:
    """Dock geometry and render brightness knobs."""

    docking_area: float = 1.5
    outer_extent: float = 2.5
    block_height: float = 0.24
    block_fill: float = 1.0
    water_brightness: int = 60
    sky_brightness: int = 180
    block_brightness: int = 230

    def build(self, dock_pose: Pose2) -> DockScene:
        return make_scene(dock_pose, docking_area=self.docking_area,
                          outer_extent=self.outer_extent, block_height=self.block_height,
                          block_fill=self.block_fill,
                          water_brightness=self.water_brightness,
                          sky_brightness=self.sky_brightness,
                          block_brightness=self.block_brightness)


@dataclass(frozen=True)
class EvaluationConfig:
    """Data-efficiency sweep shape."""

    data_efficiency_sizes: tuple = (400, 800, 1200, 1600, 2000)
    data_efficiency_epochs: int = 12

    def __post_init__(self):
        sizes = tuple(self.data_efficiency_sizes)
        if not sizes or any(s <= 0 for s in sizes):
            raise ValueError("subset sizes must be positive")
        if list(sizes) != sorted(sizes):
            raise ValueError("subset sizes must be ascending")
        object.__setattr__(self, "data_efficiency_sizes", sizes)
        if self.data_efficiency_epochs <= 0:
            raise ValueError("epochs must be positive")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    plant: UsvParams = UsvParams()
    disturbance: DisturbanceConfig = DisturbanceConfig()
    disturbance_enabled: bool = True
    camera: CameraModel = CameraModel()
    scene: SceneConfig = SceneConfig()
    collect: CollectionConfig = CollectionConfig()
    augment: AugmentationConfig = AugmentationConfig()
    augment_copies: int = 1
    network: NetworkConfig = NetworkConfig()
    train: TrainConfig = TrainConfig()
    train_fraction: float = 0.8
    controller: ControllerConfig = ControllerConfig()
    dock: TrialConfig = TrialConfig()
    dock_trials: int = 20
    evaluation: EvaluationConfig = EvaluationConfig()

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")
        if self.augment_copies < 0:
            raise ValueError("augment_copies must be >= 0")
        if self.dock_trials < 0:
            raise ValueError("dock_trials must be >= 0")
        # the plant integrator caps its step at 0.1 s
        for rate in (self.collect.control_rate_hz, self.controller.control_rate_hz):
            if 1.0 / rate > 0.1 + 1e-12:
                raise ValueError("control rate must be at least 10 Hz")


def with_seed(cfg: RunConfig, seed: int) -> RunConfig:
    """Reflow the run seed into every stage that stores one."""
    return replace(cfg, seed=seed,
                   disturbance=replace(cfg.disturbance, seed=seed),
                   augment=replace(cfg.augment, seed=seed),
                   train=replace(cfg.train, seed=seed))


def default_config(seed: int = 0) -> RunConfig:
    return with_seed(RunConfig(), seed)


_PID_LOOPS = ("distance", "bearing", "heading", "surge", "yaw")
_PID_FIELDS = ("kp", "ki", "kd", "integral_limit", "output_limit")
_CONTROLLER_SCALARS = ("alpha", "beta", "pwm_min", "pwm_max", "control_rate_hz",
                       "predict_rate_hz", "position_tolerance", "heading_tolerance",
                       "switch_radius")
_CAMERA_KEYS = ("width", "height", "diagonal_fov_deg", "mount_x", "mount_y",
                "mount_yaw", "height_above_water")


def _check_keys(section: str, given, allowed) -> None:
    unknown = sorted(set(given) - set(allowed))
    if unknown:
        raise ValueError(f"unknown key(s) in [{section}]: {', '.join(unknown)}")


def _coerce(section: str, key: str, value, kind):
    where = f"[{section}] {key}"
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"{where} must be a number")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"{where} must be an integer")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise ValueError(f"{where} must be true or false")
        return value
    if kind is tuple:
        if not isinstance(value, list) or any(isinstance(v, bool) or not isinstance(v, int)
                                              for v in value):
            raise ValueError(f"{where} must be a list of integers")
        return tuple(value)
    raise TypeError(f"unhandled config kind for {where}")


def _fill(section: str, table: dict, default_obj, skip: tuple = ()):
    """Generic section: keys mirror the dataclass fields."""
    kinds = {f.name: type(getattr(default_obj, f.name))
             for f in fields(default_obj) if f.name not in skip}
    _check_keys(section, table, kinds)
    updates = {k: _coerce(section, k, v, kinds[k]) for k, v in table.items()}
    return replace(default_obj, **updates) if updates else default_obj


def _split_extra(section: str, table: dict, extra_keys: tuple) -> dict:
    return {k: table.pop(k) for k in extra_keys if k in table}


def _build_camera(table: dict) -> CameraModel:
    _check_keys("camera", table, _CAMERA_KEYS)
    base = CameraModel()
    mount = Pose2(
        _coerce("camera", "mount_x", table.get("mount_x", base.mount.x), float),
        _coerce("camera", "mount_y", table.get("mount_y", base.mount.y), float),
        _coerce("camera", "mount_yaw", table.get("mount_yaw", base.mount.theta), float))
    return CameraModel(
        width=_coerce("camera", "width", table.get("width", base.width), int),
        height=_coerce("camera", "height", table.get("height", base.height), int),
        diagonal_fov_deg=_coerce("camera", "diagonal_fov_deg",
                                 table.get("diagonal_fov_deg", base.diagonal_fov_deg), float),
        mount=mount,
        height_above_water=_coerce("camera", "height_above_water",
                                   table.get("height_above_water", base.height_above_water),
                                   float))


def _build_controller(table: dict) -> ControllerConfig:
    allowed = [f"{loop}_{p}" for loop in _PID_LOOPS for p in _PID_FIELDS]
    allowed += list(_CONTROLLER_SCALARS)
    _check_keys("controller", table, allowed)
    base = ControllerConfig()
    updates = {}
    for loop in _PID_LOOPS:
        gain_updates = {}
        for p in _PID_FIELDS:
            key = f"{loop}_{p}"
            if key in table:
                gain_updates[p] = _coerce("controller", key, table[key], float)
        if gain_updates:
            updates[loop] = replace(getattr(base, loop), **gain_updates)
    for key in _CONTROLLER_SCALARS:
        if key in table:
            updates[key] = _coerce("controller", key, table[key], float)
    return replace(base, **updates) if updates else base


def loads_config(text: str) -> RunConfig:
    """Parse config text; absent sections and keys keep their defaults."""
    data = tomllib.loads(text)
    known = ("run", "plant", "disturbance", "camera", "scene", "collect",
             "augment", "network", "train", "controller", "dock", "evaluation")
    _check_keys("top level", data, known)
    for name, table in data.items():
        if not isinstance(table, dict):
            raise ValueError(f"[{name}] must be a section, not a bare value")

    run_tbl = dict(data.get("run", {}))
    _check_keys("run", run_tbl, ("seed",))
    seed = _coerce("run", "seed", run_tbl.get("seed", 0), int)

    dist_tbl = dict(data.get("disturbance", {}))
    enabled = _coerce("disturbance", "enabled", dist_tbl.pop("enabled", True), bool)

    aug_tbl = dict(data.get("augment", {}))
    copies = _coerce("augment", "copies", aug_tbl.pop("copies", 1), int)

    train_tbl = dict(data.get("train", {}))
    fraction = _coerce("train", "train_fraction",
                       train_tbl.pop("train_fraction", 0.8), float)

    dock_tbl = dict(data.get("dock", {}))
    trials = _coerce("dock", "trials", dock_tbl.pop("trials", 20), int)

    cfg = RunConfig(
        seed=seed,
        plant=_fill("plant", dict(data.get("plant", {})), UsvParams()),
        disturbance=_fill("disturbance", dist_tbl, DisturbanceConfig(), skip=("seed",)),
        disturbance_enabled=enabled,
        camera=_build_camera(dict(data.get("camera", {}))),
        scene=_fill("scene", dict(data.get("scene", {})), SceneConfig()),
        collect=_fill("collect", dict(data.get("collect", {})), CollectionConfig()),
        augment=_fill("augment", aug_tbl, AugmentationConfig(), skip=("seed",)),
        augment_copies=copies,
        network=_fill("network", dict(data.get("network", {})), NetworkConfig()),
        train=_fill("train", train_tbl, TrainConfig(), skip=("seed",)),
        train_fraction=fraction,
        controller=_build_controller(dict(data.get("controller", {}))),
        dock=_fill("dock", dock_tbl, TrialConfig()),
        dock_trials=trials,
        evaluation=_fill("evaluation", dict(data.get("evaluation", {})), EvaluationConfig()))
    return with_seed(cfg, seed)


def load_config(path) -> RunConfig:
    with open(path, "r") as fh:
        return loads_config(fh.read())


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot format {value!r}")


def _dataclass_items(obj, skip: tuple = ()) -> list:
    return [(f.name, getattr(obj, f.name)) for f in fields(obj) if f.name not in skip]


def dump_config(cfg: RunConfig) -> str:
    """Canonical TOML text of the effective config."""
    sections: list[tuple[str, list]] = []
    sections.append(("run", [("seed", cfg.seed)]))
    sections.append(("plant", _dataclass_items(cfg.plant)))
    sections.append(("disturbance", [("enabled", cfg.disturbance_enabled)]
                     + _dataclass_items(cfg.disturbance, skip=("seed",))))
    cam = cfg.camera
    sections.append(("camera", [
        ("width", cam.width), ("height", cam.height),
        ("diagonal_fov_deg", cam.diagonal_fov_deg),
        ("mount_x", cam.mount.x), ("mount_y", cam.mount.y),
        ("mount_yaw", cam.mount.theta),
        ("height_above_water", cam.height_above_water)]))
    sections.append(("scene", _dataclass_items(cfg.scene)))
    sections.append(("collect", _dataclass_items(cfg.collect)))
    sections.append(("augment", [("copies", cfg.augment_copies)]
                     + _dataclass_items(cfg.augment, skip=("seed",))))
    sections.append(("network", _dataclass_items(cfg.network)))
    sections.append(("train", [("train_fraction", cfg.train_fraction)]
                     + _dataclass_items(cfg.train, skip=("seed",))))
    ctrl_items = []
    for loop in _PID_LOOPS:
        gains: PidGains = getattr(cfg.controller, loop)
        ctrl_items += [(f"{loop}_{p}", getattr(gains, p)) for p in _PID_FIELDS]
    ctrl_items += [(k, getattr(cfg.controller, k)) for k in _CONTROLLER_SCALARS]
    sections.append(("controller", ctrl_items))
    sections.append(("dock", [("trials", cfg.dock_trials)] + _dataclass_items(cfg.dock)))
    sections.append(("evaluation", _dataclass_items(cfg.evaluation)))

    lines = []
    for name, items in sections:
        lines.append(f"[{name}]")
        lines += [f"{key} = {_fmt(value)}" for key, value in items]
        lines.append("")
    return "\n".join(lines)


def config_hash(cfg: RunConfig) -> str:
    """Name of the run: SHA-256 over the canonical dump."""
    return hashlib.sha256(dump_config(cfg).encode()).hexdigest()


def write_config(path, cfg: RunConfig) -> None:
    with open(path, "w") as fh:
        fh.write(dump_config(cfg))
