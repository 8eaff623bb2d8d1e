"""Auto-labeled data collection.

Each scene drops the dock at a seeded world pose, starts the vessel docked
(so the first label is the identity), and lets a seeded waypoint-wander
policy explore the pre-docking area. The policy always keeps the dock
inside the camera's useful field by driving bow-toward-dock legs forward
and away-from-dock legs in reverse, with near-tangential courses clamped
out. Waypoints alternate between an outer band and dips down the entry
corridor, so the distance-to-dock distribution comes out wide and
two-lobed rather than piled at one range. Captures land on the camera
frame grid, are matched to the odometry stream by the approximate-time
pairer, and become (image, relative-pose) samples with no human labeling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from . import plant
from .camera import CameraModel, block_pixel_count, render, write_pgm
from .control import (ControllerConfig, ControllerState, allocate_pwm, clip_pwm,
                      inner_loop)
from .dataset import Sample
from .scene import DockScene, make_scene, opening_polar
from .se2 import Pose2, normalize_angle, relative_pose, transform_point
from .sync import approximate_time_pair
from .util import make_rng


@dataclass(frozen=True)
class CollectionConfig:
    scenes: int = 10
    samples_per_scene: int = 200
    pose_rate_hz: float = 200.0
    image_fps: float = 30.0
    capture_hz: float = 2.0
    sync_threshold_s: float = 0.010
    min_block_pixels: int = 1000  # full-res floor; ~20+ px survive the 64x64 downscale
    margin_factor: float = 2.2  # extra sim time per scene beyond the nominal need
    max_attempts: int = 3
    wander_radius_low: float = 4.4  # outer waypoint band; near coverage comes from dips
    wander_radius_high: float = 6.4
    wander_angle_deg: float = 55.0  # waypoint sector off the opening axis
    dip_fraction: float = 0.5  # probability a leg runs down the entry corridor
    cruise_speed_low: float = 0.26
    cruise_speed_high: float = 0.62
    leg_timeout_s: float = 22.0
    waypoint_radius: float = 0.5
    control_rate_hz: float = 10.0
    world_extent: float = 20.0  # dock placed uniformly in +/- this box
    drift_xy_std: float = 0.0  # odometry random walk, m/sqrt(s); 0 = exact odometry
    drift_theta_std: float = 0.0  # rad/sqrt(s)

    def __post_init__(self):
        if self.samples_per_scene < 1 or self.scenes < 0:
            raise ValueError("bad scene/sample counts")
        if self.pose_rate_hz < self.control_rate_hz or self.control_rate_hz <= 0:
            raise ValueError("pose rate must be at least the control rate")


@dataclass
class _Record:
    t: float
    true_pose: Pose2
    odom_pose: Pose2
    speed: float


# course-clamp bands relative to the dock bearing: forward legs within
# +/-_FWD_BAND of it, reverse legs within +/-(180 - _REV_BAND); in between
# the course is snapped to the nearer band edge (outward when close in)
_FWD_BAND = math.radians(50.0)
_REV_BAND = math.radians(125.0)
_SAFE_RADIUS = 3.4  # inside this, snap ambiguous courses outward
_DIP_GATE_ANGLE = math.radians(35.0)  # dip only when roughly funnel-aligned
_DIP_GATE_RADIUS = 7.5  # covers the outer band so dips start from anywhere


class _WanderPolicy:
    """Seeded exploration: reverse out of the dock, then wander waypoints."""

    def __init__(self, cfg: CollectionConfig, scene: DockScene, rng):
        self.cfg = cfg
        self.scene = scene
        self.rng = rng
        self.ctrl = ControllerConfig()
        self.pids = ControllerState()
        self.leg_start = 0.0
        self.in_dip = False
        self.cruise = 0.35
        self.jitter = 0.0
        # first leg: back straight out of the dock onto the corridor axis
        self.waypoint = transform_point(scene.dock_pose, (-3.2, 0.0))

    def _next_leg(self, odom: Pose2, t: float) -> None:
        self.leg_start = t
        self.cruise = float(self.rng.uniform(self.cfg.cruise_speed_low, self.cfg.cruise_speed_high))
        self.jitter = float(self.rng.uniform(-math.radians(10.0), math.radians(10.0)))
        r, phi = opening_polar(self.scene, (odom.x, odom.y))
        want_dip = (not self.in_dip and self.rng.random() < self.cfg.dip_fraction
                    and abs(phi) <= _DIP_GATE_ANGLE and r <= _DIP_GATE_RADIUS)
        if want_dip:
            self.in_dip = True
            x = float(self.rng.uniform(-2.4, -1.0))  # deep enough to reach ~1 m range
            y = float(self.rng.uniform(-0.15, 0.15))
            self.waypoint = transform_point(self.scene.dock_pose, (x, y))
        else:
            self.in_dip = False
            wr = float(self.rng.uniform(self.cfg.wander_radius_low, self.cfg.wander_radius_high))
            wa = float(self.rng.uniform(-1.0, 1.0)) * math.radians(self.cfg.wander_angle_deg)
            self.waypoint = transform_point(self.scene.dock_pose,
                                            (-wr * math.cos(wa), wr * math.sin(wa)))

    def pwm(self, odom: Pose2, twist: tuple[float, float], t: float, dt: float) -> tuple[float, float]:
        wp = self.waypoint
        dist_wp = math.hypot(wp[0] - odom.x, wp[1] - odom.y)
        if dist_wp < self.cfg.waypoint_radius or (t - self.leg_start) > self.cfg.leg_timeout_s:
            self._next_leg(odom, t)
            wp = self.waypoint
            dist_wp = math.hypot(wp[0] - odom.x, wp[1] - odom.y)

        dock = self.scene.dock_pose
        bearing_dock = math.atan2(dock.y - odom.y, dock.x - odom.x)
        course = math.atan2(wp[1] - odom.y, wp[0] - odom.x)
        gamma = normalize_angle(course - bearing_dock)
        r, _ = opening_polar(self.scene, (odom.x, odom.y))
        if _FWD_BAND < abs(gamma) < _REV_BAND and not self.in_dip:
            if r <= _SAFE_RADIUS:
                gamma = math.copysign(_REV_BAND, gamma)  # push outward near the dock
            else:
                band = _FWD_BAND if abs(gamma) < math.pi / 2 else _REV_BAND
                gamma = math.copysign(band, gamma)
            course = normalize_angle(bearing_dock + gamma)
        if abs(gamma) <= math.pi / 2:
            heading_des = normalize_angle(course + self.jitter)
            sign = 1.0
        else:
            heading_des = normalize_angle(course + math.pi + self.jitter)
            sign = -1.0
        heading_err = normalize_angle(heading_des - odom.theta)
        w_des = min(max(2.0 * heading_err, -1.0), 1.0)
        v_des = sign * min(self.cruise, dist_wp) * max(0.0, math.cos(heading_err))
        u_v, u_w = inner_loop(self.ctrl, self.pids, (v_des, w_des), twist, dt)
        pwm_r, pwm_l = allocate_pwm(self.ctrl, u_v, u_w)
        return (clip_pwm(pwm_r, self.ctrl.pwm_min, self.ctrl.pwm_max),
                clip_pwm(pwm_l, self.ctrl.pwm_min, self.ctrl.pwm_max))


def random_dock_scene(seed: int, cfg: CollectionConfig, build=make_scene) -> DockScene:
    rng = make_rng(seed, "dock-pose")
    x, y = rng.uniform(-cfg.world_extent, cfg.world_extent, 2)
    theta = rng.uniform(-math.pi, math.pi)
    return build(Pose2(float(x), float(y), float(theta)))


def _simulate(cfg: CollectionConfig, params: plant.UsvParams, scene: DockScene,
              dist_cfg: plant.DisturbanceConfig | None, seed: int, attempt: int) -> list[_Record]:
    dt = 1.0 / cfg.pose_rate_hz
    ctrl_every = int(round(cfg.pose_rate_hz / cfg.control_rate_hz))
    duration = cfg.samples_per_scene / cfg.capture_hz * cfg.margin_factor
    steps = int(round(duration * cfg.pose_rate_hz))

    policy = _WanderPolicy(cfg, scene, make_rng(seed, "policy", attempt))
    disturb = plant.OuDisturbance(dist_cfg) if dist_cfg else None
    drift_rng = make_rng(seed, "drift", attempt)
    drift = [0.0, 0.0, 0.0]
    state = plant.UsvState(pose=scene.dock_pose)
    sqrt_dt = math.sqrt(dt)

    def odom_of(s: plant.UsvState) -> Pose2:
        if cfg.drift_xy_std == 0.0 and cfg.drift_theta_std == 0.0:
            return s.pose
        return Pose2(s.pose.x + drift[0], s.pose.y + drift[1], s.pose.theta + drift[2])

    records = [_Record(0.0, state.pose, odom_of(state), 0.0)]
    pwm = (0.0, 0.0)
    for m in range(1, steps + 1):
        if (m - 1) % ctrl_every == 0:
            pwm = policy.pwm(odom_of(state), (state.v, state.omega), state.t, ctrl_every * dt)
        kick = disturb.step(dt) if disturb else plant.ZERO_DISTURBANCE
        state = plant.step(params, state, pwm[0], pwm[1], dt, kick)
        if cfg.drift_xy_std > 0.0 or cfg.drift_theta_std > 0.0:
            n = drift_rng.standard_normal(3)
            drift[0] += cfg.drift_xy_std * sqrt_dt * n[0]
            drift[1] += cfg.drift_xy_std * sqrt_dt * n[1]
            drift[2] += cfg.drift_theta_std * sqrt_dt * n[2]
        records.append(_Record(m * dt, state.pose, odom_of(state), abs(state.v)))
    return records


def collect_scene(scene_name: str, seed: int, cfg: CollectionConfig,
                  params: plant.UsvParams, camera: CameraModel,
                  dist_cfg: plant.DisturbanceConfig | None, images_dir,
                  build=make_scene) -> tuple[DockScene, list[Sample]]:
    """Run one scene to exactly samples_per_scene kept captures.

    Retries with a derived seed when visibility losses leave the scene
    short; raises after max_attempts.
    """
    images_dir = Path(images_dir)
    images_dir.mkdir(parents=True, exist_ok=True)
    scene = random_dock_scene(seed, cfg, build)
    for attempt in range(cfg.max_attempts):
        records = _simulate(cfg, params, scene, dist_cfg, seed, attempt)
        pose_times = [r.t for r in records]
        n_frames = int(records[-1].t * cfg.capture_hz) + 1
        image_times = [round(k / cfg.capture_hz * cfg.image_fps) / cfg.image_fps
                       for k in range(n_frames)]
        pairs = approximate_time_pair(pose_times, image_times, cfg.sync_threshold_s)

        samples = []
        for pair in pairs:
            rec = records[pair.pose_index]
            img = render(camera, scene, rec.true_pose)
            if block_pixel_count(scene, img) < cfg.min_block_pixels:
                continue
            sample_id = f"{scene_name}-{len(samples):04d}"
            rel = f"images/{sample_id}.pgm"
            write_pgm(images_dir / f"{sample_id}.pgm", img)
            label = relative_pose(rec.odom_pose, scene.dock_pose)
            dist = math.hypot(rec.odom_pose.x - scene.dock_pose.x,
                              rec.odom_pose.y - scene.dock_pose.y)
            samples.append(Sample(id=sample_id, image=rel, label=label,
                                  world_pose=rec.odom_pose, speed=rec.speed,
                                  dist=dist, t=pair.image_time, scene=scene_name,
                                  augmented=False))
            if len(samples) == cfg.samples_per_scene:
                return scene, samples
    raise RuntimeError(f"scene {scene_name}: could not keep the dock visible for "
                       f"{cfg.samples_per_scene} captures in {cfg.max_attempts} attempts")


def collect_dataset(cfg: CollectionConfig, params: plant.UsvParams, camera: CameraModel,
                    dist_cfg: plant.DisturbanceConfig | None, seed: int,
                    out_dir, build=make_scene) -> list[Sample]:
    """All scenes, sequential and seeded; returns the merged sample list."""
    out_dir = Path(out_dir)
    images_dir = out_dir / "images"
    all_samples = []
    for i in range(cfg.scenes):
        scene_name = f"sc{i:02d}"
        _, samples = collect_scene(scene_name, seed * 1000 + i, cfg, params, camera,
                                   dist_cfg, images_dir, build)
        all_samples.extend(samples)
    return all_samples
