"""Closed-loop docking trials.

A trial starts the vessel at a seeded pre-docking pose, estimates the
relative dock pose (from the network, or from ground truth when validating
the controller alone), converts it to a world target, and runs the cascaded
controller until the motion settles, time runs out, or the hull hits a
block. Continuous mode refreshes the estimate at the prediction rate;
single-shot mode estimates once at the start and navigates on that alone.

Guidance staging: the raw target is not approached directly. While outside
the entry corridor the vessel steers to a waypoint on the corridor axis,
with near-dock courses bent tangentially around a keep-out disc (cutting
the corner of the U with a large heading error is how trials fail).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import plant
from .camera import CameraModel, render
from .control import ControllerConfig, ControllerState, command, pbvs_target
from .estimator import Estimator
from .scene import DockScene, hull_block_contact, in_docking_area
from .se2 import Pose2, apply_relative, normalize_angle, relative_pose
from .util import make_rng, write_csv


@dataclass(frozen=True)
class TrialConfig:
    timeout_s: float = 120.0
    start_radius_low: float = 2.0
    start_radius_high: float = 8.0
    start_angle_deg: float = 60.0  # start sector off the opening axis
    start_heading_jitter_deg: float = 30.0
    entry_offset: float = 2.6  # corridor waypoint, meters out from the dock
    entry_gate_radius: float = 3.0  # corridor acquired below this estimated range
    entry_gate_angle_deg: float = 18.0
    keepout_radius: float = 2.45  # no through-traffic disc around the dock
    settle_speed: float = 0.05  # m/s
    settle_omega: float = 0.1  # rad/s
    collision_heading_deg: float = 45.0  # block contact above this error = crash


class OraclePredictor:
    """Perfect relative-pose source for controller-only validation."""

    def __init__(self, scene: DockScene):
        self.scene = scene

    def predict(self, true_pose: Pose2) -> Pose2:
        return relative_pose(true_pose, self.scene.dock_pose)


class NetworkPredictor:
    """Render-then-infer pipeline: what the vessel would run onboard."""

    def __init__(self, estimator: Estimator, camera: CameraModel, scene: DockScene):
        self.estimator = estimator
        self.camera = camera
        self.scene = scene

    def predict(self, true_pose: Pose2) -> Pose2:
        return self.estimator.predict(render(self.camera, self.scene, true_pose))


@dataclass
class TrialResult:
    success: bool
    collided: bool
    timed_out: bool
    settled: bool
    contact_docked: bool
    final_position_error: float
    final_heading_error: float
    steps: int
    sim_time: float
    predictions: int
    seed: int
    mode: str
    rows: list  # per-step log tuples

    def summary(self) -> dict:
        return {
            "success": self.success,
            "collided": self.collided,
            "timed_out": self.timed_out,
            "settled": self.settled,
            "contact_docked": self.contact_docked,
            "final_position_error_m": self.final_position_error,
            "final_heading_error_rad": self.final_heading_error,
            "steps": self.steps,
            "sim_time_s": self.sim_time,
            "predictions": self.predictions,
            "seed": self.seed,
            "mode": self.mode,
        }


TRIAL_LOG_COLUMNS = ("t", "x", "y", "theta", "v", "omega",
                     "pred_dx", "pred_dy", "pred_dtheta",
                     "target_x", "target_y", "target_theta", "pwm_r", "pwm_l")


def write_trial_log(path, result: TrialResult) -> None:
    write_csv(path, TRIAL_LOG_COLUMNS, result.rows)


def start_pose(scene: DockScene, trial_cfg: TrialConfig, rng) -> Pose2:
    """Seeded pre-docking start: dockward-ish heading, dock in view."""
    from .scene import pre_docking_pose
    for _ in range(64):
        r = float(rng.uniform(trial_cfg.start_radius_low, trial_cfg.start_radius_high))
        ang = float(rng.uniform(-1.0, 1.0)) * math.radians(trial_cfg.start_angle_deg)
        off = float(rng.uniform(-1.0, 1.0)) * math.radians(trial_cfg.start_heading_jitter_deg)
        pose = pre_docking_pose(scene, r, ang, off)
        # a short radius at a wide angle can land on the dock arms; redraw
        if not hull_block_contact(scene, pose):
            return pose
    raise RuntimeError("could not draw a contact-free start pose")


def canonical_starts(scene: DockScene) -> list[Pose2]:
    """Eight fixed poses covering the 2-8 m start band on both sides.

    At 2 m the +/-60 degree rays sit inside the dock arms, so the nearest
    pair stays close to the opening axis.
    """
    from .scene import pre_docking_pose
    spots = [(2.0, 15.0), (4.0, 60.0), (6.0, 60.0), (8.0, 60.0)]
    return [pre_docking_pose(scene, r, math.radians(s * a))
            for r, a in spots for s in (-1.0, 1.0)]


def _est_polar(est_dock: Pose2, pose: Pose2) -> tuple[float, float]:
    """Vessel position in the estimated dock frame, as (radius, off-axis angle)."""
    rel = relative_pose(est_dock, pose)
    return math.hypot(rel.x, rel.y), math.atan2(rel.y, -rel.x)


def _guidance_target(pose: Pose2, est_dock: Pose2, stage: str, cfg: TrialConfig) -> Pose2:
    """Pick the pose handed to the outer loop for the current stage."""
    if stage == "dock":
        return est_dock
    wp = apply_relative(est_dock, Pose2(-cfg.entry_offset, 0.0, 0.0))
    px, py = pose.x, pose.y
    cx, cy = est_dock.x, est_dock.y
    d_pc = math.hypot(cx - px, cy - py)
    bearing_c = math.atan2(cy - py, cx - px)
    _, phi = _est_polar(est_dock, pose)
    if d_pc < cfg.keepout_radius:
        # inside the keep-out: slide outward-tangential, around toward the opening
        side = 1.0 if phi <= 0.0 else -1.0  # rotate so |phi| shrinks
        course = bearing_c + side * math.radians(102.0)
        return Pose2(px + 2.0 * math.cos(course), py + 2.0 * math.sin(course), course)
    # does the straight run to the waypoint cut the keep-out disc?
    wx, wy = wp.x, wp.y
    seg = np.array([wx - px, wy - py])
    seg_len2 = float(seg @ seg)
    if seg_len2 > 0.0:
        tt = min(1.0, max(0.0, float(np.array([cx - px, cy - py]) @ seg) / seg_len2))
        closest = math.hypot(px + tt * seg[0] - cx, py + tt * seg[1] - cy)
    else:
        closest = d_pc
    if closest >= cfg.keepout_radius:
        return wp
    tangent = math.asin(min(1.0, cfg.keepout_radius / d_pc)) + math.radians(8.0)
    cross = (cx - px) * (wy - py) - (cy - py) * (wx - px)
    side = 1.0 if cross >= 0.0 else -1.0  # swing toward the waypoint's side
    course = bearing_c + side * tangent
    reach = min(2.0, d_pc)
    return Pose2(px + reach * math.cos(course), py + reach * math.sin(course), course)


def docking_trial(params: plant.UsvParams, scene: DockScene, predictor, mode: str,
                  ctrl_cfg: ControllerConfig, trial_cfg: TrialConfig, seed: int,
                  dist_cfg: plant.DisturbanceConfig | None = None,
                  start: Pose2 | None = None) -> TrialResult:
    """One closed-loop docking attempt. mode is "continuous" or "single_shot"."""
    if mode not in ("continuous", "single_shot"):
        raise ValueError(f"unknown servo mode {mode!r}")
    rng = make_rng(seed, "trial-start")
    pose0 = start if start is not None else start_pose(scene, trial_cfg, rng)
    state = plant.UsvState(pose=pose0)
    disturb = plant.OuDisturbance(replace(dist_cfg, seed=dist_cfg.seed * 100003 + seed)) \
        if dist_cfg is not None else None

    dt = 1.0 / ctrl_cfg.control_rate_hz
    n_steps = int(round(trial_cfg.timeout_s * ctrl_cfg.control_rate_hz))
    # prediction cadence on the control-step index: exactly predict_rate_hz
    # fires per second regardless of float drift in accumulated time
    ratio = ctrl_cfg.predict_rate_hz / ctrl_cfg.control_rate_hz
    ctrl_state = ControllerState()

    delta = None
    est_dock = None
    stage = "entry"
    n_pred = 0
    rows = []
    collided = False
    settled = False
    contact_docked = False

    for k in range(n_steps):
        if not state.is_finite():
            collided = True
            break
        due = k == 0 or math.floor(k * ratio + 1e-9) > math.floor((k - 1) * ratio + 1e-9)
        if delta is None or (mode == "continuous" and due):
            delta = predictor.predict(state.pose)
            est_dock = pbvs_target(state.pose, delta)
            n_pred += 1

        r_est, phi_est = _est_polar(est_dock, state.pose)
        if stage == "entry" and r_est <= trial_cfg.entry_gate_radius \
                and abs(phi_est) <= math.radians(trial_cfg.entry_gate_angle_deg):
            stage = "dock"
        target = _guidance_target(state.pose, est_dock, stage, trial_cfg)

        pwm_r, pwm_l = command(ctrl_cfg, ctrl_state, state.pose, target,
                               (state.v, state.omega), dt)
        kick = disturb.step(dt) if disturb else plant.ZERO_DISTURBANCE
        state = plant.step(params, state, pwm_r, pwm_l, dt, kick)
        rows.append((state.t, state.pose.x, state.pose.y, state.pose.theta,
                     state.v, state.omega, delta.x, delta.y, delta.theta,
                     target.x, target.y, target.theta, pwm_r, pwm_l))

        if hull_block_contact(scene, state.pose):
            err = abs(normalize_angle(scene.dock_pose.theta - state.pose.theta))
            if err > math.radians(trial_cfg.collision_heading_deg):
                collided = True
            else:
                contact_docked = True  # aligned graze on the guides: arrival, not a crash
            break
        rel_now = relative_pose(state.pose, est_dock)
        if stage == "dock" \
                and math.hypot(rel_now.x, rel_now.y) <= ctrl_cfg.position_tolerance \
                and abs(rel_now.theta) <= ctrl_cfg.heading_tolerance \
                and abs(state.v) <= trial_cfg.settle_speed \
                and abs(state.omega) <= trial_cfg.settle_omega:
            settled = True
            break

    timed_out = not (collided or settled or contact_docked)
    heading_err = abs(normalize_angle(scene.dock_pose.theta - state.pose.theta))
    pos_err = math.hypot(state.pose.x - scene.dock_pose.x, state.pose.y - scene.dock_pose.y)
    success = (not collided) and in_docking_area(scene, state.pose) \
        and heading_err <= ctrl_cfg.heading_tolerance
    return TrialResult(success=success, collided=collided, timed_out=timed_out,
                       settled=settled, contact_docked=contact_docked,
                       final_position_error=pos_err, final_heading_error=heading_err,
                       steps=len(rows), sim_time=state.t, predictions=n_pred,
                       seed=seed, mode=mode, rows=rows)
