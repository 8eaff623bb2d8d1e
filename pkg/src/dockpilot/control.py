"""Cascaded motion controller and control allocation.

Outer loop: pose error -> desired body twist, with two phases. In the
approach phase surge tracks the along-body distance to the target and yaw
tracks the course to it (targets behind the vessel are approached in
reverse). Inside the switch radius the align phase keeps surge on the
body-x offset and turns yaw onto the target heading. Inner loop: per-channel
PID on twist error -> mixer inputs (u_v, u_omega), allocated to left/right
PWM through the inverse thrust map and saturated by the limiter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .se2 import Pose2, apply_relative, normalize_angle, relative_pose


@dataclass(frozen=True)
class PidGains:
    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0
    integral_limit: float = math.inf
    output_limit: float = math.inf

    def __post_init__(self):
        if self.integral_limit < 0 or self.output_limit < 0:
            raise ValueError("limits must be >= 0")


@dataclass
class PidState:
    integral: float = 0.0
    prev_error: float | None = None


def pid_step(gains: PidGains, state: PidState, reference: float,
             measurement: float, dt: float) -> float:
    """One discrete PID update with clamped integral and saturated output."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    error = reference - measurement
    integral = state.integral + error * dt
    state.integral = min(max(integral, -gains.integral_limit), gains.integral_limit)
    derivative = 0.0 if state.prev_error is None else (error - state.prev_error) / dt
    state.prev_error = error
    out = gains.kp * error + gains.ki * state.integral + gains.kd * derivative
    return min(max(out, -gains.output_limit), gains.output_limit)


@dataclass(frozen=True)
class ControllerConfig:
    """Gains and limits of the full cascade (defaults tuned on the simulator)."""

    distance: PidGains = PidGains(kp=0.6, ki=0.02, kd=0.1, integral_limit=2.0, output_limit=0.6)
    bearing: PidGains = PidGains(kp=1.5, ki=0.0, kd=0.2, output_limit=1.2)
    heading: PidGains = PidGains(kp=1.2, ki=0.0, kd=0.2, output_limit=1.2)
    surge: PidGains = PidGains(kp=1.5, ki=0.3, kd=0.0, integral_limit=1.0, output_limit=4.0)
    yaw: PidGains = PidGains(kp=1.0, ki=0.2, kd=0.0, integral_limit=1.0, output_limit=4.0)
    alpha: float = 0.8  # shared with the plant
    beta: float = 1.2
    pwm_min: float = -1.0
    pwm_max: float = 1.0
    control_rate_hz: float = 10.0
    predict_rate_hz: float = 6.0
    position_tolerance: float = 0.25  # m, controller-side goal band
    heading_tolerance: float = math.radians(20.0)
    switch_radius: float = 1.0  # m, approach -> align handover

    def __post_init__(self):
        if not self.pwm_min < self.pwm_max:
            raise ValueError("pwm_min must be below pwm_max")
        if self.control_rate_hz <= 0 or self.predict_rate_hz <= 0:
            raise ValueError("rates must be positive")
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")


@dataclass
class ControllerState:
    """Mutable PID histories of the whole cascade."""

    distance: PidState = field(default_factory=PidState)
    bearing: PidState = field(default_factory=PidState)
    heading: PidState = field(default_factory=PidState)
    surge: PidState = field(default_factory=PidState)
    yaw: PidState = field(default_factory=PidState)
    phase: str | None = None


def outer_loop(cfg: ControllerConfig, state: ControllerState, current: Pose2,
               target: Pose2, dt: float) -> tuple[float, float]:
    """Pose error to desired body twist (v, omega)."""
    rel = relative_pose(current, target)
    dist = math.hypot(rel.x, rel.y)
    phase = "approach" if dist > cfg.switch_radius else "align"
    if state.phase != phase:
        # windup built up in one phase must not bias the other, and the jump
        # in the tracked error would otherwise kick the derivative terms
        state.distance = PidState()
        state.bearing = PidState()
        state.heading = PidState()
        state.phase = phase
    v_des = pid_step(cfg.distance, state.distance, rel.x, 0.0, dt)
    if dist > cfg.switch_radius:
        course = math.atan2(rel.y, rel.x)
        # targets behind are approached stern-first: steer the tail onto them
        err = course if abs(course) <= math.pi / 2 else normalize_angle(course + math.pi)
        omega_des = pid_step(cfg.bearing, state.bearing, err, 0.0, dt)
    else:
        err = rel.theta
        if rel.x > 0.1:
            # nonholonomic hull: while still moving up the slot, bend the
            # heading toward the centerline so the lateral offset dies too
            err = normalize_angle(err + min(max(1.2 * rel.y, -0.4), 0.4))
        omega_des = pid_step(cfg.heading, state.heading, err, 0.0, dt)
    return v_des, omega_des


def inner_loop(cfg: ControllerConfig, state: ControllerState,
               desired: tuple[float, float], measured: tuple[float, float],
               dt: float) -> tuple[float, float]:
    """Twist error to mixer inputs (u_v, u_omega); channels independent."""
    u_v = pid_step(cfg.surge, state.surge, desired[0], measured[0], dt)
    u_w = pid_step(cfg.yaw, state.yaw, desired[1], measured[1], dt)
    return u_v, u_w


def inverse_kinematics(v: float, omega: float, alpha: float, beta: float) -> tuple[float, float]:
    """Twist to (right, left) thrusts; exact inverse of the static thrust map."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    t_r = (beta * v + alpha * omega) / (2.0 * alpha * beta)
    t_l = (beta * v - alpha * omega) / (2.0 * alpha * beta)
    return t_r, t_l


def allocate_pwm(cfg: ControllerConfig, u_v: float, u_w: float) -> tuple[float, float]:
    """Mixer inputs to raw (right, left) PWM, before limiting."""
    return inverse_kinematics(u_v, u_w, cfg.alpha, cfg.beta)


def clip_pwm(pwm: float, pwm_min: float, pwm_max: float) -> float:
    if pwm_min > pwm_max:
        raise ValueError("pwm_min must not exceed pwm_max")
    return min(max(pwm, pwm_min), pwm_max)


def pbvs_target(current: Pose2, predicted: Pose2) -> Pose2:
    """World-frame dock target implied by a relative-pose prediction."""
    return apply_relative(current, predicted)


def command(cfg: ControllerConfig, state: ControllerState, current: Pose2,
            target: Pose2, measured_twist: tuple[float, float], dt: float) -> tuple[float, float]:
    """Full cascade: pose target to limited (pwm_r, pwm_l)."""
    desired = outer_loop(cfg, state, current, target, dt)
    u_v, u_w = inner_loop(cfg, state, desired, measured_twist, dt)
    pwm_r, pwm_l = allocate_pwm(cfg, u_v, u_w)
    return (clip_pwm(pwm_r, cfg.pwm_min, cfg.pwm_max),
            clip_pwm(pwm_l, cfg.pwm_min, cfg.pwm_max))
