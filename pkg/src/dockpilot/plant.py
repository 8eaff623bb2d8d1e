"""Planar differential-thrust vessel dynamics.

The static thrust map is v = alpha*(T_r + T_l), omega = beta*(T_r - T_l).
On top of that the simulator adds two first-order lags (actuator response
and hull drag), an Ornstein-Uhlenbeck force/torque disturbance standing in
for wind and waves, and exact constant-twist pose integration so step-size
changes do not move test values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .se2 import Pose2, compose
from .util import make_rng, write_csv


@dataclass(frozen=True)
class UsvParams:
    """Physical constants of the simulated vessel."""

    alpha: float = 0.8  # (m/s) per unit total thrust
    beta: float = 1.2  # (rad/s) per unit differential thrust
    actuator_time_constant: float = 0.3  # s, thrust response lag
    pwm_to_thrust_gain: float = 1.0  # unit thrust per PWM unit
    max_thrust: float = 1.0  # unitless clamp on realized thrust
    hull_drag_time_constant: float = 1.0  # s, twist response lag

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("alpha and beta must be positive")
        if not (self.actuator_time_constant > 0 and self.hull_drag_time_constant > 0):
            raise ValueError("time constants must be positive")


@dataclass(frozen=True)
class UsvState:
    """Full vessel state: world pose, body twist, realized thrusts, time."""

    pose: Pose2 = Pose2()
    v: float = 0.0  # surge, m/s
    omega: float = 0.0  # yaw rate, rad/s
    thrust_r: float = 0.0
    thrust_l: float = 0.0
    t: float = 0.0

    def is_finite(self) -> bool:
        vals = (self.pose.x, self.pose.y, self.pose.theta,
                self.v, self.omega, self.thrust_r, self.thrust_l, self.t)
        return all(math.isfinite(x) for x in vals)


@dataclass(frozen=True)
class DisturbanceConfig:
    """Wind/wave emulation: OU accelerations on surge and yaw."""

    wind_force_std: float = 0.06  # m/s^2 equivalent, stationary std
    wind_torque_std: float = 0.08  # rad/s^2 equivalent, stationary std
    correlation_time: float = 2.0  # s
    seed: int = 0

    def __post_init__(self):
        if self.wind_force_std < 0 or self.wind_torque_std < 0:
            raise ValueError("disturbance standard deviations must be >= 0")
        if self.correlation_time <= 0:
            raise ValueError("correlation_time must be positive")


ZERO_DISTURBANCE = (0.0, 0.0)


class OuDisturbance:
    """Temporally correlated random accelerations (exact OU discretization).

    Each call to step(dt) advances the process and returns the current
    (surge_accel, yaw_accel) pair. Identical (config, seed) sequences of
    dt produce identical outputs.
    """

    def __init__(self, cfg: DisturbanceConfig):
        self.cfg = cfg
        self._rng = make_rng(cfg.seed, "ou-disturbance")
        self._a_surge = 0.0
        self._a_yaw = 0.0

    def step(self, dt: float) -> tuple[float, float]:
        decay = math.exp(-dt / self.cfg.correlation_time)
        kick = math.sqrt(max(0.0, 1.0 - decay * decay))
        n_surge, n_yaw = self._rng.standard_normal(2)
        self._a_surge = self._a_surge * decay + self.cfg.wind_force_std * kick * n_surge
        self._a_yaw = self._a_yaw * decay + self.cfg.wind_torque_std * kick * n_yaw
        return self._a_surge, self._a_yaw


def forward_model(params: UsvParams, thrust_r: float, thrust_l: float) -> tuple[float, float]:
    """Static thrust-to-twist map: (v, omega)."""
    return (params.alpha * (thrust_r + thrust_l),
            params.beta * (thrust_r - thrust_l))


def pwm_to_thrust(params: UsvParams, pwm: float) -> float:
    """Linear PWM-to-thrust map, clamped to the thrust limit."""
    thrust = params.pwm_to_thrust_gain * pwm
    return min(max(thrust, -params.max_thrust), params.max_thrust)


def integrate_twist(pose: Pose2, v: float, omega: float, dt: float) -> Pose2:
    """Exact pose update under a twist held constant for dt.

    Follows the circular arc (or straight line) the twist describes; the
    |omega| < 1e-6 branch is the series expansion of the same arc, keeping
    the update smooth through omega = 0.
    """
    dtheta = omega * dt
    if abs(omega) < 1e-6:
        # sin(x)/x and (1-cos(x))/x expansions, x = omega*dt
        dx = v * dt * (1.0 - dtheta * dtheta / 6.0)
        dy = v * dt * (dtheta / 2.0) * (1.0 - dtheta * dtheta / 12.0)
    else:
        dx = v * math.sin(dtheta) / omega
        dy = v * (1.0 - math.cos(dtheta)) / omega
    return compose(pose, Pose2(dx, dy, dtheta))


def step(params: UsvParams, state: UsvState, pwm_r: float, pwm_l: float,
         dt: float, disturbance: tuple[float, float] = ZERO_DISTURBANCE) -> UsvState:
    """Advance the vessel one step under PWM commands.

    Realized thrusts relax exponentially toward the commanded thrusts
    (actuator lag); the body twist relaxes toward the static map of the
    realized thrusts (hull lag) plus the disturbance acceleration; the pose
    then follows the exact constant-twist arc.
    """
    if not (0.0 < dt <= 0.1):
        raise ValueError(f"dt must be in (0, 0.1] s, got {dt}")
    if not state.is_finite():
        raise ValueError("vessel state is not finite")

    cmd_r = pwm_to_thrust(params, pwm_r)
    cmd_l = pwm_to_thrust(params, pwm_l)
    act_gain = 1.0 - math.exp(-dt / params.actuator_time_constant)
    thrust_r = state.thrust_r + act_gain * (cmd_r - state.thrust_r)
    thrust_l = state.thrust_l + act_gain * (cmd_l - state.thrust_l)

    v_target, omega_target = forward_model(params, thrust_r, thrust_l)
    hull_gain = 1.0 - math.exp(-dt / params.hull_drag_time_constant)
    v = state.v + hull_gain * (v_target - state.v) + disturbance[0] * dt
    omega = state.omega + hull_gain * (omega_target - state.omega) + disturbance[1] * dt

    pose = integrate_twist(state.pose, v, omega, dt)
    return UsvState(pose=pose, v=v, omega=omega,
                    thrust_r=thrust_r, thrust_l=thrust_l, t=state.t + dt)


def at_pose(state: UsvState, pose: Pose2) -> UsvState:
    """Copy of the state relocated to a new world pose."""
    return replace(state, pose=pose)


TRAJECTORY_COLUMNS = ("t", "x", "y", "theta", "v", "omega", "T_r", "T_l")


def write_trajectory(path, states) -> None:
    """Dump a state sequence as a CSV trajectory log."""
    rows = [(s.t, s.pose.x, s.pose.y, s.pose.theta, s.v, s.omega,
             s.thrust_r, s.thrust_l) for s in states]
    write_csv(path, TRAJECTORY_COLUMNS, rows)
