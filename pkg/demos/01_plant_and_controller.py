"""Drive the simulated vessel open- and closed-loop.

Shows the differential-thrust plant's step response, the thrust map's
exact inversion, and the cascaded controller holding a pose target.
Run:  python3 demos/01_plant_and_controller.py
"""

import math

from dockpilot import plant
from dockpilot.control import (ControllerConfig, ControllerState, command,
                               inverse_kinematics)
from dockpilot.se2 import Pose2

params = plant.UsvParams()

print("== step response: full symmetric thrust ==")
state = plant.UsvState(pose=Pose2())
for _ in range(100):
    state = plant.step(params, state, pwm_r=1.0, pwm_l=1.0, dt=0.05)
print(f"after {state.t:.1f}s  v={state.v:.3f} m/s (limit {params.alpha * params.max_thrust * 2:.1f}),"
      f" x={state.pose.x:.2f} m, omega={state.omega:.4f} rad/s")

print("\n== turn in place: opposed thrust ==")
state = plant.UsvState(pose=Pose2())
for _ in range(100):
    state = plant.step(params, state, pwm_r=0.5, pwm_l=-0.5, dt=0.05)
print(f"after {state.t:.1f}s  omega={state.omega:.3f} rad/s, v={state.v:.4f} m/s, "
      f"heading={math.degrees(state.pose.theta):.1f} deg")

print("\n== thrust map round trip ==")
v_des, w_des = 0.9, -0.4
t_r, t_l = inverse_kinematics(v_des, w_des, params.alpha, params.beta)
v_back, w_back = plant.forward_model(params, t_r, t_l)
print(f"desired ({v_des}, {w_des}) -> thrusts ({t_r:.4f}, {t_l:.4f}) -> ({v_back}, {w_back})")

print("\n== closed loop: hold a pose 3 m ahead ==")
ctrl = ControllerConfig()
ctrl_state = ControllerState()
state = plant.UsvState(pose=Pose2())
target = Pose2(3.0, 1.0, 0.0)
dt = 1.0 / ctrl.control_rate_hz
for k in range(600):
    pwm = command(ctrl, ctrl_state, state.pose, target, (state.v, state.omega), dt)
    state = plant.step(params, state, pwm[0], pwm[1], dt)
err = math.hypot(state.pose.x - target.x, state.pose.y - target.y)
print(f"after {state.t:.0f}s  pose=({state.pose.x:.3f}, {state.pose.y:.3f}, "
      f"{math.degrees(state.pose.theta):.1f} deg)  position error {err:.3f} m")
