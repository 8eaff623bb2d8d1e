"""Render the dock through the fisheye camera from a few vantage points.

Writes PGM images under demos/output/ and prints how many pixels the
dock blocks cover at each range (the auto-labeler's visibility signal).
Run:  python3 demos/02_fisheye_rendering.py
"""

import math
from pathlib import Path

from dockpilot.camera import CameraModel, block_pixel_count, crop_resize, render, write_pgm
from dockpilot.scene import make_scene, pre_docking_pose
from dockpilot.se2 import Pose2

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

camera = CameraModel()
scene = make_scene(Pose2(0.0, 0.0, 0.0))
print(f"camera: {camera.width}x{camera.height}, diagonal FOV "
      f"{camera.diagonal_fov_deg} deg, f = {camera.focal_coefficient:.3f} px/rad")

views = [
    ("docked", scene.dock_pose),
    ("axis-2m", pre_docking_pose(scene, 2.0, 0.0)),
    ("axis-4m", pre_docking_pose(scene, 4.0, 0.0)),
    ("offaxis-6m", pre_docking_pose(scene, 6.0, math.radians(45.0))),
    ("facing-away", Pose2(-3.0, 0.0, math.pi)),
]
for name, pose in views:
    img = render(camera, scene, pose)
    visible = block_pixel_count(scene, img)
    write_pgm(out / f"view-{name}.pgm", img)
    small = crop_resize(img, 64)
    write_pgm(out / f"view-{name}-64.pgm", small)
    print(f"{name:>12}: dock covers {visible:6d} px of {img.size}  -> view-{name}.pgm")

print(f"\nwrote full-resolution and 64x64 network inputs to {out}/")
