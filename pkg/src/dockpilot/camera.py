"""Synthetic monochrome fisheye camera.

Equidistant lens model: image radius = focal_coefficient * incidence angle,
with the focal coefficient fixed by the requirement that the configured
diagonal field of view lands exactly on the image half-diagonal. The camera
sits level above the water plane, so the horizon is the horizontal line
through the principal point: upper half sky, lower half water. Dock blocks
are drawn as flat-shaded polygons with near-plane clipping and edge
subdivision (straight 3D edges curve under the fisheye).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

from .scene import DockScene
from .se2 import Pose2, compose

_Z_NEAR = 0.01  # meters; forward clip plane for polygon projection
_SUBPIXEL_SHIFT = 3  # cv2.fillPoly fixed-point bits
_EDGE_STEP_RAD = math.radians(2.0)  # max angular span per projected edge segment


@dataclass(frozen=True)
class CameraModel:
    """Fisheye camera intrinsics and mounting."""

    width: int = 848
    height: int = 800
    diagonal_fov_deg: float = 173.0
    mount: Pose2 = Pose2(0.45, 0.0, 0.0)  # camera pose in the base frame
    height_above_water: float = 0.25

    def __post_init__(self):
        if self.width < 2 or self.height < 2:
            raise ValueError("image must be at least 2x2")
        if not 0.0 < self.diagonal_fov_deg < 360.0:
            raise ValueError("diagonal FOV must be in (0, 360) degrees")

    @property
    def cx(self) -> float:
        return self.width / 2.0

    @property
    def cy(self) -> float:
        return self.height / 2.0

    @property
    def max_incidence(self) -> float:
        """Half the diagonal FOV, radians."""
        return math.radians(self.diagonal_fov_deg) / 2.0

    @property
    def focal_coefficient(self) -> float:
        """Pixels per radian of incidence."""
        half_diag = math.hypot(self.width / 2.0, self.height / 2.0)
        return half_diag / self.max_incidence


def project_point(camera: CameraModel, point_cam) -> tuple[float, float] | None:
    """Map a camera-frame 3D point (x right, y down, z forward) to pixels.

    Returns None when the incidence angle exceeds half the diagonal FOV.
    """
    x, y, z = float(point_cam[0]), float(point_cam[1]), float(point_cam[2])
    lateral = math.hypot(x, y)
    if lateral == 0.0 and z == 0.0:
        raise ValueError("cannot project the camera origin")
    theta = math.atan2(lateral, z)
    if theta > camera.max_incidence:
        return None
    r = camera.focal_coefficient * theta
    if lateral == 0.0:
        return camera.cx, camera.cy
    return camera.cx + r * x / lateral, camera.cy + r * y / lateral


def _project_array(camera: CameraModel, pts: np.ndarray) -> np.ndarray:
    """Vectorized projection of (N,3) camera-frame points with z > 0.

    No FOV cut here: out-of-view vertices land outside the raster and the
    polygon fill clips them. z > 0 keeps incidence below pi/2, bounding
    the coordinates.
    """
    lateral = np.hypot(pts[:, 0], pts[:, 1])
    theta = np.arctan2(lateral, pts[:, 2])
    r = camera.focal_coefficient * theta
    safe = np.where(lateral > 0.0, lateral, 1.0)
    u = camera.cx + r * pts[:, 0] / safe
    v = camera.cy + r * pts[:, 1] / safe
    return np.stack([u, v], axis=1)


def _clip_near(poly: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman clip of an (N,3) polygon against z >= _Z_NEAR."""
    out = []
    n = len(poly)
    for i in range(n):
        a = poly[i]
        b = poly[(i + 1) % n]
        a_in = a[2] >= _Z_NEAR
        b_in = b[2] >= _Z_NEAR
        if a_in:
            out.append(a)
        if a_in != b_in:
            t = (_Z_NEAR - a[2]) / (b[2] - a[2])
            out.append(a + t * (b - a))
    return np.array(out) if len(out) >= 3 else np.empty((0, 3))


def _subdivide(poly: np.ndarray) -> np.ndarray:
    """Insert points along edges so each segment spans a small view angle.

    Interpolating in 3D and projecting pointwise traces the exact fisheye
    image of a straight edge.
    """
    pieces = []
    n = len(poly)
    dirs = poly / np.linalg.norm(poly, axis=1, keepdims=True)
    for i in range(n):
        j = (i + 1) % n
        span = math.acos(float(np.clip(dirs[i] @ dirs[j], -1.0, 1.0)))
        steps = min(24, max(1, int(math.ceil(span / _EDGE_STEP_RAD))))
        ts = np.linspace(0.0, 1.0, steps, endpoint=False)
        pieces.append(poly[i] + ts[:, None] * (poly[j] - poly[i]))
    return np.concatenate(pieces, axis=0)


def _camera_world_frame(camera: CameraModel, usv_pose: Pose2):
    cam2d = compose(usv_pose, camera.mount)
    c, s = math.cos(cam2d.theta), math.sin(cam2d.theta)
    origin = np.array([cam2d.x, cam2d.y, camera.height_above_water])
    # rows: camera X (right), Y (down), Z (forward) expressed in world axes
    rot = np.array([
        [s, -c, 0.0],
        [0.0, 0.0, -1.0],
        [c, s, 0.0],
    ])
    return origin, rot


def _block_faces_world(scene: DockScene) -> list[np.ndarray]:
    """All renderable faces of all blocks as world-frame (4,3) quads."""
    faces = []
    h = scene.block_height
    for corners in scene.block_corners_world():
        top = np.column_stack([corners, np.full(4, h)])
        faces.append(top)
        for i in range(4):
            j = (i + 1) % 4
            a, b = corners[i], corners[j]
            faces.append(np.array([
                [a[0], a[1], 0.0],
                [b[0], b[1], 0.0],
                [b[0], b[1], h],
                [a[0], a[1], h],
            ]))
    return faces


def render(camera: CameraModel, scene: DockScene, usv_pose: Pose2) -> np.ndarray:
    """Deterministic fisheye raster of the scene from a vessel pose.

    Returns a (height, width) uint8 array.
    """
    img = np.empty((camera.height, camera.width), dtype=np.uint8)
    horizon_row = int(math.ceil(camera.cy - 0.5))  # first row whose center is below the horizon
    horizon_row = min(max(horizon_row, 0), camera.height)
    img[:horizon_row, :] = scene.sky_brightness
    img[horizon_row:, :] = scene.water_brightness

    origin, rot = _camera_world_frame(camera, usv_pose)
    polys = []
    for face in _block_faces_world(scene):
        cam_pts = (face - origin) @ rot.T
        if cam_pts[:, 2].max() < _Z_NEAR:
            continue
        clipped = _clip_near(cam_pts)
        if len(clipped) == 0:
            continue
        pix = _project_array(camera, _subdivide(clipped))
        scaled = np.round(pix * (1 << _SUBPIXEL_SHIFT)).astype(np.int32)
        polys.append(scaled)
    if polys:
        cv2.fillPoly(img, polys, color=int(scene.block_brightness),
                     lineType=cv2.LINE_8, shift=_SUBPIXEL_SHIFT)
    return img


def block_pixel_count(scene: DockScene, img: np.ndarray) -> int:
    """Pixels at exactly the block brightness (render-time visibility proxy)."""
    return int(np.count_nonzero(img == scene.block_brightness))


def _box_reduce_axis(arr: np.ndarray, n_out: int, axis: int) -> np.ndarray:
    """Exact box-average resample along one axis (n_in -> n_out, n_out <= n_in).

    Uses the linearly interpolated prefix sum, which integrates a
    piecewise-constant signal exactly over fractional pixel boundaries.
    """
    arr = np.moveaxis(arr, axis, 0)
    n_in = arr.shape[0]
    prefix = np.concatenate([np.zeros((1,) + arr.shape[1:]), np.cumsum(arr, axis=0)], axis=0)
    bounds = np.arange(n_out + 1) * (n_in / n_out)
    idx = np.clip(bounds.astype(np.int64), 0, n_in - 1)
    frac = bounds - idx
    vals = prefix[idx] + frac.reshape((-1,) + (1,) * (arr.ndim - 1)) * (prefix[idx + 1] - prefix[idx])
    out = (vals[1:] - vals[:-1]) * (n_out / n_in)
    return np.moveaxis(out, 0, axis)


def crop_resize(img: np.ndarray, side: int) -> np.ndarray:
    """Center-crop to the largest square, then exact area-average downsample."""
    if side < 1:
        raise ValueError("output side must be positive")
    h, w = img.shape
    s = min(h, w)
    if side > s:
        raise ValueError(f"requested side {side} exceeds source square {s}")
    y0 = (h - s) // 2
    x0 = (w - s) // 2
    square = img[y0:y0 + s, x0:x0 + s].astype(np.float64)
    reduced = _box_reduce_axis(_box_reduce_axis(square, side, 0), side, 1)
    return np.clip(np.rint(reduced), 0, 255).astype(np.uint8)


def write_pgm(path, img: np.ndarray) -> None:
    """Binary 8-bit PGM (P5)."""
    if img.dtype != np.uint8 or img.ndim != 2:
        raise ValueError("expected a 2-D uint8 image")
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if not data.startswith(b"P5"):
        raise ValueError(f"{path}: not a binary PGM file")
    # header = magic, width, height, maxval tokens; '#' starts a comment
    tokens, pos = [], 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(int(data[start:pos]))
    pos += 1  # single whitespace after maxval
    w, h, maxval = tokens
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    pixels = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=pos)
    return pixels.reshape(h, w).copy()
