import math
from collections import namedtuple

import numpy as np

from utils import LabError
from const import C_NormalDiscontinuity, T_RenderError


class RenderError(LabError):
    def __init__(self, pose):
        self.pose = pose

    def __str__(self):
        return T_RenderError.format(self.pose)


class Camera(namedtuple('Camera', ['horizontal_fov', 'width', 'height', 'max_depth'])):
    """Pinhole camera with square pixels: x right, y down, z forward"""
    __slots__ = ()

    @classmethod
    def from_config(cls, camera):
        return cls(float(camera['fov']), int(camera['width']), int(camera['height']), float(camera['max_depth']))

    @property
    def focal(self):
        return (self.width / 2.0) / math.tan(math.radians(self.horizontal_fov) / 2.0)

    def pixel_offsets(self):
        """Per-pixel (u, v) offsets from the optical axis divided by the focal length"""
        f = self.focal
        u = (np.arange(self.width) + 0.5 - self.width / 2.0) / f
        v = (np.arange(self.height) + 0.5 - self.height / 2.0) / f
        return np.meshgrid(u, v)

    def rays(self):
        """Camera-frame ray directions (H, W, 3) with unit z component

        Hit parameter t along such a ray is directly the planar z-depth.
        """
        u, v = self.pixel_offsets()
        return np.stack([u, v, np.ones_like(u)], axis=-1)


NormalMap = namedtuple('NormalMap', ['normals', 'mask'])


def ray_box_intersect(origin, dirs, box_min, box_max):
    """Slab test of rays origin + t * dirs against one box

    Returns (t_near, t_far, entry_axis) arrays; a ray hits when t_near <= t_far.
    """
    with np.errstate(divide='ignore', invalid='ignore'):
        inv = 1.0 / dirs
        t1 = (np.asarray(box_min) - origin) * inv
        t2 = (np.asarray(box_max) - origin) * inv
    t_lo = np.fmin(t1, t2)
    t_hi = np.fmax(t1, t2)
    t_near = np.max(t_lo, axis=-1)
    t_far = np.min(t_hi, axis=-1)
    return t_near, t_far, np.argmax(t_lo, axis=-1)


def _room_exit(origin, dirs, extents):
    with np.errstate(divide='ignore', invalid='ignore'):
        t = np.where(dirs > 0, (np.asarray(extents) - origin) / dirs,
                     np.where(dirs < 0, -origin / dirs, np.inf))
    axis = np.argmin(t, axis=-1)
    return np.take_along_axis(t, axis[:, None], axis=-1)[:, 0], axis


def cast_rays(scene, origin, dirs):
    """Nearest hit of every ray: (t, world normal facing the ray, albedo)"""
    n = dirs.shape[0]
    origin = np.asarray(origin, dtype=np.float64)
    rows = np.arange(n)

    t, axis = _room_exit(origin, dirs, scene.extents)
    high = dirs[rows, axis] > 0
    albedo_table = np.array([m.albedo for m in scene.wall_materials])
    albedo = albedo_table[2 * axis + high.astype(np.int64)]

    for box in scene.obstacles:
        t_near, t_far, entry = ray_box_intersect(origin, dirs, box.min, box.max)
        hit = (t_near <= t_far) & (t_near > 0) & (t_near < t)
        if np.any(hit):
            t = np.where(hit, t_near, t)
            axis = np.where(hit, entry, axis)
            albedo[hit] = box.material.albedo

    normals = np.zeros_like(dirs)
    normals[rows, axis] = -np.sign(dirs[rows, axis])
    return t, normals, albedo


def render_rgbd(scene, pose, cam):
    """One primary ray per pixel; returns (rgb H x W x 3, planar depth H x W)

    RGB is albedo times |cos| between the hit normal and the ray (headlight
    shading, no shadows). Depth is clamped to the camera's max_depth.
    """
    if not scene.is_free(pose.position):
        raise RenderError(pose)

    cam_dirs = cam.rays().reshape(-1, 3)
    dirs = cam_dirs @ pose.camera_axes()
    t, normals, albedo = cast_rays(scene, pose.position, dirs)

    unit = dirs / np.linalg.norm(dirs, axis=-1, keepdims=True)
    shade = np.abs(np.sum(normals * unit, axis=-1))
    rgb = np.clip(albedo * shade[:, None], 0.0, 1.0)
    depth = np.minimum(t, cam.max_depth)

    shape = (cam.height, cam.width)
    return rgb.reshape(shape + (3,)).astype(np.float32), depth.reshape(shape).astype(np.float32)


def back_project(depth, cam):
    u, v = cam.pixel_offsets()
    depth = np.asarray(depth, dtype=np.float64)
    return np.stack([u * depth, v * depth, depth], axis=-1)


def depth_to_normals(depth, cam):
    """Camera-frame normals from central-difference tangents of the back-projected depth

    Border pixels and pixels next to a depth jump above 0.1 m are masked out.
    Normals face the camera.
    """
    depth = np.asarray(depth, dtype=np.float64)
    h, w = depth.shape
    points = back_project(depth, cam)

    du = points[1:-1, 2:] - points[1:-1, :-2]
    dv = points[2:, 1:-1] - points[:-2, 1:-1]
    n = np.cross(du, dv)
    norm = np.linalg.norm(n, axis=-1, keepdims=True)
    n = np.divide(n, norm, out=np.zeros_like(n), where=norm > 1e-12)
    facing = np.sum(n * points[1:-1, 1:-1], axis=-1) > 0
    n[facing] *= -1.0

    center = depth[1:-1, 1:-1]
    jump = np.maximum.reduce([np.abs(depth[1:-1, 2:] - center), np.abs(depth[1:-1, :-2] - center),
                              np.abs(depth[2:, 1:-1] - center), np.abs(depth[:-2, 1:-1] - center)])
    interior = (jump <= C_NormalDiscontinuity) & (norm[..., 0] > 1e-12)

    normals = np.zeros((h, w, 3))
    mask = np.zeros((h, w), dtype=bool)
    normals[1:-1, 1:-1] = np.where(interior[..., None], n, 0.0)
    mask[1:-1, 1:-1] = interior
    return NormalMap(normals.astype(np.float32), mask)
