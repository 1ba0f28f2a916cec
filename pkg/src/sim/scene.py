import json
import math
from collections import namedtuple

import numpy as np

from config import ConfigError
from const import C_Orientations, C_WallNames, T_SceneError
from log import log_sim
from utils import LabError, make_rng


class SceneError(LabError):
    def __init__(self, reason):
        self.reason = reason

    def __str__(self):
        return T_SceneError.format(self.reason)


class Material(namedtuple('Material', ['id', 'reflection', 'albedo'])):
    """Acoustic amplitude reflection coefficient and RGB albedo of a surface"""
    __slots__ = ()

    def to_dict(self):
        return {'id': self.id, 'reflection': self.reflection, 'albedo': list(self.albedo)}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d['id']), float(d['reflection']), tuple(float(c) for c in d['albedo']))


class Box(namedtuple('Box', ['min', 'max', 'material'])):
    __slots__ = ()

    def contains(self, point):
        return all(self.min[i] < point[i] < self.max[i] for i in range(3))

    def distance(self, point):
        # euclidean distance from a point to the closed box (0 inside)
        d = [max(self.min[i] - point[i], 0.0, point[i] - self.max[i]) for i in range(3)]
        return math.sqrt(sum(x * x for x in d))

    def overlaps(self, other, gap=0.0):
        return all(self.min[i] - gap < other.max[i] and other.min[i] - gap < self.max[i] for i in range(3))

    def to_dict(self):
        return {'min': list(self.min), 'max': list(self.max), 'material': self.material.to_dict()}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(float(v) for v in d['min']), tuple(float(v) for v in d['max']), Material.from_dict(d['material']))


class Scene(namedtuple('Scene', ['extents', 'wall_materials', 'obstacles', 'seed'])):
    """Shoebox room [0, Lx] x [0, Ly] x [0, Lz] with box obstacles

    wall_materials are ordered -x, +x, -y, +y, floor, ceiling.
    """
    __slots__ = ()

    def wall_material(self, axis, high):
        return self.wall_materials[2 * axis + (1 if high else 0)]

    def inside_room(self, point):
        return all(0.0 < point[i] < self.extents[i] for i in range(3))

    def is_free(self, point, clearance=0.0):
        """Point inside the room, at least `clearance` from every wall and obstacle"""
        for i in range(3):
            if point[i] < clearance or point[i] > self.extents[i] - clearance:
                return False
            if clearance == 0.0 and not 0.0 < point[i] < self.extents[i]:
                return False
        for box in self.obstacles:
            if box.contains(point) or box.distance(point) < clearance:
                return False
        return True

    def to_dict(self):
        return {'extents': list(self.extents),
                'wall_materials': {name: m.to_dict() for name, m in zip(C_WallNames, self.wall_materials)},
                'obstacles': [b.to_dict() for b in self.obstacles],
                'seed': self.seed}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(float(v) for v in d['extents']),
                   tuple(Material.from_dict(d['wall_materials'][name]) for name in C_WallNames),
                   tuple(Box.from_dict(b) for b in d['obstacles']),
                   int(d['seed']))

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except (KeyError, TypeError, ValueError) as e:
            raise SceneError('malformed scene description ({0})'.format(e))


class AgentPose(namedtuple('AgentPose', ['position', 'orientation'])):
    """Sensor position in meters and azimuth in degrees

    Azimuth grows clockwise seen from above (z up): 0 faces +x, 90 faces -y.
    Turning right therefore adds 90 degrees.
    """
    __slots__ = ()

    @property
    def forward(self):
        a = math.radians(self.orientation)
        return np.array([math.cos(a), -math.sin(a), 0.0])

    @property
    def right(self):
        a = math.radians(self.orientation + 90)
        return np.array([math.cos(a), -math.sin(a), 0.0])

    @property
    def down(self):
        return np.array([0.0, 0.0, -1.0])

    def camera_axes(self):
        """World-frame rows of the camera frame: x right, y down, z forward"""
        return np.stack([self.right, self.down, self.forward])


class GridSpec(namedtuple('GridSpec', ['spacing', 'clearance', 'sensor_height'])):
    __slots__ = ()

    @classmethod
    def from_config(cls, grid):
        return cls(float(grid['spacing']), float(grid['clearance']), float(grid['sensor_height']))


def _range(cfg, key):
    lo, hi = cfg[key]
    if lo > hi:
        raise ConfigError('scenes.' + key, 'range is empty or inverted')
    return lo, hi


def _draw_material(rng, palette):
    i = int(rng.integers(len(palette)))
    m = palette[i]
    return Material(i, float(m['reflection']), tuple(float(c) for c in m['albedo']))


def _place_obstacle(rng, extents, obstacles, cfg, palette):
    floor_gap = float(cfg['floor_gap'])
    gap = float(cfg['obstacle_gap'])
    size_lo, size_hi = _range(cfg, 'obstacle_size')
    height_lo, height_hi = _range(cfg, 'obstacle_height')
    height_hi = min(height_hi, extents[2] - floor_gap - gap)
    if height_hi < height_lo:
        return None

    for _ in range(int(cfg['max_attempts'])):
        size = [round(float(rng.uniform(size_lo, size_hi)), 2) for _ in range(2)]
        height = round(float(rng.uniform(height_lo, height_hi)), 2)
        if any(size[i] > extents[i] - 2 * gap for i in range(2)):
            continue
        corner, far = [], []
        for i in range(2):
            hi = extents[i] - gap - size[i]
            # rounding may push a box flush against (or through) the wall
            c = min(max(round(float(rng.uniform(gap, hi)), 2), gap), hi)
            corner.append(c)
            far.append(min(round(c + size[i], 2), extents[i] - gap))
        box = Box((corner[0], corner[1], floor_gap), (far[0], far[1], min(round(floor_gap + height, 2), extents[2] - gap)),
                  _draw_material(rng, palette))
        if not any(box.overlaps(other, gap) for other in obstacles):
            return box
    return None


def generate_scene(seed, cfg):
    """Procedural shoebox room; a pure function of (seed, cfg)

    cfg is the `scenes` configuration section (or an equivalent dict).
    """
    ranges = [_range(cfg, key) for key in ('room_x', 'room_y', 'room_z')]
    count_lo, count_hi = _range(cfg, 'obstacles')
    palette = cfg['materials']
    if len(palette) == 0:
        raise ConfigError('scenes.materials', 'palette is empty')

    rng = make_rng(seed, 'scene')
    extents = tuple(round(float(rng.uniform(lo, hi)), 2) for lo, hi in ranges)
    walls = tuple(_draw_material(rng, palette) for _ in C_WallNames)

    wanted = int(rng.integers(int(count_lo), int(count_hi) + 1))
    obstacles = []
    for _ in range(wanted):
        box = _place_obstacle(rng, extents, obstacles, cfg, palette)
        if box is None:
            log_sim.debug('scene {0}: could not place obstacle {1}/{2}'.format(seed, len(obstacles) + 1, wanted))
            break
        obstacles.append(box)

    return Scene(extents, walls, tuple(obstacles), int(seed))


def _axis_points(length, grid):
    points = []
    k = 0
    while True:
        v = round(grid.clearance + k * grid.spacing, 9)
        if v > length - grid.clearance + 1e-9:
            return points
        points.append(v)
        k += 1


def navigable_poses(scene, grid):
    """Grid positions at sensor height with clearance to all geometry, 4 orientations each

    Ordered row-major by x then y, orientation ascending.
    """
    z = grid.sensor_height
    if z < grid.clearance or z > scene.extents[2] - grid.clearance:
        return []

    poses = []
    for x in _axis_points(scene.extents[0], grid):
        for y in _axis_points(scene.extents[1], grid):
            p = (x, y, z)
            if not scene.is_free(p, grid.clearance):
                continue
            for o in C_Orientations:
                poses.append(AgentPose(p, o))

    return poses


def group_positions(poses):
    """Group an ordered pose list into [(position, {orientation: pose})]"""
    groups = []
    for pose in poses:
        if not groups or groups[-1][0] != pose.position:
            groups.append((pose.position, {}))
        groups[-1][1][pose.orientation] = pose
    return groups
