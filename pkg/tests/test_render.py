import numpy as np
import pytest

from sim.scene import Scene, Material, Box, AgentPose
from sim.render import Camera, RenderError, render_rgbd, depth_to_normals, ray_box_intersect, cast_rays


def room(obstacles=()):
    walls = tuple(Material(i, 0.9, (0.2 + 0.1 * i, 0.5, 0.5)) for i in range(6))
    return Scene((4.0, 5.0, 3.0), walls, tuple(obstacles), 0)


@pytest.fixture
def cam():
    return Camera(90.0, 16, 16, 10.0)


class TestRender:
    def test_ranges(self, cam):
        rgb, depth = render_rgbd(room(), AgentPose((2.0, 2.5, 1.5), 0), cam)
        assert rgb.shape == (16, 16, 3) and depth.shape == (16, 16)
        assert rgb.dtype == np.float32 and depth.dtype == np.float32
        assert np.all((rgb >= 0) & (rgb <= 1))
        assert np.all((depth > 0) & (depth <= cam.max_depth))

    def test_planar_depth_of_facing_wall(self, cam):
        _, depth = render_rgbd(room(), AgentPose((2.0, 2.5, 1.5), 0), cam)
        # middle rows all land on the x = 4 wall, 2 m ahead
        np.testing.assert_allclose(depth[6:10], 2.0, atol=1e-5)

    def test_turning_changes_view(self, cam):
        _, ahead = render_rgbd(room(), AgentPose((1.0, 2.5, 1.5), 0), cam)
        _, behind = render_rgbd(room(), AgentPose((1.0, 2.5, 1.5), 180), cam)
        np.testing.assert_allclose(ahead[8, 8], 3.0, atol=1e-5)
        np.testing.assert_allclose(behind[8, 8], 1.0, atol=1e-5)

    def test_depth_clamped(self):
        _, depth = render_rgbd(room(), AgentPose((2.0, 2.5, 1.5), 0), Camera(90.0, 16, 16, 1.0))
        assert depth.max() <= 1.0

    def test_obstacle_occludes_wall(self, cam):
        box = Box((2.8, 2.0, 0.02), (3.2, 3.0, 2.5), Material(0, 0.5, (1.0, 0.0, 0.0)))
        rgb, depth = render_rgbd(room([box]), AgentPose((2.0, 2.5, 1.5), 0), cam)
        np.testing.assert_allclose(depth[8, 8], 0.8, atol=1e-5)
        assert rgb[8, 8, 0] > 0.9 and rgb[8, 8, 1] == 0.0

    def test_pose_inside_geometry(self, cam):
        box = Box((1.0, 1.0, 0.02), (3.0, 3.0, 2.5), Material(0, 0.5, (1.0, 0.0, 0.0)))
        with pytest.raises(RenderError):
            render_rgbd(room([box]), AgentPose((2.0, 2.0, 1.5), 0), cam)


class TestNormals:
    def test_planar_wall(self, cam):
        _, depth = render_rgbd(room(), AgentPose((2.0, 2.5, 1.5), 0), cam)
        normals = depth_to_normals(depth, cam)
        assert normals.mask[4:12, 1:15].all()
        np.testing.assert_allclose(normals.normals[4:12, 1:15], np.broadcast_to([0, 0, -1], (8, 14, 3)), atol=1e-5)

    def test_floor_seen_by_level_camera(self):
        cam = Camera(90.0, 64, 64, 10.0)
        _, depth = render_rgbd(room(), AgentPose((2.0, 2.5, 0.5), 0), cam)
        normals = depth_to_normals(depth, cam)
        # rows 50+ look down at the floor well before the far wall
        floor = (slice(50, 63), slice(1, 63))
        assert normals.mask[floor].all()
        np.testing.assert_allclose(normals.normals[floor], np.broadcast_to([0, -1, 0], (13, 62, 3)), atol=1e-4)

    def test_border_masked(self, cam):
        normals = depth_to_normals(np.full((16, 16), 3.0, dtype=np.float32), cam)
        assert not normals.mask[0].any() and not normals.mask[-1].any()
        assert not normals.mask[:, 0].any() and not normals.mask[:, -1].any()
        assert normals.mask[1:-1, 1:-1].all()

    def test_unit_length(self, cam):
        _, depth = render_rgbd(room(), AgentPose((1.0, 1.0, 1.5), 45), cam)
        normals = depth_to_normals(depth, cam)
        lengths = np.linalg.norm(normals.normals[normals.mask], axis=-1)
        np.testing.assert_allclose(lengths, 1.0, atol=1e-4)

    def test_depth_jump_masked(self, cam):
        depth = np.full((16, 16), 3.0, dtype=np.float32)
        depth[:, 8:] = 5.0
        normals = depth_to_normals(depth, cam)
        assert not normals.mask[1:-1, 7:9].any()


def test_ray_box_slab():
    origin = np.zeros(3)
    dirs = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    t_near, t_far, axis = ray_box_intersect(origin, dirs, (1.0, -0.5, -0.5), (2.0, 0.5, 0.5))
    assert t_near[0] == pytest.approx(1.0) and t_far[0] == pytest.approx(2.0) and axis[0] == 0
    assert t_near[1] > t_far[1]


def random_scene(rng):
    extents = tuple(float(e) for e in rng.uniform(3.0, 8.0, 3))
    walls = tuple(Material(i, 0.9, tuple(float(c) for c in rng.uniform(0, 1, 3))) for i in range(6))
    boxes = []
    for k in range(3):
        low = rng.uniform(0.2, np.array(extents) - 1.2)
        high = low + rng.uniform(0.3, 1.0, 3)
        boxes.append(Box(tuple(float(v) for v in low), tuple(float(v) for v in high),
                         Material(k, 0.5, tuple(float(c) for c in rng.uniform(0, 1, 3)))))
    return Scene(extents, walls, tuple(boxes), 0)


def nearest_hit(scene, origin, d):
    """One ray at a time: walls first, then every box by its slabs"""
    best, face, albedo = np.inf, None, None
    for i in range(3):
        t = ((scene.extents[i] if d[i] > 0 else 0.0) - origin[i]) / d[i]
        if t < best:
            best, face, albedo = t, i, scene.wall_material(i, d[i] > 0).albedo
    for box in scene.obstacles:
        near, far = -np.inf, np.inf
        for i in range(3):
            t1 = (box.min[i] - origin[i]) / d[i]
            t2 = (box.max[i] - origin[i]) / d[i]
            near, far = max(near, min(t1, t2)), min(far, max(t1, t2))
        if near <= far and 0 < near < best:
            point = origin + near * d
            best, albedo = near, box.material.albedo
            face = int(np.argmin([min(abs(point[i] - box.min[i]), abs(point[i] - box.max[i])) for i in range(3)]))
    normal = np.zeros(3)
    normal[face] = -np.sign(d[face])
    return best, normal, albedo


@pytest.mark.parametrize('seed', range(5))
def test_cast_rays_matches_single_ray_loop(seed):
    rng = np.random.default_rng(seed)
    scene = random_scene(rng)
    origin = rng.uniform(0.1, np.array(scene.extents) - 0.1)
    while not scene.is_free(origin, 0.05):
        origin = rng.uniform(0.1, np.array(scene.extents) - 0.1)
    centers = np.array([(np.array(b.min) + np.array(b.max)) / 2.0 for b in scene.obstacles])
    dirs = np.concatenate([rng.standard_normal((200, 3)), centers - origin])
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)

    t, normals, albedo = cast_rays(scene, origin, dirs)
    for k, d in enumerate(dirs):
        expected_t, expected_normal, expected_albedo = nearest_hit(scene, origin, d)
        assert t[k] == pytest.approx(expected_t, rel=1e-9)
        np.testing.assert_array_equal(normals[k], expected_normal)
        np.testing.assert_allclose(albedo[k], expected_albedo)
    # rays aimed at box centers stop on an obstacle
    walls = [m.albedo for m in scene.wall_materials]
    assert not any(np.allclose(a, w) for a in albedo[-3:] for w in walls)
