import itertools
from collections import namedtuple

import numpy as np

from utils import LabError
from const import (C_SpeedOfSound, C_HeadRadius, C_ShadowFloor,
                   T_AliasingError, T_ChirpError, T_InvalidOrder, T_SourceOutsideRoom)
from dsp.convolution import convolve
from sim.render import ray_box_intersect


class AliasingError(LabError):
    def __init__(self, f1, nyquist):
        self.f1 = f1
        self.nyquist = nyquist

    def __str__(self):
        return T_AliasingError.format(self.f1, self.nyquist)


class ChirpError(LabError):
    def __init__(self, f0, f1, duration):
        self.f0 = f0
        self.f1 = f1
        self.duration = duration

    def __str__(self):
        return T_ChirpError.format(self.f0, self.f1, self.duration)


class InvalidOrder(LabError):
    def __init__(self, order):
        self.order = order

    def __str__(self):
        return T_InvalidOrder.format(self.order)


class SourceOutsideRoom(LabError):
    def __init__(self, position):
        self.position = position

    def __str__(self):
        return T_SourceOutsideRoom.format(self.position)


Waveform = namedtuple('Waveform', ['samples', 'sample_rate'])

ImageSourceArrival = namedtuple('ImageSourceArrival', ['virtual_position', 'order', 'amplitude'])


class ListenerModel(namedtuple('ListenerModel', ['head_radius', 'shadow_floor'])):
    """Analytic two-ear head: ears sit at +-head_radius along the pose's lateral axis"""
    __slots__ = ()

    @classmethod
    def from_config(cls, acoustics):
        return cls(float(acoustics['head_radius']), float(acoustics['shadow_floor']))

    def ears(self, pose):
        """[(position, outward axis)] for the left then the right ear"""
        center = np.asarray(pose.position, dtype=np.float64)
        right = pose.right
        return [(center - self.head_radius * right, -right), (center + self.head_radius * right, right)]

    def shadow(self, cos_phi):
        return self.shadow_floor + (1.0 - self.shadow_floor) * (1.0 + cos_phi) / 2.0


DEFAULT_LISTENER = ListenerModel(C_HeadRadius, C_ShadowFloor)


class BinauralWaveform(namedtuple('BinauralWaveform', ['left', 'right', 'sample_rate'])):
    __slots__ = ()

    def stack(self):
        return np.stack([self.left, self.right])

    @classmethod
    def from_stack(cls, stacked, sample_rate):
        return cls(np.asarray(stacked[0], dtype=np.float64), np.asarray(stacked[1], dtype=np.float64), sample_rate)


def make_chirp(f0, f1, duration, sr):
    """Linear sweep sin(2 pi (f0 t + (f1 - f0) t^2 / 2T)) sampled at sr"""
    if f1 >= sr / 2.0:
        raise AliasingError(f1, sr / 2.0)
    if not 0 < f0 < f1 or duration <= 0:
        raise ChirpError(f0, f1, duration)
    n = int(round(duration * sr))
    t = np.arange(n) / float(sr)
    samples = np.sin(2.0 * np.pi * (f0 * t + (f1 - f0) * t * t / (2.0 * duration)))
    return Waveform(samples, sr)


def _axis_images(source, length, max_order):
    # (coordinate, reflections on the low wall, reflections on the high wall)
    images = []
    for n in range(-max_order, max_order + 1):
        for p in (0, 1):
            if abs(2 * n - p) > max_order:
                continue
            coord = 2 * n * length + (-source if p else source)
            images.append((coord, abs(n - p), abs(n)))
    return images


def _occluded(scene, virtual, receivers):
    for ear in receivers:
        segment = np.asarray(ear, dtype=np.float64) - virtual
        for box in scene.obstacles:
            t_near, t_far, _ = ray_box_intersect(virtual, segment[None, :], box.min, box.max)
            if t_near[0] <= t_far[0] and t_far[0] > 0 and t_near[0] < 1:
                return True
    return False


def compute_image_sources(scene, source, max_order, receivers=None):
    """Shoebox mirror expansion up to `max_order` reflections

    Amplitude is the product of the reflection coefficients of the walls
    hit. Arrivals whose straight path to any receiver crosses an obstacle
    are dropped; receivers default to the source itself.
    """
    if max_order < 0:
        raise InvalidOrder(max_order)
    if not scene.inside_room(source):
        raise SourceOutsideRoom(source)
    receivers = [source] if receivers is None else receivers

    per_axis = [_axis_images(source[i], scene.extents[i], max_order) for i in range(3)]
    beta = [(scene.wall_material(i, False).reflection, scene.wall_material(i, True).reflection) for i in range(3)]

    arrivals = []
    for combo in itertools.product(*per_axis):
        order = sum(low + high for _, low, high in combo)
        if order > max_order:
            continue
        amplitude = 1.0
        for i, (_, low, high) in enumerate(combo):
            amplitude *= beta[i][0] ** low * beta[i][1] ** high
        virtual = np.array([c for c, _, _ in combo])
        if order > 0 and scene.obstacles and _occluded(scene, virtual, receivers):
            continue
        arrivals.append(ImageSourceArrival(tuple(float(c) for c in virtual), order, float(amplitude)))

    arrivals.sort(key=lambda a: (a.order,) + a.virtual_position)
    return arrivals


def _place(buffer, delays, gains):
    base = np.floor(delays).astype(np.int64)
    frac = delays - base
    for index, weight in ((base, gains * (1.0 - frac)), (base + 1, gains * frac)):
        keep = (index >= 0) & (index < len(buffer))
        np.add.at(buffer, index[keep], weight[keep])


def synthesize_binaural_rir(arrivals, listener, pose, sr, length, speed_of_sound=C_SpeedOfSound):
    """Per-ear impulse response from image-source arrivals

    Each arrival lands at r / c * sr samples (linear-interpolated fractional
    delay) with gain amplitude / r * shadow(phi), r clamped to head_radius.
    """
    buffers = [np.zeros(length), np.zeros(length)]
    if not arrivals:
        return BinauralWaveform(buffers[0], buffers[1], sr)

    positions = np.array([a.virtual_position for a in arrivals])
    amplitudes = np.array([a.amplitude for a in arrivals])
    for buffer, (ear, outward) in zip(buffers, listener.ears(pose)):
        vec = positions - ear
        dist = np.linalg.norm(vec, axis=-1)
        r = np.maximum(dist, listener.head_radius)
        direction = np.divide(vec, dist[:, None], out=np.zeros_like(vec), where=dist[:, None] > 0)
        gains = amplitudes / r * listener.shadow(direction @ outward)
        _place(buffer, r / speed_of_sound * sr, gains)
    return BinauralWaveform(buffers[0], buffers[1], sr)


def simulate_echo(scene, pose, chirp, clip, listener=DEFAULT_LISTENER, max_order=3,
                  speed_of_sound=C_SpeedOfSound, method='fft'):
    """Binaural echo of a chirp emitted at the head center, truncated to `clip` seconds

    The clip starts at emission time.
    """
    sr = chirp.sample_rate
    n = int(round(clip * sr))
    ears = [ear for ear, _ in listener.ears(pose)]
    arrivals = compute_image_sources(scene, tuple(pose.position), max_order, receivers=ears)
    rir = synthesize_binaural_rir(arrivals, listener, pose, sr, n, speed_of_sound)
    left = convolve(rir.left, chirp.samples, method)[:n]
    right = convolve(rir.right, chirp.samples, method)[:n]
    return BinauralWaveform(left, right, sr)


def echo_energy(arrivals, listener, pose, sr, length, speed_of_sound=C_SpeedOfSound):
    """Sum of squares of the reflected (order >= 1) part of the binaural impulse response"""
    reflected = [a for a in arrivals if a.order >= 1]
    rir = synthesize_binaural_rir(reflected, listener, pose, sr, length, speed_of_sound)
    return float(np.sum(rir.left ** 2) + np.sum(rir.right ** 2))
