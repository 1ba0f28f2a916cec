"""Dataset generation: scenes -> poses -> RGB-D, normals, echoes, spectrograms"""
import os
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from const import (C_Orientations, C_ManifestName, C_SplitName, C_SpecStatsName, C_SummaryName,
                   T_Log_SceneGenerated, T_Log_DatasetWritten, T_Log_SplitDone)
from encoding import encoder
from log import log_dataset
from profiling import profile, Scope
from utils import make_rng
from sim.scene import generate_scene, navigable_poses, group_positions, GridSpec
from sim.render import Camera, render_rgbd, depth_to_normals
from sim.acoustics import ListenerModel, make_chirp, simulate_echo
from dsp.stft import stft_log_magnitude
from dataset.core import DatasetError, SplitError, write_manifest, write_json, C_ConfigName
from dataset.models import DatasetRecord, SceneEntry, SplitEntry, SpecStats


class SimulationSetup(namedtuple('SimulationSetup', ['camera', 'listener', 'chirp', 'clip', 'max_order',
                                                     'speed_of_sound', 'convolution', 'win', 'hop', 'nfft'])):
    """Everything needed to turn a pose into its stored views"""
    __slots__ = ()

    @classmethod
    def from_config(cls, cfg):
        a = cfg['acoustics']
        s = cfg['stft']
        chirp = make_chirp(a['chirp_f0'], a['chirp_f1'], a['chirp_duration'], a['sample_rate'])
        return cls(Camera.from_config(cfg['camera']), ListenerModel.from_config(a), chirp, a['clip'],
                   a['max_order'], a['speed_of_sound'], a['convolution'], s['win'], s['hop'], s['nfft'])


def scene_seeds(cfg):
    rng = make_rng(cfg['experiment']['seed'], 'scene-seeds')
    return [int(s) for s in rng.integers(0, 2 ** 62, size=cfg['scenes']['count'])]


def _blob_name(scene_id, position_id, orientation, kind):
    return os.path.join('blobs', 'scene_{0:04d}'.format(scene_id),
                        'pos_{0:04d}_o{1:03d}_{2}.vets'.format(position_id, orientation, kind))


def render_views(setup, scene, pose):
    """All stored arrays for one pose, keyed by blob kind"""
    rgb, depth = render_rgbd(scene, pose, setup.camera)
    normals = depth_to_normals(depth, setup.camera)
    echo = simulate_echo(scene, pose, setup.chirp, setup.clip, setup.listener, setup.max_order,
                         setup.speed_of_sound, setup.convolution)
    spec = stft_log_magnitude(echo, setup.win, setup.hop, setup.nfft)
    return {
        'rgb': rgb,
        'depth': depth,
        'normals': np.concatenate([normals.normals, normals.mask[..., None].astype(np.float32)], axis=-1),
        'echo': echo.stack().astype(np.float32),
        'spec': spec.astype(np.float32),
    }


def _render_position(task):
    # runs in worker processes: writes its own blobs, returns the relative paths
    root, setup, scene, scene_id, position_id, poses = task
    views = {}
    for orientation in C_Orientations:
        paths = {}
        for kind, array in render_views(setup, scene, poses[orientation]).items():
            name = _blob_name(scene_id, position_id, orientation, kind)
            encoder.write(os.path.join(root, name), array)
            paths[kind] = name.replace(os.sep, '/')
        views[str(orientation)] = paths
    return views


def _prepare(root, scene_count):
    try:
        os.makedirs(os.path.join(root, 'scenes'), exist_ok=True)
        for scene_id in range(scene_count):
            os.makedirs(os.path.join(root, 'blobs', 'scene_{0:04d}'.format(scene_id)), exist_ok=True)
        probe = os.path.join(root, '.write_probe')
        with open(probe, 'w'):
            pass
        os.remove(probe)
    except OSError as e:
        raise DatasetError('output path {0} is not writable ({1})'.format(root, e.strerror))


def split_dataset(scene_ids, spec, seed):
    """Scene-level train/val/test split

    `spec` maps each split to a scene count (scenes drawn by a seeded
    permutation) or to an explicit list of scene ids.
    """
    scene_ids = sorted(set(scene_ids))
    names = ('train', 'val', 'test')
    if all(isinstance(spec[n], (list, tuple)) for n in names):
        chosen = {n: [int(s) for s in spec[n]] for n in names}
        flat = [s for n in names for s in chosen[n]]
        if len(flat) != len(set(flat)):
            raise SplitError('splits overlap')
        unknown = sorted(set(flat) - set(scene_ids))
        if unknown:
            raise SplitError('unknown scenes {0}'.format(unknown))
    else:
        counts = [int(spec[n]) for n in names]
        if min(counts) < 0 or sum(counts) > len(scene_ids):
            raise SplitError('{0} scenes requested, {1} available'.format(sum(counts), len(scene_ids)))
        order = [scene_ids[i] for i in make_rng(seed, 'split').permutation(len(scene_ids))]
        chosen, start = {}, 0
        for n, c in zip(names, counts):
            chosen[n] = sorted(order[start:start + c])
            start += c
        if start < len(scene_ids):
            log_dataset.warning('{0} scenes left out of every split'.format(len(scene_ids) - start))
    if not chosen['train']:
        raise SplitError('train split is empty')
    log_dataset.info(T_Log_SplitDone.format(len(chosen['train']), len(chosen['val']), len(chosen['test'])))
    return SplitEntry(int(seed), chosen['train'], chosen['val'], chosen['test'])


def spectrogram_stats(root, records):
    """Per-channel mean / std of raw log spectrograms over `records`"""
    total = np.zeros(2)
    total_sq = np.zeros(2)
    count = 0
    for record in records:
        for orientation in C_Orientations:
            spec = encoder.read(os.path.join(root, record.views[str(orientation)]['spec'])).astype(np.float64)
            total += spec.sum(axis=(1, 2))
            total_sq += (spec ** 2).sum(axis=(1, 2))
            count += spec.shape[1] * spec.shape[2]
    mean = total / count
    std = np.sqrt(np.maximum(total_sq / count - mean ** 2, 0.0))
    std[std < 1e-8] = 1.0
    return SpecStats([float(m) for m in mean], [float(s) for s in std], int(count))


@profile(Scope.Dataset)
def gen_dataset(cfg, out_dir, workers=None):
    """Generate every scene of `cfg` into `out_dir`; returns the manifest records

    Blobs are written by one task per position; the manifest is assembled
    afterwards in (scene, position) order, so the output does not depend on
    the number of workers.
    """
    workers = workers or cfg['dataset']['workers']
    count = cfg['scenes']['count']
    _prepare(out_dir, count)
    setup = SimulationSetup.from_config(cfg)
    grid = GridSpec.from_config(cfg['grid'])

    records, scenes = [], []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for scene_id, seed in enumerate(scene_seeds(cfg)):
            scene = generate_scene(seed, cfg['scenes'])
            scene_path = 'scenes/scene_{0:04d}.json'.format(scene_id)
            with open(os.path.join(out_dir, scene_path), 'w', encoding='utf-8') as f:
                f.write(scene.to_json() + '\n')

            groups = group_positions(navigable_poses(scene, grid))
            tasks = [(out_dir, setup, scene, scene_id, i, poses) for i, (_, poses) in enumerate(groups)]
            views = list(pool.map(_render_position, tasks)) if pool else [_render_position(t) for t in tasks]
            for position_id, ((position, _), view) in enumerate(zip(groups, views)):
                records.append(DatasetRecord(scene_id, position_id, list(position), view))

            scenes.append(SceneEntry(scene_id, seed, scene_path, list(scene.extents), len(scene.obstacles), len(groups)))
            log_dataset.info(T_Log_SceneGenerated.format(scene_id, scene.extents, len(scene.obstacles), 4 * len(groups)))
    finally:
        if pool:
            pool.shutdown()

    write_manifest(os.path.join(out_dir, C_ManifestName), records)
    write_json(os.path.join(out_dir, C_ConfigName), cfg.as_dict())

    split = split_dataset([s.scene_id for s in scenes if s.positions > 0], cfg['split'], cfg['experiment']['seed'])
    write_json(os.path.join(out_dir, C_SplitName), split.to_dict())
    train_records = [r for r in records if r.scene_id in set(split.train)]
    write_json(os.path.join(out_dir, C_SpecStatsName), spectrogram_stats(out_dir, train_records).to_dict())

    views_per_split = {name: 4 * sum(1 for r in records if r.scene_id in set(getattr(split, name)))
                       for name in ('train', 'val', 'test')}
    write_json(os.path.join(out_dir, C_SummaryName), {
        'seed': cfg['experiment']['seed'],
        'scene_count': len(scenes),
        'position_count': len(records),
        'view_count': 4 * len(records),
        'views_per_split': views_per_split,
        'scenes': [s.to_dict() for s in scenes],
    })
    log_dataset.info(T_Log_DatasetWritten.format(out_dir, len(scenes), len(records), 4 * len(records)))
    return records
