import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'src'))

from config import build_config  # noqa: E402
from dataset.core import open_dataset  # noqa: E402
from dataset.generation import gen_dataset  # noqa: E402


# three small empty rooms, four positions each, 16x16 views
TINY = {
    'experiment': {'seed': 0, 'seeds': [0], 'output': 'runs/tiny', 'dataset': 'data/tiny'},
    'scenes': {'count': 3, 'room_x': [3.0, 3.5], 'room_y': [3.0, 3.5], 'room_z': [2.4, 2.8],
               'obstacles': [0, 0], 'obstacle_size': [0.3, 0.5], 'obstacle_height': [0.5, 1.0]},
    'grid': {'spacing': 1.5, 'clearance': 0.5, 'sensor_height': 1.5},
    'camera': {'fov': 90.0, 'width': 16, 'height': 16, 'max_depth': 10.0},
    'acoustics': {'clip': 0.02, 'max_order': 1},
    'stft': {'win': 32, 'hop': 16, 'nfft': 64},
    'model': {'widths': [2, 3, 3, 4], 'audio_widths': [3, 3, 4], 'audio_dim': 4, 'fusion_dim': 5},
    'train': {'batch_size': 4, 'pretext_epochs': 1, 'downstream_epochs': 1, 'queue_size': 2, 'max_batches': 2},
    'split': {'train': 1, 'val': 1, 'test': 1},
}


@pytest.fixture
def tiny_cfg():
    return build_config(TINY)


@pytest.fixture(scope='session')
def tiny_dataset_root(tmp_path_factory):
    root = str(tmp_path_factory.mktemp('tiny_dataset'))
    gen_dataset(build_config(TINY), root, workers=1)
    return root


@pytest.fixture
def tiny_dataset(tiny_dataset_root):
    return open_dataset(tiny_dataset_root)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
