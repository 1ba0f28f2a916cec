import numpy as np

from autodiff import layers
from autodiff.gradcheck import check_module, weighted_sum
from models.core import build_model, ModelSpec, MODEL_KINDS
from utils import make_rng


# small enough for finite differences, large enough to go through every stage
C_TinyModel = {'widths': [2, 3, 3, 4], 'audio_widths': [3, 3, 4], 'audio_dim': 4, 'fusion_dim': 5}
C_TinyCamera = {'width': 16, 'height': 16, 'max_depth': 10.0}
C_TinySpectrogram = (2, 33, 20)


def tiny_spec():
    return ModelSpec(C_TinyModel, C_TinyCamera)


def tiny_batch(network, batch_size=2, seed=0):
    rng = make_rng(seed, 'gradcheck-batch', network.kind)
    batch = {
        'rgb': rng.uniform(0.0, 1.0, size=(batch_size, 3, C_TinyCamera['height'], C_TinyCamera['width'])),
        'spec': rng.standard_normal((batch_size,) + C_TinySpectrogram),
    }
    return [batch[name] for name in network.inputs]


def check_network(kind, seed=0, max_entries=12):
    """Gradient check of every parameter tensor of a tiny float64 instance of `kind`"""
    network = build_model(kind, tiny_spec(), seed).astype(np.float64)
    inputs = tiny_batch(network, seed=seed)
    rng = make_rng(seed, 'gradcheck-probe', kind)
    if network.output == 'logits':
        labels = rng.integers(0, network.classes, size=len(inputs[0]))
        loss_fn = lambda out: layers.softmax_cross_entropy(out, labels)
    else:
        probe = {}

        def loss_fn(out):
            if 'w' not in probe:
                probe['w'] = rng.standard_normal(out.shape)
            return weighted_sum(out, probe['w'])
    return check_module(kind, network, inputs, loss_fn, max_entries=max_entries, seed=seed)


def check_networks(kinds=None, seed=0):
    return [check_network(kind, seed) for kind in kinds or MODEL_KINDS]
