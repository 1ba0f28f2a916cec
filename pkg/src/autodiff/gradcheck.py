"""Central finite-difference checks of the analytic gradients

Checks run in float64. The reported error per entry is
|analytic - numeric| / max(|analytic|, |numeric|, C_ZeroFloor); the floor only
matters for pairs that are both near zero, where finite differences are
round-off noise.
"""
from collections import namedtuple

import numpy as np

from const import T_Log_GradCheck
from log import log_autodiff
from utils import make_rng
from autodiff.tensor import Tensor
from autodiff import layers


C_Step = 1e-4
C_Tolerance = 1e-4
# float64 round-off of a central difference at C_Step on O(10) losses is ~1e-10
C_ZeroFloor = 1e-5

GradCheckResult = namedtuple('GradCheckResult', ['name', 'max_error', 'entries', 'passed'])


def relative_error(analytic, numeric):
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), C_ZeroFloor)
    return np.abs(analytic - numeric) / scale


def _entries(size, limit, rng):
    if limit is None or size <= limit:
        return np.arange(size)
    return np.sort(rng.choice(size, size=limit, replace=False))


def check_function(name, fn, arrays, max_entries=None, seed=0, step=C_Step, tolerance=C_Tolerance):
    """Compare backward() against central differences for every array in `arrays`

    `fn` maps a dict of Tensors to a scalar Tensor; `arrays` are float64 and
    are perturbed in place (restored afterwards).
    """
    rng = make_rng(seed, 'gradcheck', name)
    tensors = {k: Tensor(v, requires_grad=True) for k, v in arrays.items()}
    fn(tensors).backward()

    errors = []
    for key, array in arrays.items():
        analytic = tensors[key].grad
        flat = array.reshape(-1)
        for index in _entries(flat.size, max_entries, rng):
            original = flat[index]
            flat[index] = original + step
            plus = float(fn({k: Tensor(v) for k, v in arrays.items()}).data)
            flat[index] = original - step
            minus = float(fn({k: Tensor(v) for k, v in arrays.items()}).data)
            flat[index] = original
            numeric = (plus - minus) / (2.0 * step)
            errors.append(relative_error(analytic.reshape(-1)[index], numeric))
    return _result(name, errors, tolerance)


def check_module(name, module, inputs, loss_fn, max_entries=16, seed=0, step=C_Step, tolerance=C_Tolerance):
    """Finite-difference check of a module's parameter gradients

    `module` must already be cast to float64; `loss_fn` maps the module
    output to a scalar Tensor. At most `max_entries` entries per parameter
    are perturbed.
    """
    rng = make_rng(seed, 'gradcheck', name)
    feeds = [Tensor(x) for x in inputs]

    def evaluate():
        return loss_fn(module.forward(*feeds))

    loss = loss_fn(module(*feeds))
    module.backward(loss)

    def numeric(flat, index, h):
        original = flat[index]
        flat[index] = original + h
        plus = float(evaluate().data)
        flat[index] = original - h
        minus = float(evaluate().data)
        flat[index] = original
        return (plus - minus) / (2.0 * h)

    errors = []
    for _, param in module.named_parameters():
        analytic = param.grad.reshape(-1)
        flat = param.data.reshape(-1)
        for index in _entries(flat.size, max_entries, rng):
            error = relative_error(analytic[index], numeric(flat, index, step))
            # a leaky-relu kink or a max-pool tie inside the stencil; shrink it
            for h in (step / 10.0, step / 100.0):
                if error < tolerance:
                    break
                error = min(error, relative_error(analytic[index], numeric(flat, index, h)))
            errors.append(error)
    return _result(name, errors, tolerance)


def _result(name, errors, tolerance):
    worst = float(np.max(errors)) if errors else 0.0
    result = GradCheckResult(name, worst, len(errors), worst < tolerance)
    log_autodiff.info(T_Log_GradCheck.format(name, worst, 'ok' if result.passed else 'FAILED'))
    return result


def weighted_sum(out, weights):
    """Scalar probe sum(out * weights) with fixed weights"""
    return (out * Tensor(weights)).sum()


def _away_from_zero(rng, shape, margin=0.1):
    x = rng.uniform(margin, 1.0, size=shape)
    return x * rng.choice([-1.0, 1.0], size=shape)


def _distinct(rng, shape):
    # pairwise gaps of at least 0.05 keep every 2x2 window free of near ties
    return (rng.permutation(int(np.prod(shape))) * 0.05).reshape(shape) + rng.uniform(0, 0.01, size=shape)


def _unit_normals(rng, n, h, w):
    v = rng.standard_normal((n, 3, h, w))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _layer_cases(rng):
    """name -> (fn over tensors, float64 input arrays)"""
    def probe(shape):
        return rng.standard_normal(shape)

    cases = {}

    r0 = probe((2, 4, 6, 6))
    cases['conv2d_k3_s1'] = (
        lambda t: weighted_sum(layers.conv2d(t['x'], t['w'], t['b'], 1, 1), r0),
        {'x': rng.standard_normal((2, 3, 6, 6)), 'w': rng.standard_normal((4, 3, 3, 3)), 'b': rng.standard_normal(4)})

    r1 = probe((2, 4, 4, 4))
    cases['conv2d_k4_s2'] = (
        lambda t: weighted_sum(layers.conv2d(t['x'], t['w'], t['b'], 2, 1), r1),
        {'x': rng.standard_normal((2, 3, 8, 8)), 'w': rng.standard_normal((4, 3, 4, 4)), 'b': rng.standard_normal(4)})

    r11 = probe((2, 3, 6, 6))
    cases['upsample2x'] = (lambda t: weighted_sum(layers.upsample2x(t['x']), r11),
                           {'x': rng.standard_normal((2, 3, 3, 3))})

    r12 = probe((3, 5))
    cases['leaky_relu'] = (lambda t: weighted_sum(layers.leaky_relu(t['x']), r12),
                           {'x': _away_from_zero(rng, (3, 5))})
    r2 = probe((3, 5))
    cases['relu'] = (lambda t: weighted_sum(layers.relu(t['x']), r2),
                     {'x': _away_from_zero(rng, (3, 5))})

    r3 = probe((2, 2, 2, 2))
    cases['max_pool2d'] = (lambda t: weighted_sum(layers.max_pool2d(t['x']), r3),
                           {'x': _distinct(rng, (2, 2, 5, 5))})

    r4 = probe((3, 4))
    cases['linear'] = (lambda t: weighted_sum(layers.linear(t['x'], t['w'], t['b']), r4),
                       {'x': rng.standard_normal((3, 6)), 'w': rng.standard_normal((4, 6)), 'b': rng.standard_normal(4)})

    r5 = probe((3, 4))
    cases['sigmoid'] = (lambda t: weighted_sum(layers.sigmoid(t['x']), r5), {'x': rng.standard_normal((3, 4))})

    r6 = probe((2, 5, 3, 3))
    cases['concat'] = (lambda t: weighted_sum(layers.concat([t['a'], t['b']]), r6),
                       {'a': rng.standard_normal((2, 2, 3, 3)), 'b': rng.standard_normal((2, 3, 3, 3))})

    r7 = probe((2, 3, 2, 2))
    cases['reshape'] = (lambda t: weighted_sum(layers.reshape(t['x'], (2, 3, 2, 2)), r7),
                        {'x': rng.standard_normal((2, 12))})

    r8 = probe((2, 3))
    cases['global_avg_pool'] = (lambda t: weighted_sum(layers.global_avg_pool(t['x']), r8),
                                {'x': rng.standard_normal((2, 3, 4, 5))})

    r9 = probe((2, 3, 2, 4))
    cases['tile_spatial'] = (lambda t: weighted_sum(layers.tile_spatial(t['x'], 2, 4), r9),
                             {'x': rng.standard_normal((2, 3))})

    r10 = probe((2, 3, 2, 2))
    cases['l2_normalize'] = (lambda t: weighted_sum(layers.l2_normalize(t['x']), r10),
                             {'x': rng.standard_normal((2, 3, 2, 2))})

    labels = rng.integers(0, 4, size=5)
    cases['softmax_cross_entropy'] = (lambda t: layers.softmax_cross_entropy(t['x'], labels),
                                      {'x': rng.standard_normal((5, 4))})

    target = rng.standard_normal((2, 1, 3, 3))
    mask = rng.random((2, 1, 3, 3)) > 0.3
    mask[0, 0, 0, 0] = True
    cases['l1_loss'] = (lambda t: layers.l1_loss(t['x'], target, mask),
                        {'x': target + _away_from_zero(rng, target.shape)})

    normals = _unit_normals(rng, 2, 3, 3)
    nmask = rng.random((2, 3, 3)) > 0.3
    nmask[0, 0, 0] = True
    cases['cosine_loss'] = (lambda t: layers.cosine_loss(t['x'], normals, nmask),
                            {'x': rng.standard_normal((2, 3, 3, 3))})
    return cases


LAYER_NAMES = ('conv2d_k3_s1', 'conv2d_k4_s2', 'upsample2x', 'leaky_relu', 'relu', 'max_pool2d', 'linear',
               'sigmoid', 'concat', 'reshape', 'global_avg_pool', 'tile_spatial', 'l2_normalize',
               'softmax_cross_entropy', 'l1_loss', 'cosine_loss')


def check_layers(names=None, seed=0):
    cases = _layer_cases(make_rng(seed, 'gradcheck-cases'))
    results = []
    for name in names or LAYER_NAMES:
        fn, arrays = cases[name]
        results.append(check_function(name, fn, arrays, seed=seed))
    return results
