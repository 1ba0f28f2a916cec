"""Differentiable layer catalog

Every function takes and returns `Tensor`s and records its own backward
closure. Image tensors are channel-first (N, C, H, W).
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from const import C_LeakySlope
from autodiff.tensor import Tensor, ShapeMismatch


def _expect_ndim(x, ndim, layer):
    if x.ndim != ndim:
        raise ShapeMismatch(layer, 'expected a {0}-d input, got shape {1}'.format(ndim, x.shape))


def conv2d(x, weight, bias, stride=1, padding=0, name='conv2d'):
    """Cross-correlation through im2col; weight is (O, C, k, k)"""
    _expect_ndim(x, 4, name)
    n, c, h, w = x.shape
    o, cw, k, _ = weight.shape
    if c != cw:
        raise ShapeMismatch(name, 'input has {0} channels, kernel expects {1}'.format(c, cw))
    ho = (h + 2 * padding - k) // stride + 1
    wo = (w + 2 * padding - k) // stride + 1
    if ho < 1 or wo < 1:
        raise ShapeMismatch(name, 'input {0}x{1} is smaller than kernel {2}'.format(h, w, k))

    xp = np.pad(x.data, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    windows = sliding_window_view(xp, (k, k), axis=(2, 3))[:, :, ::stride, ::stride][:, :, :ho, :wo]
    cols = windows.transpose(0, 2, 3, 1, 4, 5).reshape(n * ho * wo, c * k * k)
    wmat = weight.data.reshape(o, c * k * k)
    out = (cols @ wmat.T + bias.data).reshape(n, ho, wo, o).transpose(0, 3, 1, 2)

    def backward(g):
        gmat = g.transpose(0, 2, 3, 1).reshape(-1, o)
        dw = (gmat.T @ cols).reshape(weight.shape)
        db = gmat.sum(axis=0)
        dcols = (gmat @ wmat).reshape(n, ho, wo, c, k, k)
        dxp = np.zeros_like(xp)
        for i in range(k):
            for j in range(k):
                dxp[:, :, i:i + stride * ho:stride, j:j + stride * wo:stride] += \
                    dcols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
        dx = dxp[:, :, padding:padding + h, padding:padding + w]
        return dx, dw, db

    return Tensor(np.ascontiguousarray(out), parents=(x, weight, bias), backward=backward)


def linear(x, weight, bias, name='linear'):
    _expect_ndim(x, 2, name)
    if x.shape[1] != weight.shape[1]:
        raise ShapeMismatch(name, 'input has {0} features, layer expects {1}'.format(x.shape[1], weight.shape[1]))
    out = x.data @ weight.data.T + bias.data

    def backward(g):
        return g @ weight.data, g.T @ x.data, g.sum(axis=0)

    return Tensor(out, parents=(x, weight, bias), backward=backward)


def upsample2x(x):
    """Nearest-neighbour upsampling by 2 on both spatial axes"""
    _expect_ndim(x, 4, 'upsample2x')
    n, c, h, w = x.shape
    out = x.data.repeat(2, axis=2).repeat(2, axis=3)
    return Tensor(out, parents=(x,), backward=lambda g: (g.reshape(n, c, h, 2, w, 2).sum(axis=(3, 5)),))


def leaky_relu(x, slope=C_LeakySlope):
    scale = np.where(x.data > 0, 1.0, slope).astype(x.dtype)
    return Tensor(x.data * scale, parents=(x,), backward=lambda g: (g * scale,))


def relu(x):
    return leaky_relu(x, 0.0)


def max_pool2d(x):
    """2x2 max pooling with stride 2; odd trailing rows and columns are dropped"""
    _expect_ndim(x, 4, 'max_pool2d')
    n, c, h, w = x.shape
    hh, wh = h // 2, w // 2
    if hh < 1 or wh < 1:
        raise ShapeMismatch('max_pool2d', 'input {0}x{1} is too small to pool'.format(h, w))
    blocks = x.data[:, :, :2 * hh, :2 * wh].reshape(n, c, hh, 2, wh, 2).transpose(0, 1, 2, 4, 3, 5)
    blocks = blocks.reshape(n, c, hh, wh, 4)
    winner = blocks.argmax(axis=-1)
    out = np.take_along_axis(blocks, winner[..., None], axis=-1)[..., 0]

    def backward(g):
        onehot = (np.arange(4) == winner[..., None]) * g[..., None]
        grid = onehot.reshape(n, c, hh, wh, 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(n, c, 2 * hh, 2 * wh)
        dx = np.zeros_like(x.data)
        dx[:, :, :2 * hh, :2 * wh] = grid
        return (dx,)

    return Tensor(out, parents=(x,), backward=backward)


def sigmoid(x):
    out = (0.5 * (1.0 + np.tanh(0.5 * x.data))).astype(x.dtype)
    return Tensor(out, parents=(x,), backward=lambda g: (g * out * (1.0 - out),))


def concat(tensors, axis=1, name='concat'):
    shapes = [t.shape for t in tensors]
    for s in shapes[1:]:
        if len(s) != len(shapes[0]) or any(a != b for i, (a, b) in enumerate(zip(s, shapes[0])) if i != axis):
            raise ShapeMismatch(name, 'cannot join shapes {0} on axis {1}'.format(shapes, axis))
    bounds = np.cumsum([s[axis] for s in shapes])[:-1]
    out = np.concatenate([t.data for t in tensors], axis=axis)
    return Tensor(out, parents=tuple(tensors), backward=lambda g: tuple(np.split(g, bounds, axis=axis)))


def reshape(x, shape, name='reshape'):
    original = x.shape
    try:
        out = x.data.reshape(shape)
    except ValueError:
        raise ShapeMismatch(name, 'cannot reshape {0} to {1}'.format(original, shape))
    return Tensor(out, parents=(x,), backward=lambda g: (g.reshape(original),))


def global_avg_pool(x):
    _expect_ndim(x, 4, 'global_avg_pool')
    n, c, h, w = x.shape
    out = x.data.mean(axis=(2, 3))
    return Tensor(out, parents=(x,),
                  backward=lambda g: (np.broadcast_to(g[:, :, None, None] / (h * w), x.shape).copy(),))


def tile_spatial(x, height, width):
    """(N, C) vector repeated over an (H, W) grid"""
    _expect_ndim(x, 2, 'tile_spatial')
    out = np.broadcast_to(x.data[:, :, None, None], x.shape + (height, width)).copy()
    return Tensor(out, parents=(x,), backward=lambda g: (g.sum(axis=(2, 3)),))


def l2_normalize(x, axis=1, eps=1e-8):
    norm = np.sqrt((x.data ** 2).sum(axis=axis, keepdims=True) + eps)
    out = x.data / norm

    def backward(g):
        return ((g - out * (g * out).sum(axis=axis, keepdims=True)) / norm,)

    return Tensor(out, parents=(x,), backward=backward)


def softmax(logits):
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_cross_entropy(logits, labels):
    """Mean negative log-likelihood of integer `labels` under softmax(logits)"""
    _expect_ndim(logits, 2, 'softmax_cross_entropy')
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (logits.shape[0],):
        raise ShapeMismatch('softmax_cross_entropy', 'labels {0} for logits {1}'.format(labels.shape, logits.shape))
    n = logits.shape[0]
    z = logits.data - logits.data.max(axis=-1, keepdims=True)
    log_probs = z - np.log(np.exp(z).sum(axis=-1, keepdims=True))
    loss = -log_probs[np.arange(n), labels].mean()

    def backward(g):
        d = np.exp(log_probs)
        d[np.arange(n), labels] -= 1.0
        return (d * (g / n),)

    return Tensor(np.asarray(loss, dtype=logits.dtype), parents=(logits,), backward=backward)


def _valid_count(mask, layer):
    count = float(mask.sum())
    if count == 0:
        raise ShapeMismatch(layer, 'mask selects no elements')
    return count


def l1_loss(pred, target, mask=None):
    """Mean absolute error over the elements selected by `mask`"""
    target = np.asarray(target, dtype=pred.dtype)
    if target.shape != pred.shape:
        raise ShapeMismatch('l1_loss', 'prediction {0} vs target {1}'.format(pred.shape, target.shape))
    weight = np.ones(pred.shape, dtype=pred.dtype) if mask is None else np.broadcast_to(mask, pred.shape).astype(pred.dtype)
    count = _valid_count(weight, 'l1_loss')
    diff = pred.data - target
    loss = (np.abs(diff) * weight).sum() / count
    return Tensor(np.asarray(loss, dtype=pred.dtype), parents=(pred,),
                  backward=lambda g: (np.sign(diff) * weight * (g / count),))


def cosine_loss(pred, target, mask=None):
    """Mean of 1 - <pred, target> over valid pixels of (N, 3, H, W) normal maps; mask is (N, H, W)"""
    target = np.asarray(target, dtype=pred.dtype)
    if target.shape != pred.shape or pred.ndim != 4:
        raise ShapeMismatch('cosine_loss', 'prediction {0} vs target {1}'.format(pred.shape, target.shape))
    n, _, h, w = pred.shape
    weight = np.ones((n, h, w), dtype=pred.dtype) if mask is None else np.asarray(mask).astype(pred.dtype)
    count = _valid_count(weight, 'cosine_loss')
    cos = (pred.data * target).sum(axis=1)
    loss = ((1.0 - cos) * weight).sum() / count
    return Tensor(np.asarray(loss, dtype=pred.dtype), parents=(pred,),
                  backward=lambda g: (-target * weight[:, None] * (g / count),))
