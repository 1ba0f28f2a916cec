"""Depth, surface-normal and classification metric suites

All metrics pool pixels over every sample instead of averaging per image.
"""
from collections import namedtuple

import numpy as np

from utils import LabError
from const import C_DepthValidThreshold, C_NormalThresholds, T_EmptyMask


class EmptyMask(LabError):
    def __init__(self, what):
        self.what = what

    def __str__(self):
        return T_EmptyMask.format(self.what)


DepthMetrics = namedtuple('DepthMetrics', ['rms', 'rel', 'log10', 'delta1', 'delta2', 'delta3'])

NormalMetrics = namedtuple('NormalMetrics', ['mean', 'median', 'pct_11_25', 'pct_22_5', 'pct_30'])

ClassificationMetrics = namedtuple('ClassificationMetrics', ['accuracy'])


def _stack(maps):
    if isinstance(maps, np.ndarray):
        return maps.astype(np.float64)
    return np.stack([np.asarray(m, dtype=np.float64) for m in maps])


def depth_metrics(pred, gt):
    """Standard monocular depth metrics over every pixel with gt > 1e-3 m"""
    pred = _stack(pred)
    gt = _stack(gt)
    if pred.shape != gt.shape:
        raise ValueError('prediction shape {0} does not match ground truth {1}'.format(pred.shape, gt.shape))
    valid = gt > C_DepthValidThreshold
    if not valid.any():
        raise EmptyMask('depth')
    p, g = pred[valid], gt[valid]

    ratio = np.maximum(p / g, g / p)
    return DepthMetrics(
        rms=float(np.sqrt(np.mean((p - g) ** 2))),
        rel=float(np.mean(np.abs(p - g) / g)),
        log10=float(np.mean(np.abs(np.log10(p) - np.log10(g)))),
        delta1=float(np.mean(ratio < 1.25)),
        delta2=float(np.mean(ratio < 1.25 ** 2)),
        delta3=float(np.mean(ratio < 1.25 ** 3)))


def angular_error(pred, gt):
    """Per-pixel angle in degrees between (..., 3) unit vectors"""
    cos = np.clip(np.sum(pred * gt, axis=-1), -1.0, 1.0)
    return np.degrees(np.arccos(cos))


def normal_metrics(pred, gt, gt_mask, pred_mask=None):
    """Angular error statistics over the intersection of the masks; maps are (..., H, W, 3)"""
    pred = _stack(pred)
    gt = _stack(gt)
    mask = _stack(gt_mask) > 0
    if pred_mask is not None:
        mask &= _stack(pred_mask) > 0
    if not mask.any():
        raise EmptyMask('normals')

    angles = angular_error(pred[mask], gt[mask])
    pct = [float(np.mean(angles < t)) for t in C_NormalThresholds]
    return NormalMetrics(float(np.mean(angles)), float(np.median(angles)), *pct)


def classification_accuracy(logits, labels):
    """Fraction of argmax hits; np.argmax resolves ties toward the lowest index"""
    logits = np.asarray(logits)
    labels = np.asarray(labels)
    if len(labels) == 0:
        raise EmptyMask('classification')
    return float(np.mean(np.argmax(logits, axis=-1) == labels))


def average_baseline(train_depths):
    """Per-pixel mean of the training depth maps (any iterable of equally shaped maps)"""
    total, count = None, 0
    for depth in train_depths:
        depth = np.asarray(depth, dtype=np.float64)
        total = depth.copy() if total is None else total + depth
        count += 1
    if count == 0:
        raise EmptyMask('average baseline')
    return total / count
