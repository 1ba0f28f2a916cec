"""Training and evaluation loops shared by every model kind"""
import math
import os
import queue
import threading
from collections import namedtuple

import numpy as np
import pandas as pd

from const import (C_Orientations, C_DepthValidThreshold, C_CheckpointName, C_TrainLogName, T_Log_Epoch)
from log import log_models
from profiling import profile, Scope
from utils import make_rng
from autodiff import layers
from autodiff.optim import Adam, AdamState
from metrics.core import (depth_metrics, normal_metrics, classification_accuracy, average_baseline,
                          ClassificationMetrics)
from models.core import build_model, PRETEXT_KINDS
from models.checkpoint import save_checkpoint, load_encoder
from models.pretext import OrientationOffset, make_pretext_sample, make_simple_sample, make_match_sample


_log_columns = ['epoch', 'split', 'loss', 'metric', 'value']

TrainResult = namedtuple('TrainResult', ['network', 'checkpoint', 'history'])

Evaluation = namedtuple('Evaluation', ['loss', 'metrics', 'count'])


# -- sample plans: every random choice of an epoch is drawn up front

def plan_samples(kind, records, rng, shuffle=True):
    """List of (record index, view orientation, extra) for one pass over `records`"""
    items = [(i, o) for i in range(len(records)) for o in C_Orientations]
    if shuffle:
        items = [items[j] for j in rng.permutation(len(items))]

    if kind == 'pretext':
        return [(i, o, int(rng.integers(4))) for i, o in items]
    if kind == 'pretext_simple':
        return [(i, o, bool(rng.random() < 0.5)) for i, o in items]
    if kind == 'binary_match':
        by_scene = {}
        for j, r in enumerate(records):
            by_scene.setdefault(r.scene_id, []).append(j)
        plan = []
        for i, o in items:
            scene = records[i].scene_id
            others = [j for j in range(len(records)) if records[j].scene_id != scene]
            pool = by_scene[scene] if rng.random() < 0.5 or not others else others
            plan.append((i, o, (pool[int(rng.integers(len(pool)))], C_Orientations[int(rng.integers(4))])))
        return plan
    return [(i, o, None) for i, o in items]


def plan_evaluation(kind, records, seed):
    """Deterministic evaluation plan; pretext kinds enumerate every label per view"""
    if kind == 'pretext':
        return [(i, o, int(k)) for i in range(len(records)) for o in C_Orientations for k in OrientationOffset]
    if kind == 'pretext_simple':
        return [(i, o, same) for i in range(len(records)) for o in C_Orientations for same in (True, False)]
    return plan_samples(kind, records, make_rng(seed, 'evaluation', kind), shuffle=False)


def load_sample(dataset, records, kind, item):
    i, view, extra = item
    group = dataset.group(records[i])
    if kind == 'pretext':
        rgb, spec, label = make_pretext_sample(group, view, extra)
        return {'rgb': rgb.transpose(2, 0, 1), 'spec': spec, 'label': label}
    if kind == 'pretext_simple':
        rgb, spec, label = make_simple_sample(group, view, extra)
        return {'rgb': rgb.transpose(2, 0, 1), 'spec': spec, 'label': label}
    if kind == 'binary_match':
        other, echo_orientation = extra
        rgb, spec, label = make_match_sample(group, dataset.group(records[other]), view, echo_orientation)
        return {'rgb': rgb.transpose(2, 0, 1), 'spec': spec, 'label': label}

    sample = {}
    if kind in ('rgb2depth', 'rgbecho2depth', 'normals'):
        sample['rgb'] = group.rgb(view).transpose(2, 0, 1)
    if kind in ('echo2depth', 'rgbecho2depth'):
        sample['spec'] = group.spec(view)
    if kind == 'normals':
        normals = group.normals(view)
        sample['normals'] = normals[..., :3].transpose(2, 0, 1)
        sample['mask'] = normals[..., 3] > 0.5
    else:
        sample['depth'] = group.depth(view)[None]
    return sample


def collate(samples):
    batch = {}
    for key in samples[0]:
        batch[key] = np.stack([s[key] for s in samples])
    return batch


class BatchProducer():
    """Loads batches on a background thread into a bounded queue, preserving plan order"""
    _done = object()

    def __init__(self, dataset, records, kind, plan, batch_size, queue_size=4, max_batches=0):
        self._queue = queue.Queue(maxsize=max(1, queue_size))
        self._chunks = [plan[k:k + batch_size] for k in range(0, len(plan), batch_size)]
        if max_batches:
            self._chunks = self._chunks[:max_batches]
        self._load = lambda chunk: collate([load_sample(dataset, records, kind, item) for item in chunk])
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._run, daemon=True)

    def _run(self):
        try:
            for chunk in self._chunks:
                if self._stop.is_set():
                    return
                self._queue.put(self._load(chunk))
        except Exception as e:
            self._queue.put(e)
            return
        self._queue.put(self._done)

    def __len__(self):
        return len(self._chunks)

    def __iter__(self):
        self._thread.start()
        try:
            while True:
                item = self._queue.get()
                if item is self._done:
                    return
                if isinstance(item, Exception):
                    raise item
                yield item
        finally:
            self._stop.set()
            while self._thread.is_alive():
                try:
                    self._queue.get_nowait()
                except queue.Empty:
                    self._thread.join(0.01)


# -- losses and metrics

def compute_loss(network, out, batch):
    if network.output == 'logits':
        return layers.softmax_cross_entropy(out, batch['label'])
    if network.output == 'normals':
        return layers.cosine_loss(out, batch['normals'], batch['mask'])
    # depth is regressed in units of max_depth
    scale = 1.0 / network.max_depth
    return layers.l1_loss(out * scale, batch['depth'] * scale, batch['depth'] > C_DepthValidThreshold)


def _has_targets(network, batch):
    if network.output == 'normals':
        return bool(batch['mask'].any())
    if network.output == 'depth':
        return bool((batch['depth'] > C_DepthValidThreshold).any())
    return True


def headline(metrics):
    """(name, value) of the metric reported per epoch"""
    if isinstance(metrics, ClassificationMetrics):
        return 'accuracy', metrics.accuracy
    if hasattr(metrics, 'rms'):
        return 'rms', metrics.rms
    return 'mean_angle', metrics.mean


def evaluate(network, dataset, scene_ids, batch_size=8, seed=0, queue_size=4, max_batches=0):
    """Loss and metric bundle of `network` over every view of `scene_ids`"""
    records = dataset.records_of(scene_ids)
    plan = plan_evaluation(network.kind, records, seed)
    losses, weights = [], []
    preds, targets, masks, labels = [], [], [], []
    for batch in BatchProducer(dataset, records, network.kind, plan, batch_size, queue_size, max_batches):
        out = network.forward(*network.features(batch))
        if _has_targets(network, batch):
            losses.append(float(compute_loss(network, out, batch).data))
            weights.append(len(next(iter(batch.values()))))
        if network.output == 'logits':
            preds.append(out.data)
            labels.append(batch['label'])
        elif network.output == 'depth':
            preds.append(out.data[:, 0])
            targets.append(batch['depth'][:, 0])
        else:
            preds.append(out.data.transpose(0, 2, 3, 1))
            targets.append(batch['normals'].transpose(0, 2, 3, 1))
            masks.append(batch['mask'])

    loss = float(np.average(losses, weights=weights)) if losses else math.nan
    if network.output == 'logits':
        metrics = ClassificationMetrics(classification_accuracy(np.concatenate(preds), np.concatenate(labels)))
    elif network.output == 'depth':
        metrics = depth_metrics(np.concatenate(preds), np.concatenate(targets))
    else:
        metrics = normal_metrics(np.concatenate(preds), np.concatenate(targets), np.concatenate(masks))
    return Evaluation(loss, metrics, sum(len(p) for p in preds))


def evaluate_average(dataset, scene_ids):
    """Average baseline: per-pixel mean train depth, scored like any depth predictor"""
    train = dataset.split_records('train')
    baseline = average_baseline(dataset.group(r).depth(o) for r in train for o in C_Orientations)
    gts = [dataset.group(r).depth(o) for r in dataset.records_of(scene_ids) for o in C_Orientations]
    metrics = depth_metrics(np.broadcast_to(baseline, (len(gts),) + baseline.shape), np.stack(gts))
    return Evaluation(math.nan, metrics, len(gts))


# -- training

def epochs_for(kind, train):
    return train['pretext_epochs'] if kind in PRETEXT_KINDS else train['downstream_epochs']


@profile(Scope.Training)
def train(kind, dataset, cfg, seed, out_dir, init=None, epochs=None):
    """Fixed-epoch Adam training on the train split, validated after every epoch

    `init` is None (scratch) or a checkpoint path whose `encoder.*`
    parameters initialize the visual encoder. Test scenes are locked out of
    the dataset for the whole run. Writes the checkpoint and `log.csv` into
    `out_dir`.
    """
    hyper = cfg['train']
    epochs = epochs_for(kind, hyper) if epochs is None else epochs
    network = build_model(kind, cfg, seed)
    if init is not None:
        load_encoder(network, init)
    optimizer = Adam(network.parameters(), AdamState.from_config(network.parameters(), hyper))

    os.makedirs(out_dir, exist_ok=True)
    log_path = os.path.join(out_dir, C_TrainLogName)
    train_records = dataset.split_records('train')
    val_scenes = dataset.scenes('val')
    history = []

    def validate(epoch, train_loss):
        if not val_scenes:
            return
        result = evaluate(network, dataset, val_scenes, hyper['batch_size'], seed, hyper['queue_size'], hyper['max_batches'])
        name, value = headline(result.metrics)
        history.append({'epoch': epoch, 'split': 'val', 'loss': result.loss, 'metric': name, 'value': value})
        log_models.info(T_Log_Epoch.format(kind, epoch, epochs, train_loss, result.loss, name, value))

    dataset.forbid(dataset.scenes('test'))
    try:
        validate(0, math.nan)
        pd.DataFrame(history, columns=_log_columns).to_csv(log_path, index=False, float_format='%.6f')
        for epoch in range(1, epochs + 1):
            plan = plan_samples(kind, train_records, make_rng(seed, 'epoch', kind, epoch))
            total, count = 0.0, 0
            producer = BatchProducer(dataset, train_records, kind, plan, hyper['batch_size'],
                                     hyper['queue_size'], hyper['max_batches'])
            for batch in producer:
                if not _has_targets(network, batch):
                    continue
                loss = compute_loss(network, network(*network.features(batch)), batch)
                network.backward(loss)
                optimizer.step()
                total += float(loss.data)
                count += 1
            train_loss = total / count if count else math.nan
            history.append({'epoch': epoch, 'split': 'train', 'loss': train_loss, 'metric': 'loss', 'value': train_loss})
            validate(epoch, train_loss)
            pd.DataFrame(history, columns=_log_columns).to_csv(log_path, index=False, float_format='%.6f')
    finally:
        dataset.allow_all()

    checkpoint = os.path.join(out_dir, C_CheckpointName)
    save_checkpoint(checkpoint, network, {'kind': kind, 'seed': seed, 'epochs': epochs,
                                          'init': init or 'scratch', 'parameters': network.parameter_count()})
    return TrainResult(network, checkpoint, pd.DataFrame(history, columns=_log_columns))
