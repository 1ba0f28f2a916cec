import json
import os
from collections import OrderedDict

import numpy as np

from utils import LabError
from const import (C_Orientations, C_ManifestName, C_SplitName, C_SpecStatsName,
                   T_DatasetError, T_SplitError, T_TestSceneAccess)
from config import build_config
from encoding import encoder
from log import log_dataset
from dataset.models import DatasetRecord, SplitEntry, SpecStats, C_BlobKinds


C_ConfigName = 'config.json'


class DatasetError(LabError):
    def __init__(self, reason):
        self.reason = reason

    def __str__(self):
        return T_DatasetError.format(self.reason)


class SplitError(LabError):
    def __init__(self, reason):
        self.reason = reason

    def __str__(self):
        return T_SplitError.format(self.reason)


class TestSceneAccess(LabError):
    def __init__(self, scene_id):
        self.scene_id = scene_id

    def __str__(self):
        return T_TestSceneAccess.format(self.scene_id)


def encode_record(record):
    return json.dumps(record.to_dict(), sort_keys=True, separators=(',', ':'))


def write_manifest(path, records):
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for record in records:
            f.write(encode_record(record) + '\n')


def read_manifest(path):
    records = []
    try:
        with open(path, encoding='utf-8') as f:
            for number, line in enumerate(f, 1):
                if not line.strip():
                    continue
                try:
                    records.append(DatasetRecord.from_dict(json.loads(line)))
                except (KeyError, ValueError) as e:
                    raise DatasetError('{0}:{1}: malformed record ({2})'.format(path, number, e))
    except OSError as e:
        raise DatasetError('cannot read manifest {0} ({1})'.format(path, e.strerror))
    return records


def check_record(record):
    for o in C_Orientations:
        view = record.views.get(str(o))
        if view is None:
            raise DatasetError('scene {0} position {1} has no orientation {2}'.format(record.scene_id, record.position_id, o))
        missing = [k for k in C_BlobKinds if k not in view]
        if missing:
            raise DatasetError('scene {0} position {1} orientation {2} lacks {3}'.format(
                record.scene_id, record.position_id, o, ', '.join(missing)))


def write_json(path, data):
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write('\n')


def read_json(path, what):
    try:
        with open(path, encoding='utf-8') as f:
            return json.load(f)
    except OSError:
        raise DatasetError('missing {0} ({1})'.format(what, path))
    except ValueError as e:
        raise DatasetError('malformed {0} ({1})'.format(what, e))


class PoseGroup:
    """The four views of one position, read through a DatasetAccess"""

    def __init__(self, access, record):
        self.access = access
        self.record = record

    def rgb(self, orientation):
        return self.access.load(self.record, orientation, 'rgb')

    def depth(self, orientation):
        return self.access.load(self.record, orientation, 'depth')

    def normals(self, orientation):
        return self.access.load(self.record, orientation, 'normals')

    def echo(self, orientation):
        return self.access.load(self.record, orientation, 'echo')

    def spec(self, orientation):
        return self.access.spec(self.record, orientation)


class DatasetAccess():
    """Read side of a generated dataset directory

    Every blob read goes through `load`, which records the scene in `audit`
    and refuses scenes placed under `forbid`.
    """

    def __init__(self, root):
        self.root = root
        self.records = read_manifest(os.path.join(root, C_ManifestName))
        if not self.records:
            raise DatasetError('manifest {0} lists no records'.format(os.path.join(root, C_ManifestName)))
        for record in self.records:
            check_record(record)
        self._by_scene = OrderedDict()
        for record in self.records:
            self._by_scene.setdefault(record.scene_id, []).append(record)
        self._split = None
        self._stats = None
        self._config = None
        self.audit = set()
        self.forbidden = set()

    @property
    def scene_ids(self):
        return list(self._by_scene)

    @property
    def split(self):
        if self._split is None:
            self._split = SplitEntry.from_dict(read_json(os.path.join(self.root, C_SplitName), 'split'))
        return self._split

    @property
    def stats(self):
        if self._stats is None:
            self._stats = SpecStats.from_dict(read_json(os.path.join(self.root, C_SpecStatsName), 'spectrogram statistics'))
        return self._stats

    @property
    def config(self):
        if self._config is None:
            self._config = build_config(read_json(os.path.join(self.root, C_ConfigName), 'dataset configuration'))
        return self._config

    def scenes(self, split):
        if split not in ('train', 'val', 'test'):
            raise SplitError('unknown split `{0}`'.format(split))
        return list(getattr(self.split, split))

    def records_of(self, scene_ids):
        out = []
        for scene_id in scene_ids:
            if scene_id not in self._by_scene:
                raise DatasetError('scene {0} is not in the manifest'.format(scene_id))
            out += self._by_scene[scene_id]
        return out

    def split_records(self, split):
        return self.records_of(self.scenes(split))

    def group(self, record):
        return PoseGroup(self, record)

    def forbid(self, scene_ids):
        self.forbidden = set(scene_ids)

    def allow_all(self):
        self.forbidden = set()

    def path(self, record, orientation, kind):
        view = record.views.get(str(orientation))
        if view is None or kind not in view:
            raise DatasetError('scene {0} position {1} has no {2} blob for orientation {3}'.format(
                record.scene_id, record.position_id, kind, orientation))
        return os.path.join(self.root, view[kind])

    def load(self, record, orientation, kind):
        if record.scene_id in self.forbidden:
            raise TestSceneAccess(record.scene_id)
        self.audit.add(record.scene_id)
        path = self.path(record, orientation, kind)
        try:
            return encoder.read(path)
        except OSError:
            raise DatasetError('blob {0} does not resolve'.format(path))

    def spec(self, record, orientation, normalized=True):
        spec = self.load(record, orientation, 'spec')
        if not normalized:
            return spec
        mean = np.asarray(self.stats.mean, dtype=np.float32)[:, None, None]
        std = np.asarray(self.stats.std, dtype=np.float32)[:, None, None]
        return (spec - mean) / std


def open_dataset(root):
    if not os.path.isdir(root):
        raise DatasetError('dataset directory {0} does not exist'.format(root))
    access = DatasetAccess(root)
    log_dataset.debug('opened dataset {0} [{1} records]'.format(root, len(access.records)))
    return access
