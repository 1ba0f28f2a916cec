import json
import os

import numpy as np
import pytest

from const import C_Orientations, C_ManifestName
from config import build_config
from encoding import encoder
from dataset.core import (DatasetError, SplitError, TestSceneAccess, open_dataset, read_manifest, write_manifest)
from dataset.generation import gen_dataset, split_dataset
from dataset.models import DatasetRecord, SplitEntry, C_BlobKinds
from conftest import TINY


def read_bytes(path):
    with open(path, 'rb') as f:
        return f.read()


class TestRecords:
    def test_field_members(self):
        assert DatasetRecord.scene_id == 'scene_id'
        assert DatasetRecord.columns == ['scene_id', 'position_id', 'position', 'views']

    def test_construction(self):
        a = DatasetRecord(1, 2, [0.5, 0.5, 1.5], {})
        b = DatasetRecord.from_dict({'scene_id': 1, 'position_id': 2, 'position': [0.5, 0.5, 1.5], 'views': {}})
        assert a == b
        assert a.to_dict()['position_id'] == 2

    def test_missing_field(self):
        with pytest.raises(KeyError):
            SplitEntry.from_dict({'seed': 0, 'train': [1]})

    def test_wrong_arity(self):
        with pytest.raises(TypeError):
            SplitEntry(0, [1])


class TestGeneratedDataset:
    def test_layout(self, tiny_dataset_root):
        for name in ('manifest.jsonl', 'config.json', 'split.json', 'spec_stats.json', 'summary.json'):
            assert os.path.isfile(os.path.join(tiny_dataset_root, name))
        assert sorted(os.listdir(os.path.join(tiny_dataset_root, 'scenes'))) == \
            ['scene_0000.json', 'scene_0001.json', 'scene_0002.json']

    def test_records(self, tiny_dataset):
        assert len(tiny_dataset.records) == 12
        assert tiny_dataset.scene_ids == [0, 1, 2]
        for record in tiny_dataset.records:
            assert sorted(record.views, key=int) == [str(o) for o in C_Orientations]
            assert all(sorted(view) == sorted(C_BlobKinds) for view in record.views.values())

    def test_blob_shapes(self, tiny_dataset):
        group = tiny_dataset.group(tiny_dataset.records[0])
        assert group.rgb(0).shape == (16, 16, 3)
        assert group.depth(90).shape == (16, 16)
        assert group.normals(180).shape == (16, 16, 4)
        assert group.echo(270).shape == (2, 882)
        assert group.spec(0).shape == (2, 33, 54)

    def test_views_differ_by_orientation(self, tiny_dataset):
        group = tiny_dataset.group(tiny_dataset.records[0])
        assert not np.array_equal(group.echo(0), group.echo(180))
        assert not np.array_equal(group.depth(0), group.depth(180))

    def test_normal_mask_channel(self, tiny_dataset):
        normals = tiny_dataset.group(tiny_dataset.records[0]).normals(0)
        mask = normals[..., 3]
        assert set(np.unique(mask)) <= {0.0, 1.0}
        np.testing.assert_allclose(np.linalg.norm(normals[..., :3][mask > 0.5], axis=-1), 1.0, atol=1e-4)

    def test_split(self, tiny_dataset):
        split = tiny_dataset.split
        assert sorted(split.train + split.val + split.test) == [0, 1, 2]
        assert len(split.train) == len(split.val) == len(split.test) == 1

    def test_spectrogram_normalization(self, tiny_dataset):
        specs = np.stack([tiny_dataset.group(r).spec(o) for r in tiny_dataset.split_records('train')
                          for o in C_Orientations])
        np.testing.assert_allclose(specs.mean(axis=(0, 2, 3)), 0.0, atol=1e-3)
        np.testing.assert_allclose(specs.std(axis=(0, 2, 3)), 1.0, atol=1e-3)

    def test_summary(self, tiny_dataset_root):
        with open(os.path.join(tiny_dataset_root, 'summary.json')) as f:
            summary = json.load(f)
        assert summary['scene_count'] == 3
        assert summary['position_count'] == 12
        assert summary['view_count'] == 48
        assert summary['views_per_split'] == {'train': 16, 'val': 16, 'test': 16}

    def test_stored_config(self, tiny_dataset):
        assert tiny_dataset.config.camera.width == 16

    def test_manifest_round_trip(self, tiny_dataset_root, tmp_path):
        source = os.path.join(tiny_dataset_root, C_ManifestName)
        copy = str(tmp_path / C_ManifestName)
        write_manifest(copy, read_manifest(source))
        assert read_bytes(copy) == read_bytes(source)

    def test_deterministic(self, tiny_dataset_root, tmp_path):
        other = str(tmp_path / 'again')
        gen_dataset(build_config(TINY), other, workers=1)
        assert read_bytes(os.path.join(other, C_ManifestName)) == read_bytes(os.path.join(tiny_dataset_root, C_ManifestName))
        for record in read_manifest(os.path.join(other, C_ManifestName))[:4]:
            for view in record.views.values():
                for blob in view.values():
                    assert read_bytes(os.path.join(other, blob)) == read_bytes(os.path.join(tiny_dataset_root, blob))

    def test_blob_file_is_vets(self, tiny_dataset):
        path = tiny_dataset.path(tiny_dataset.records[0], 0, 'spec')
        assert path.endswith('pos_0000_o000_spec.vets')
        assert encoder.read(path).dtype == np.float32

    def test_seed_changes_scenes(self, tiny_dataset_root, tmp_path):
        raw = dict(TINY, experiment=dict(TINY['experiment'], seed=1), scenes=dict(TINY['scenes'], count=1),
                   split={'train': 1, 'val': 0, 'test': 0})
        gen_dataset(build_config(raw), str(tmp_path), workers=1)
        with open(tmp_path / 'scenes' / 'scene_0000.json') as f:
            reseeded = json.load(f)
        with open(os.path.join(tiny_dataset_root, 'scenes', 'scene_0000.json')) as f:
            original = json.load(f)
        assert reseeded['seed'] != original['seed']
        assert reseeded['extents'] != original['extents']


class TestAccess:
    def test_forbidden_scene(self, tiny_dataset):
        test_scene = tiny_dataset.scenes('test')[0]
        record = tiny_dataset.records_of([test_scene])[0]
        tiny_dataset.forbid([test_scene])
        with pytest.raises(TestSceneAccess):
            tiny_dataset.group(record).rgb(0)
        tiny_dataset.allow_all()
        assert tiny_dataset.group(record).rgb(0).shape == (16, 16, 3)
        assert test_scene in tiny_dataset.audit

    def test_unknown_split(self, tiny_dataset):
        with pytest.raises(SplitError):
            tiny_dataset.scenes('holdout')

    def test_unknown_scene(self, tiny_dataset):
        with pytest.raises(DatasetError):
            tiny_dataset.records_of([99])

    def test_missing_directory(self, tmp_path):
        with pytest.raises(DatasetError):
            open_dataset(str(tmp_path / 'absent'))

    def test_missing_orientation(self, tmp_path):
        views = {str(o): {k: 'x.vets' for k in C_BlobKinds} for o in (0, 90, 180)}
        write_manifest(str(tmp_path / C_ManifestName), [DatasetRecord(0, 0, [0.5, 0.5, 1.5], views)])
        with pytest.raises(DatasetError) as e:
            open_dataset(str(tmp_path))
        assert 'orientation 270' in str(e.value)

    def test_unresolved_blob(self, tmp_path):
        views = {str(o): {k: 'missing.vets' for k in C_BlobKinds} for o in C_Orientations}
        write_manifest(str(tmp_path / C_ManifestName), [DatasetRecord(0, 0, [0.5, 0.5, 1.5], views)])
        access = open_dataset(str(tmp_path))
        with pytest.raises(DatasetError):
            access.group(access.records[0]).depth(0)

    def test_malformed_manifest(self, tmp_path):
        (tmp_path / C_ManifestName).write_text('{"scene_id": 0}\n')
        with pytest.raises(DatasetError):
            open_dataset(str(tmp_path))

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / 'file'
        blocker.write_text('')
        with pytest.raises(DatasetError):
            gen_dataset(build_config(TINY), str(blocker / 'dataset'), workers=1)


class TestSplit:
    def test_counts_cover_and_disjoint(self):
        split = split_dataset(range(21), {'train': 16, 'val': 2, 'test': 3}, 0)
        chosen = split.train + split.val + split.test
        assert sorted(chosen) == list(range(21))
        assert (len(split.train), len(split.val), len(split.test)) == (16, 2, 3)

    def test_deterministic_per_seed(self):
        spec = {'train': 16, 'val': 2, 'test': 3}
        assert split_dataset(range(21), spec, 4) == split_dataset(range(21), spec, 4)
        tests = {tuple(split_dataset(range(21), spec, s).test) for s in range(10)}
        assert len(tests) > 1

    def test_explicit_lists(self):
        split = split_dataset(range(5), {'train': [0, 1, 2], 'val': [3], 'test': [4]}, 0)
        assert (split.train, split.val, split.test) == ([0, 1, 2], [3], [4])

    @pytest.mark.parametrize('spec', [
        {'train': 20, 'val': 2, 'test': 3},
        {'train': [0, 1], 'val': [1], 'test': [2]},
        {'train': [0, 1], 'val': [70], 'test': [2]},
        {'train': 0, 'val': 1, 'test': 1},
    ])
    def test_errors(self, spec):
        with pytest.raises(SplitError):
            split_dataset(range(21), spec, 0)
