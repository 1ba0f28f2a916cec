import numpy as np
import pytest

from autodiff import layers
from autodiff.optim import Adam, AdamState
from models.core import build_model, predict, ModelSpec, UnknownModelKind, MODEL_KINDS, PRETEXT_KINDS
from models.checks import tiny_spec, tiny_batch, check_network, C_TinyCamera
from models.checkpoint import (CheckpointMismatch, save_checkpoint, load_checkpoint, load_state, load_encoder,
                               encode_state, decode_state)
from models.pretext import OrientationOffset, make_pretext_sample, make_simple_sample, make_match_sample
from config import ConfigError
from encoding import BlobFormatError


def batch_of(network, n=2, seed=0):
    return dict(zip(network.inputs, tiny_batch(network, n, seed)))


class TestBuild:
    @pytest.mark.parametrize('kind', MODEL_KINDS)
    def test_output_shapes(self, kind):
        network = build_model(kind, tiny_spec(), 0)
        out = predict(network, batch_of(network, 3))
        h, w = C_TinyCamera['height'], C_TinyCamera['width']
        expected = {'depth': (3, h, w), 'normals': (3, h, w, 3), 'logits': (3, getattr(network, 'classes', 0))}
        assert out.shape == expected[network.output]
        assert np.all(np.isfinite(out))

    def test_depth_range(self):
        network = build_model('rgb2depth', tiny_spec(), 0)
        depth = predict(network, batch_of(network))
        assert np.all((depth >= 0) & (depth <= C_TinyCamera['max_depth']))

    @pytest.mark.parametrize('kind', PRETEXT_KINDS)
    def test_class_probabilities(self, kind):
        network = build_model(kind, tiny_spec(), 0)
        batch = batch_of(network, 5)
        probs = predict(network, batch)
        assert np.all((probs >= 0) & (probs <= 1))
        np.testing.assert_allclose(probs.sum(axis=-1), 1.0, atol=1e-6)
        logits = network.forward(*network.features(batch)).data
        np.testing.assert_array_equal(np.argmax(probs, axis=-1), np.argmax(logits, axis=-1))

    def test_normals_unit_length(self):
        network = build_model('normals', tiny_spec(), 0)
        normals = predict(network, batch_of(network))
        np.testing.assert_allclose(np.linalg.norm(normals, axis=-1), 1.0, atol=1e-4)

    def test_class_counts(self):
        spec = tiny_spec()
        assert build_model('pretext', spec, 0).classes == 4
        assert build_model('pretext_simple', spec, 0).classes == 2
        assert build_model('binary_match', spec, 0).classes == 2

    def test_deterministic_init(self):
        a = build_model('rgbecho2depth', tiny_spec(), 5).state_dict()
        b = build_model('rgbecho2depth', tiny_spec(), 5).state_dict()
        c = build_model('rgbecho2depth', tiny_spec(), 6).state_dict()
        assert list(a) == list(b)
        assert all(np.array_equal(a[k], b[k]) for k in a)
        assert not all(np.array_equal(a[k], c[k]) for k in a if k.endswith('weight'))

    def test_shared_encoder_names(self):
        names = {kind: {n for n, _ in build_model(kind, tiny_spec(), 0).named_parameters() if n.startswith('encoder.')}
                 for kind in ('rgb2depth', 'normals', 'pretext', 'binary_match')}
        assert len({frozenset(v) for v in names.values()}) == 1
        assert 'encoder.block0.conv.weight' in names['rgb2depth']

    def test_unknown_kind(self):
        with pytest.raises(UnknownModelKind) as e:
            build_model('rgb2everything', tiny_spec(), 0)
        assert 'rgb2everything' in str(e.value)

    def test_bad_widths(self):
        with pytest.raises(ConfigError):
            ModelSpec({'widths': [2, 3], 'audio_widths': [3], 'audio_dim': 4, 'fusion_dim': 4}, C_TinyCamera)

    def test_predict_leaves_no_forward_behind(self):
        network = build_model('rgb2depth', tiny_spec(), 0)
        predict(network, batch_of(network))
        assert network._forwarded is False


class TestGradcheck:
    @pytest.mark.parametrize('kind', ['rgb2depth', 'echo2depth', 'rgbecho2depth', 'normals', 'pretext'])
    def test_network(self, kind):
        result = check_network(kind, max_entries=4)
        assert result.passed, result

    @pytest.mark.slow
    @pytest.mark.parametrize('kind', MODEL_KINDS)
    def test_every_kind(self, kind):
        result = check_network(kind)
        assert result.passed, result


class TestCheckpoint:
    def test_round_trip(self, tmp_path):
        network = build_model('echo2depth', tiny_spec(), 0)
        path = str(tmp_path / 'checkpoint.vetc')
        save_checkpoint(path, network, {'kind': 'echo2depth'})
        assert (tmp_path / 'checkpoint.json').exists()
        state = load_checkpoint(path)
        assert list(state) == [n for n, _ in network.named_parameters()]
        other = build_model('echo2depth', tiny_spec(), 1)
        load_state(other, state)
        batch = batch_of(network)
        np.testing.assert_array_equal(predict(other, batch), predict(network, batch))

    def test_mismatch_lists_names(self):
        state = build_model('echo2depth', tiny_spec(), 0).state_dict()
        with pytest.raises(CheckpointMismatch) as e:
            load_state(build_model('rgb2depth', tiny_spec(), 0), state)
        assert 'encoder.block0.conv.weight' in e.value.names
        assert 'audio.fc.weight' in e.value.names

    def test_shape_mismatch(self):
        state = build_model('rgb2depth', tiny_spec(), 0).state_dict()
        state['decoder.head.bias'] = np.zeros(7, dtype=np.float32)
        with pytest.raises(CheckpointMismatch) as e:
            load_state(build_model('rgb2depth', tiny_spec(), 0), state)
        assert e.value.names == ['decoder.head.bias']

    def test_encoder_transfer(self, tmp_path):
        pretext = build_model('pretext', tiny_spec(), 3)
        path = str(tmp_path / 'checkpoint.vetc')
        save_checkpoint(path, pretext)
        depth = build_model('rgb2depth', tiny_spec(), 0)
        decoder_before = depth.decoder.head.weight.data.copy()
        assert load_encoder(depth, path) == 8
        pretext_state = pretext.state_dict()
        for name, param in depth.named_parameters():
            if name.startswith('encoder.'):
                np.testing.assert_array_equal(param.data, pretext_state[name])
        np.testing.assert_array_equal(depth.decoder.head.weight.data, decoder_before)

    def test_encoder_transfer_needs_encoder(self, tmp_path):
        path = str(tmp_path / 'checkpoint.vetc')
        save_checkpoint(path, build_model('rgb2depth', tiny_spec(), 0))
        with pytest.raises(CheckpointMismatch):
            load_encoder(build_model('echo2depth', tiny_spec(), 0), path)

    def test_truncated(self):
        blob = encode_state(build_model('rgb2depth', tiny_spec(), 0).state_dict())
        with pytest.raises(BlobFormatError):
            decode_state(blob[:-3])
        with pytest.raises(BlobFormatError):
            decode_state(b'VETS' + blob[4:])


class FakeGroup:
    """Views of one position: rgb encodes the orientation, spec the orientation and scene"""

    def __init__(self, scene_id):
        self.record = type('Record', (), {'scene_id': scene_id})()

    def rgb(self, orientation):
        return np.full((4, 4, 3), orientation, dtype=np.float32)

    def spec(self, orientation):
        return np.full((2, 3, 3), 1000 * self.record.scene_id + orientation, dtype=np.float32)


class TestPretext:
    def test_offsets(self):
        assert OrientationOffset.Right.apply(270) == 0
        assert OrientationOffset.between(90, 0) is OrientationOffset.Left
        assert all(OrientationOffset.between(v, o.apply(v)) is o for v in (0, 90, 180, 270) for o in OrientationOffset)

    def test_pretext_sample(self):
        rgb, spec, label = make_pretext_sample(FakeGroup(0), 90, OrientationOffset.Opposite)
        assert rgb[0, 0, 0] == 90 and spec[0, 0, 0] == 270 and label == 2

    def test_pretext_sample_draws_offset(self):
        rng = np.random.default_rng(0)
        labels = {make_pretext_sample(FakeGroup(0), 0, rng=rng)[2] for _ in range(200)}
        assert labels == {0, 1, 2, 3}

    def test_drawn_offsets_are_uniform(self):
        rng = np.random.default_rng(0)
        labels = [make_pretext_sample(FakeGroup(0), 90, rng=rng)[2] for _ in range(10000)]
        counts = np.bincount(labels, minlength=4)
        assert len(counts) == 4
        # 2500 per class, binomial std ~43
        assert np.all(np.abs(counts - 2500) < 200), counts

    def test_simple_sample(self):
        assert make_simple_sample(FakeGroup(0), 180, True)[1][0, 0, 0] == 180
        _, spec, label = make_simple_sample(FakeGroup(0), 180, False)
        assert spec[0, 0, 0] == 0 and label == 1

    def test_match_sample(self):
        _, spec, label = make_match_sample(FakeGroup(1), FakeGroup(1), 0, 90)
        assert label == 0 and spec[0, 0, 0] == 1090
        _, spec, label = make_match_sample(FakeGroup(1), FakeGroup(2), 0, 90)
        assert label == 1 and spec[0, 0, 0] == 2090


@pytest.mark.slow
def test_single_sample_overfit():
    network = build_model('rgb2depth', tiny_spec(), 0)
    rng = np.random.default_rng(0)
    rgb = rng.uniform(0, 1, size=(1, 3, 16, 16))
    depth = np.full((1, 1, 16, 16), 3.0)
    optimizer = Adam(network.parameters(), AdamState.create(network.parameters(), lr=3e-3))
    scale = 1.0 / network.max_depth
    for _ in range(2000):
        loss = layers.l1_loss(network(*network.features({'rgb': rgb})) * scale, depth * scale)
        network.backward(loss)
        optimizer.step()
        if float(loss.data) < 0.01:
            break
    assert float(loss.data) < 0.01
