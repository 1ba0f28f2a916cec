import numpy as np

from utils import LabError, make_rng
from config import ConfigError
from const import T_UnknownModelKind
from autodiff import layers
from autodiff.tensor import as_tensor
from autodiff.nn import Module, Linear
from models.networks import VisualEncoder, AudioEncoder, Decoder, PretextHead


class UnknownModelKind(LabError):
    def __init__(self, kind):
        self.kind = kind

    def __str__(self):
        return T_UnknownModelKind.format(self.kind, ', '.join(MODEL_KINDS))


class Network(Module):
    """Top-level model: `inputs` names the batch fields consumed, `output` what is produced"""
    kind = None
    inputs = ()
    output = None

    def features(self, batch):
        return [as_tensor(batch[name]) for name in self.inputs]


class DepthNet(Network):
    kind = 'rgb2depth'
    inputs = ('rgb',)
    output = 'depth'

    def __init__(self, spec, rng):
        super().__init__()
        self.max_depth = spec.max_depth
        self.encoder = VisualEncoder(spec.widths, rng)
        self.decoder = Decoder(spec.widths[-1], spec.widths, 1, rng)

    def forward(self, rgb):
        bottleneck, skips = self.encoder(rgb)
        return layers.sigmoid(self.decoder(bottleneck, skips)) * self.max_depth


class NormalNet(Network):
    kind = 'normals'
    inputs = ('rgb',)
    output = 'normals'

    def __init__(self, spec, rng):
        super().__init__()
        self.encoder = VisualEncoder(spec.widths, rng)
        self.decoder = Decoder(spec.widths[-1], spec.widths, 3, rng)

    def forward(self, rgb):
        bottleneck, skips = self.encoder(rgb)
        return layers.l2_normalize(self.decoder(bottleneck, skips))


class EchoDepthNet(Network):
    kind = 'echo2depth'
    inputs = ('spec',)
    output = 'depth'

    def __init__(self, spec, rng):
        super().__init__()
        self.max_depth = spec.max_depth
        self.grid = (spec.height // 16, spec.width // 16)
        self.bottleneck = spec.widths[-1]
        self.audio = AudioEncoder(spec.audio_widths, spec.audio_dim, rng)
        self.project = Linear(spec.audio_dim, self.bottleneck * self.grid[0] * self.grid[1], rng)
        self.decoder = Decoder(self.bottleneck, spec.widths, 1, rng, use_skips=False)

    def forward(self, spec):
        x = layers.leaky_relu(self.project(self.audio(spec)))
        x = layers.reshape(x, (x.shape[0], self.bottleneck) + self.grid)
        return layers.sigmoid(self.decoder(x)) * self.max_depth


class FusionDepthNet(Network):
    kind = 'rgbecho2depth'
    inputs = ('rgb', 'spec')
    output = 'depth'

    def __init__(self, spec, rng):
        super().__init__()
        self.max_depth = spec.max_depth
        self.encoder = VisualEncoder(spec.widths, rng)
        self.audio = AudioEncoder(spec.audio_widths, spec.audio_dim, rng)
        self.decoder = Decoder(spec.widths[-1] + spec.audio_dim, spec.widths, 1, rng)

    def forward(self, rgb, spec):
        bottleneck, skips = self.encoder(rgb)
        audio = layers.tile_spatial(self.audio(spec), bottleneck.shape[2], bottleneck.shape[3])
        x = layers.concat([bottleneck, audio], name='fusion')
        return layers.sigmoid(self.decoder(x, skips)) * self.max_depth


class PretextNet(Network):
    """Scores a (view, echo) pair: pooled visual feature joined with the audio feature"""
    inputs = ('rgb', 'spec')
    output = 'logits'

    def __init__(self, spec, rng, kind, classes):
        super().__init__()
        self.kind = kind
        self.classes = classes
        self.encoder = VisualEncoder(spec.widths, rng)
        self.audio = AudioEncoder(spec.audio_widths, spec.audio_dim, rng)
        self.head = PretextHead(spec.widths[-1] + spec.audio_dim, spec.fusion_dim, classes, rng)

    def forward(self, rgb, spec):
        bottleneck, _ = self.encoder(rgb)
        joined = layers.concat([layers.global_avg_pool(bottleneck), self.audio(spec)], name='fusion')
        return self.head(joined)


class ModelSpec:
    """Architecture hyperparameters pulled from the `model` and `camera` sections"""

    def __init__(self, model, camera):
        self.widths = list(model['widths'])
        self.audio_widths = list(model['audio_widths'])
        self.audio_dim = int(model['audio_dim'])
        self.fusion_dim = int(model['fusion_dim'])
        self.width = int(camera['width'])
        self.height = int(camera['height'])
        self.max_depth = float(camera['max_depth'])
        if len(self.widths) != 4:
            raise ConfigError('model.widths', 'expected 4 encoder widths, got {0}'.format(len(self.widths)))
        if not self.audio_widths:
            raise ConfigError('model.audio_widths', 'at least one audio stage is required')

    @classmethod
    def from_config(cls, cfg):
        return cls(cfg['model'], cfg['camera'])


_factories = {
    'rgb2depth': lambda spec, rng: DepthNet(spec, rng),
    'echo2depth': lambda spec, rng: EchoDepthNet(spec, rng),
    'rgbecho2depth': lambda spec, rng: FusionDepthNet(spec, rng),
    'normals': lambda spec, rng: NormalNet(spec, rng),
    'pretext': lambda spec, rng: PretextNet(spec, rng, 'pretext', 4),
    'pretext_simple': lambda spec, rng: PretextNet(spec, rng, 'pretext_simple', 2),
    'binary_match': lambda spec, rng: PretextNet(spec, rng, 'binary_match', 2),
}

MODEL_KINDS = tuple(_factories)
PRETEXT_KINDS = ('pretext', 'pretext_simple', 'binary_match')


def build_model(kind, cfg, seed):
    """Fresh He-initialized network; identical (kind, cfg, seed) give identical parameters"""
    if kind not in _factories:
        raise UnknownModelKind(kind)
    spec = cfg if isinstance(cfg, ModelSpec) else ModelSpec.from_config(cfg)
    return _factories[kind](spec, make_rng(seed, 'init', kind))


def predict(network, batch):
    """Inference on a batch dict; returns numpy arrays in ground-truth layout

    depth -> (N, H, W), normals -> (N, H, W, 3), pretext kinds -> (N, classes)
    class probabilities.
    The call does not leave a recorded forward pass behind.
    """
    out = network.forward(*network.features(batch)).data
    if network.output == 'depth':
        return out[:, 0]
    if network.output == 'normals':
        return np.ascontiguousarray(out.transpose(0, 2, 3, 1))
    return layers.softmax(out)
