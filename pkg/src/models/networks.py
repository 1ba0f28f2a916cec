"""Building blocks shared by every model kind

The visual encoder is registered under the attribute name `encoder` in all
networks that see RGB, so its parameter names line up across kinds and a
pretext checkpoint can initialize a downstream network.
"""
from autodiff import layers
from autodiff.nn import Module, Conv2d, Linear


class EncoderBlock(Module):
    def __init__(self, in_channels, out_channels, rng):
        super().__init__()
        self.conv = Conv2d(in_channels, out_channels, 4, 2, 1, rng)

    def forward(self, x):
        return layers.leaky_relu(self.conv(x))


class VisualEncoder(Module):
    """Four stride-2 blocks: (N, 3, H, W) -> (N, widths[-1], H/16, W/16) plus three skips"""

    def __init__(self, widths, rng, in_channels=3):
        super().__init__()
        self.widths = list(widths)
        channels = [in_channels] + self.widths
        for i in range(len(self.widths)):
            setattr(self, 'block{0}'.format(i), EncoderBlock(channels[i], channels[i + 1], rng))

    def forward(self, x):
        skips = []
        for i in range(len(self.widths)):
            x = getattr(self, 'block{0}'.format(i))(x)
            skips.append(x)
        return x, skips[:-1]


class AudioEncoder(Module):
    """Binaural log spectrogram (N, 2, F, T) -> feature vector (N, out_dim)

    Global average pooling makes the output length independent of F and T.
    """

    def __init__(self, widths, out_dim, rng):
        super().__init__()
        self.widths = list(widths)
        channels = [2] + self.widths
        for i in range(len(self.widths)):
            setattr(self, 'conv{0}'.format(i), Conv2d(channels[i], channels[i + 1], 4, 2, 1, rng))
        self.head = Conv2d(channels[-1], out_dim, 3, 1, 1, rng)
        self.fc = Linear(out_dim, out_dim, rng)

    def forward(self, spec):
        x = spec
        for i in range(len(self.widths)):
            x = layers.leaky_relu(getattr(self, 'conv{0}'.format(i))(x))
            if i == 0:
                x = layers.max_pool2d(x)
        x = layers.leaky_relu(self.head(x))
        return layers.leaky_relu(self.fc(layers.global_avg_pool(x)))


class DecoderBlock(Module):
    def __init__(self, in_channels, skip_channels, out_channels, rng):
        super().__init__()
        self.conv = Conv2d(in_channels + skip_channels, out_channels, 3, 1, 1, rng)

    def forward(self, x, skip=None):
        x = layers.upsample2x(x)
        if skip is not None:
            x = layers.concat([x, skip], name=self.name)
        return layers.leaky_relu(self.conv(x))


class Decoder(Module):
    """Four x2 upsampling blocks from an H/16 bottleneck back to (N, out_channels, H, W)"""

    def __init__(self, in_channels, widths, out_channels, rng, use_skips=True):
        super().__init__()
        self.use_skips = use_skips
        # output widths per block: w2, w1, w0, w0; skips come from encoder blocks 2, 1, 0
        outs = [widths[2], widths[1], widths[0], widths[0]]
        skip_channels = [widths[2], widths[1], widths[0], 0] if use_skips else [0, 0, 0, 0]
        prev = in_channels
        for i, (out, skip) in enumerate(zip(outs, skip_channels)):
            setattr(self, 'up{0}'.format(i), DecoderBlock(prev, skip, out, rng))
            prev = out
        self.head = Conv2d(prev, out_channels, 3, 1, 1, rng)

    def forward(self, x, skips=None):
        ordered = list(reversed(skips)) + [None] if self.use_skips else [None] * 4
        for i in range(4):
            x = getattr(self, 'up{0}'.format(i))(x, ordered[i])
        return self.head(x)


class PretextHead(Module):
    """Fused visual and audio features -> class logits"""

    def __init__(self, in_features, fusion_dim, classes, rng):
        super().__init__()
        self.fusion = Linear(in_features, fusion_dim, rng)
        self.classifier = Linear(fusion_dim, classes, rng)

    def forward(self, features):
        return self.classifier(layers.leaky_relu(self.fusion(features)))
