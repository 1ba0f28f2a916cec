from collections import OrderedDict

import numpy as np

from const import C_LeakySlope
from autodiff.tensor import Tensor, BackwardWithoutForward
from autodiff import layers


class Parameter(Tensor):
    def __init__(self, data, name=None):
        super().__init__(data, requires_grad=True, name=name)


def he_normal(rng, shape, fan_in, slope=C_LeakySlope):
    std = np.sqrt(2.0 / ((1.0 + slope ** 2) * fan_in))
    return (rng.standard_normal(shape) * std).astype(np.float32)


class Module:
    """Container of named parameters and submodules

    Parameter names are dotted attribute paths (`encoder.block0.weight`);
    registration order is kept so traversal is deterministic.
    """

    def __init__(self):
        object.__setattr__(self, '_parameters', OrderedDict())
        object.__setattr__(self, '_modules', OrderedDict())
        object.__setattr__(self, '_forwarded', False)
        object.__setattr__(self, 'name', type(self).__name__)

    def __setattr__(self, key, value):
        if isinstance(value, Parameter):
            self._parameters[key] = value
            value.name = key
        elif isinstance(value, Module):
            self._modules[key] = value
            object.__setattr__(value, 'name', '{0} ({1})'.format(key, type(value).__name__))
        object.__setattr__(self, key, value)

    def named_parameters(self, prefix=''):
        for key, param in self._parameters.items():
            yield prefix + key, param
        for key, module in self._modules.items():
            yield from module.named_parameters(prefix + key + '.')

    def parameters(self):
        return [p for _, p in self.named_parameters()]

    def parameter_count(self):
        return int(sum(p.data.size for p in self.parameters()))

    def zero_grad(self):
        for p in self.parameters():
            p.zero_grad()

    def astype(self, dtype):
        for p in self.parameters():
            p.data = p.data.astype(dtype)
        return self

    def state_dict(self):
        return OrderedDict((name, p.data.copy()) for name, p in self.named_parameters())

    def __call__(self, *inputs):
        out = self.forward(*inputs)
        object.__setattr__(self, '_forwarded', True)
        return out

    def forward(self, *inputs):
        raise NotImplementedError()

    def backward(self, loss):
        """Fill `.grad` of every parameter with d(loss)/d(parameter)

        Gradients are recomputed from scratch, so running forward then
        backward twice on the same inputs gives identical results.
        """
        if not self._forwarded:
            raise BackwardWithoutForward(type(self).__name__)
        self.zero_grad()
        loss.backward()
        object.__setattr__(self, '_forwarded', False)

    def __repr__(self):
        return '{0}({1} parameters)'.format(type(self).__name__, self.parameter_count())


class Conv2d(Module):
    def __init__(self, in_channels, out_channels, kernel, stride, padding, rng):
        super().__init__()
        self.stride = stride
        self.padding = padding
        fan_in = in_channels * kernel * kernel
        self.weight = Parameter(he_normal(rng, (out_channels, in_channels, kernel, kernel), fan_in))
        self.bias = Parameter(np.zeros(out_channels, dtype=np.float32))

    def forward(self, x):
        return layers.conv2d(x, self.weight, self.bias, self.stride, self.padding, name=self.name)


class Linear(Module):
    def __init__(self, in_features, out_features, rng):
        super().__init__()
        self.weight = Parameter(he_normal(rng, (out_features, in_features), in_features))
        self.bias = Parameter(np.zeros(out_features, dtype=np.float32))

    def forward(self, x):
        return layers.linear(x, self.weight, self.bias, name=self.name)
