from collections import namedtuple

import numpy as np


class AdamState(namedtuple('AdamState', ['lr', 'beta1', 'beta2', 'eps', 'step', 'm', 'v'])):
    __slots__ = ()

    @classmethod
    def create(cls, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        return cls(lr, beta1, beta2, eps, 0,
                   [np.zeros_like(p.data) for p in params],
                   [np.zeros_like(p.data) for p in params])

    @classmethod
    def from_config(cls, params, train):
        return cls.create(params, train['lr'], train['beta1'], train['beta2'], train['eps'])


def adam_step(params, grads, state):
    """One bias-corrected Adam update applied in place; returns the advanced state

    A parameter without a gradient is treated as having a zero gradient.
    """
    step = state.step + 1
    c1 = 1.0 - state.beta1 ** step
    c2 = 1.0 - state.beta2 ** step
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if g is None:
            g = np.zeros_like(p.data)
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        update = state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)
        p.data -= update.astype(p.data.dtype, copy=False)
    return state._replace(step=step)


class Adam:
    def __init__(self, params, state):
        self.params = list(params)
        self.state = state

    def step(self):
        self.state = adam_step(self.params, [p.grad for p in self.params], self.state)
