import numpy as np

from utils import LabError
from const import T_ShapeMismatch, T_BackwardWithoutForward


class ShapeMismatch(LabError):
    def __init__(self, layer, detail):
        self.layer = layer
        self.detail = detail

    def __str__(self):
        return T_ShapeMismatch.format(self.layer, self.detail)


class BackwardWithoutForward(LabError):
    def __init__(self, graph):
        self.graph = graph

    def __str__(self):
        return T_BackwardWithoutForward.format(self.graph)


def _as_float(data):
    array = np.asarray(data)
    if array.dtype == np.float64:
        return array
    return array.astype(np.float32, copy=False)


class Tensor:
    """Array node of a define-by-run graph

    Non-leaf tensors keep their parents and a closure mapping the output
    gradient to one gradient per parent (None where nothing flows).
    """

    def __init__(self, data, requires_grad=False, parents=(), backward=None, name=None):
        self.data = _as_float(data)
        self.grad = None
        self.name = name
        self._parents = tuple(parents)
        self._backward = backward
        self.requires_grad = requires_grad or any(p.requires_grad for p in self._parents)

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def is_leaf(self):
        return not self._parents

    def numpy(self):
        return self.data

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        return 'Tensor(shape={0}, dtype={1}, requires_grad={2})'.format(self.shape, self.dtype, self.requires_grad)

    def _topological(self):
        order = []
        visited = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in visited and parent.requires_grad:
                    stack.append((parent, False))
        return order

    def backward(self, grad=None):
        """Accumulate d(self)/d(leaf) into every leaf that requires a gradient"""
        if grad is None:
            grad = np.ones_like(self.data)
        grads = {id(self): np.asarray(grad, dtype=self.dtype)}
        for node in reversed(self._topological()):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node.is_leaf:
                if node.requires_grad:
                    node.grad = g.copy() if node.grad is None else node.grad + g
                continue
            for parent, pg in zip(node._parents, node._backward(g)):
                if pg is None or not parent.requires_grad:
                    continue
                key = id(parent)
                grads[key] = pg if key not in grads else grads[key] + pg

    # elementwise arithmetic on equal shapes or python scalars

    def __add__(self, other):
        if isinstance(other, Tensor):
            _check_same(self, other, 'add')
            return Tensor(self.data + other.data, parents=(self, other), backward=lambda g: (g, g))
        return Tensor(self.data + other, parents=(self,), backward=lambda g: (g,))

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Tensor):
            _check_same(self, other, 'mul')
            a, b = self.data, other.data
            return Tensor(a * b, parents=(self, other), backward=lambda g: (g * b, g * a))
        scale = float(other)
        return Tensor(self.data * scale, parents=(self,), backward=lambda g: (g * scale,))

    __rmul__ = __mul__

    def sum(self):
        shape, dtype = self.shape, self.dtype
        return Tensor(self.data.sum(), parents=(self,),
                      backward=lambda g: (np.full(shape, g, dtype=dtype),))

    def mean(self):
        return self.sum() * (1.0 / max(self.data.size, 1))


def _check_same(a, b, layer):
    if a.shape != b.shape:
        raise ShapeMismatch(layer, '{0} vs {1}'.format(a.shape, b.shape))


def as_tensor(value, requires_grad=False):
    if isinstance(value, Tensor):
        return value
    return Tensor(value, requires_grad=requires_grad)
