"""Dense feed-forward networks and the Diophantine activation family.

Three activations are defined implicitly by a Diophantine relation
between input ``x`` and output ``y`` and solved for ``y``:

* ``dio_linear``: ``a*x + b*y = c``           ->  ``y = (c - a*x) / b``
* ``dio_quadratic``: ``a*x^2 - b*x + d*y + z = c``
  ->  ``y = (c - a*x^2 + b*x - z) / d``
* ``dio_exponential``: ``x^a - y^b = k``      ->  ``y = (x^a - k)^(1/b)``
  (principal non-negative root, only where ``x^a >= k``)

Each has a closed-form output bound and Lipschitz constant on ``|x| <= M``.
"""
from __future__ import annotations

import math
from array import array
from dataclasses import dataclass, field
from typing import Sequence

from . import _pykernels as codes
from ._backend import kernels
from .errors import DomainError, NumericError, ShapeError, UnsupportedError
from .linalg import Matrix, Vector

_PARAM_NAMES = {
    "identity": (),
    "relu": (),
    "sigmoid": (),
    "dio_linear": ("a", "b", "c"),
    "dio_quadratic": ("a", "b", "c", "z", "d"),
    "dio_exponential": ("a", "b", "k"),
}

_CODES = {
    "identity": codes.IDENTITY,
    "relu": codes.RELU,
    "sigmoid": codes.SIGMOID,
    "dio_linear": codes.DIO_LINEAR,
    "dio_quadratic": codes.DIO_QUADRATIC,
    "dio_exponential": codes.DIO_EXPONENTIAL,
}


@dataclass(frozen=True)
class ActivationSpec:
    kind: str
    params: tuple[float, ...] = ()
    code: int = field(init=False, repr=False, compare=False)
    _buf: array = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in _PARAM_NAMES:
            raise UnsupportedError(f"unknown activation kind {self.kind!r}")
        names = _PARAM_NAMES[self.kind]
        params = tuple(float(p) for p in self.params)
        if len(params) != len(names):
            raise ValueError(f"{self.kind} takes parameters {names}, got {len(params)} values")
        if not all(math.isfinite(p) for p in params):
            raise NumericError("activation parameters must be finite")
        p = dict(zip(names, params))
        if self.kind == "dio_linear" and p["b"] == 0:
            raise ValueError("dio_linear requires b != 0")
        if self.kind == "dio_quadratic" and p["d"] == 0:
            raise ValueError("dio_quadratic requires d != 0")
        if self.kind == "dio_exponential":
            a, b, k = p["a"], p["b"], p["k"]
            if a < 1 or b < 1 or a != int(a) or b != int(b):
                raise ValueError("dio_exponential requires positive integer a and b")
            if k < 0:
                raise ValueError("dio_exponential requires k >= 0")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "code", _CODES[self.kind])
        # padded so the kernels can always read five slots
        object.__setattr__(self, "_buf", array("d", params + (0.0,) * (5 - len(params))))

    @property
    def is_diophantine(self) -> bool:
        return self.kind.startswith("dio_")

    def param(self, name: str) -> float:
        return self.params[_PARAM_NAMES[self.kind].index(name)]

    def as_dict(self) -> dict:
        return {"kind": self.kind, **dict(zip(_PARAM_NAMES[self.kind], self.params))}

    @classmethod
    def from_dict(cls, d: dict) -> ActivationSpec:
        kind = d["kind"]
        if kind not in _PARAM_NAMES:
            raise UnsupportedError(f"unknown activation kind {kind!r}")
        return cls(kind, tuple(d[n] for n in _PARAM_NAMES[kind]))

    @classmethod
    def identity(cls) -> ActivationSpec:
        return cls("identity")

    @classmethod
    def relu(cls) -> ActivationSpec:
        return cls("relu")

    @classmethod
    def sigmoid(cls) -> ActivationSpec:
        return cls("sigmoid")

    @classmethod
    def dio_linear(cls, a: float, b: float, c: float) -> ActivationSpec:
        return cls("dio_linear", (a, b, c))

    @classmethod
    def dio_quadratic(cls, a: float, b: float, c: float, z: float, d: float) -> ActivationSpec:
        return cls("dio_quadratic", (a, b, c, z, d))

    @classmethod
    def dio_exponential(cls, a: int, b: int, k: float) -> ActivationSpec:
        return cls("dio_exponential", (a, b, k))


@dataclass(frozen=True)
class Layer:
    weights: Matrix
    bias: Vector
    activation: ActivationSpec = field(default_factory=ActivationSpec.identity)

    def __post_init__(self):
        if len(self.bias) != self.weights.rows:
            raise ShapeError(f"bias length {len(self.bias)} != weight rows {self.weights.rows}")

    @property
    def fan_in(self) -> int:
        return self.weights.cols

    @property
    def fan_out(self) -> int:
        return self.weights.rows


class Network:
    __slots__ = ("layers",)

    def __init__(self, layers: Sequence[Layer]):
        layers = tuple(layers)
        if not layers:
            raise ShapeError("a network needs at least one layer")
        for prev, nxt in zip(layers, layers[1:]):
            if nxt.fan_in != prev.fan_out:
                raise ShapeError(f"layer dims do not chain: {prev.fan_out} -> {nxt.fan_in}")
        self.layers = layers

    @property
    def input_dim(self) -> int:
        return self.layers[0].fan_in

    @property
    def output_dim(self) -> int:
        return self.layers[-1].fan_out

    @property
    def n_params(self) -> int:
        return sum(l.fan_in * l.fan_out + l.fan_out for l in self.layers)

    def flat_params(self) -> list[float]:
        """Parameters in canonical order: per layer, W row-major then b."""
        out: list[float] = []
        for layer in self.layers:
            out.extend(layer.weights._data)
            out.extend(layer.bias._data)
        return out

    def with_flat_params(self, flat: Sequence[float]) -> Network:
        if len(flat) != self.n_params:
            raise ShapeError(f"expected {self.n_params} parameters, got {len(flat)}")
        layers = []
        pos = 0
        for layer in self.layers:
            nw = layer.fan_in * layer.fan_out
            w = Matrix(layer.fan_out, layer.fan_in, flat[pos:pos + nw])
            pos += nw
            b = Vector(flat[pos:pos + layer.fan_out])
            pos += layer.fan_out
            layers.append(Layer(w, b, layer.activation))
        return Network(layers)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return all(
            a.weights == b.weights and a.bias == b.bias and a.activation == b.activation
            for a, b in zip(self.layers, other.layers)
        ) and len(self.layers) == len(other.layers)

    def __repr__(self) -> str:
        dims = [self.input_dim] + [l.fan_out for l in self.layers]
        acts = ",".join(l.activation.kind for l in self.layers)
        return f"Network(dims={dims}, activations=[{acts}])"


def activation_eval(spec: ActivationSpec, x: float) -> float:
    kind = spec.kind
    if kind == "identity":
        return x
    if kind == "relu":
        return x if x > 0.0 else 0.0
    if kind == "sigmoid":
        if x >= 0.0:
            return 1.0 / (1.0 + math.exp(-x))
        e = math.exp(x)
        return e / (1.0 + e)
    if kind == "dio_linear":
        a, b, c = spec.params
        return (c - a * x) / b
    if kind == "dio_quadratic":
        a, b, c, z, d = spec.params
        return (c - a * x * x + b * x - z) / d
    a, b, k = spec.params
    u = math.pow(x, a) - k
    if u < 0.0:
        raise DomainError(f"x^a < k at x={x!r}")
    return math.pow(u, 1.0 / b)


def activation_derivative(spec: ActivationSpec, x: float) -> float:
    kind = spec.kind
    if kind == "identity":
        return 1.0
    if kind == "relu":
        return 1.0 if x > 0.0 else 0.0
    if kind == "sigmoid":
        s = activation_eval(spec, x)
        return s * (1.0 - s)
    if kind == "dio_linear":
        return -spec.params[0] / spec.params[1]
    if kind == "dio_quadratic":
        a, b, _, _, d = spec.params
        return (-2.0 * a * x + b) / d
    a, b, _ = spec.params
    y = activation_eval(spec, x)
    den = b * math.pow(y, b - 1.0)
    if den == 0.0:
        raise DomainError(f"activation not differentiable at x={x!r}")
    return a * math.pow(x, a - 1.0) / den


def _exp_domain_check(a: float, k: float, M: float) -> None:
    if math.pow(M, a) < k:
        raise DomainError(f"no x with |x| <= {M} satisfies x^{a:g} >= {k}")


def activation_bound(spec: ActivationSpec, M: float) -> float:
    """Sup of ``|phi(x)|`` over ``|x| <= M`` for a Diophantine activation."""
    if M < 0:
        raise ValueError("M must be non-negative")
    if spec.kind == "dio_linear":
        a, b, c = spec.params
        return (abs(c) + abs(a) * M) / abs(b)
    if spec.kind == "dio_quadratic":
        a, b, c, z, d = spec.params
        candidates = [-M, M]
        if a != 0.0 and abs(b / (2.0 * a)) <= M:
            candidates.append(b / (2.0 * a))
        return max(abs(activation_eval(spec, x)) for x in candidates)
    if spec.kind == "dio_exponential":
        a, b, k = spec.params
        _exp_domain_check(a, k, M)
        # x^a - k is largest at |x| = M and the root is monotone
        return math.pow(math.pow(M, a) - k, 1.0 / b)
    raise UnsupportedError(f"no closed-form bound for {spec.kind}")


def lipschitz_constant(spec: ActivationSpec, M: float) -> float:
    """Sup of ``|phi'(x)|`` over the valid part of ``|x| <= M``.

    Returns ``math.inf`` for exponential activations whose derivative blows
    up where the root vanishes (``b > 1``).
    """
    if M < 0:
        raise ValueError("M must be non-negative")
    kind = spec.kind
    if kind in ("identity", "relu"):
        return 1.0
    if kind == "sigmoid":
        return 0.25
    if kind == "dio_linear":
        a, b, _ = spec.params
        return abs(a) / abs(b)
    if kind == "dio_quadratic":
        a, b, _, _, d = spec.params
        return (2.0 * abs(a) * M + abs(b)) / abs(d)
    a, b, k = spec.params
    _exp_domain_check(a, k, M)
    if b == 1.0:
        return a * math.pow(M, a - 1.0)
    if k > 0.0:
        return math.inf
    # k == 0: |phi'(x)| = (a/b) |x|^(a/b - 1)
    if a >= b:
        return (a / b) * math.pow(M, a / b - 1.0)
    return math.inf


def forward(net: Network, x: Vector) -> Vector:
    if len(x) != net.input_dim:
        raise ShapeError(f"input length {len(x)} != network input dim {net.input_dim}")
    out = forward_batch(net, Matrix(1, len(x), x._data))
    return Vector(out._data)


def forward_batch(net: Network, X: Matrix) -> Matrix:
    """Apply the network to every row of ``X``."""
    return forward_trace(net, X)[-1][1]


def forward_trace(net: Network, X: Matrix) -> list[tuple[Matrix, Matrix]]:
    """Per layer, the (pre-activation, post-activation) batches.

    The final entry's second element is the network output.
    """
    if X.cols != net.input_dim:
        raise ShapeError(f"input width {X.cols} != network input dim {net.input_dim}")
    n = X.rows
    a = X._data
    trace = []
    for layer in net.layers:
        z = kernels.dense_forward(layer.weights._data, layer.bias._data, a, n, layer.fan_in, layer.fan_out)
        a = kernels.act_forward(layer.activation.code, layer.activation._buf, z)
        trace.append((Matrix(n, layer.fan_out, z), Matrix(n, layer.fan_out, a)))
    return trace
