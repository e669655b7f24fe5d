"""Built-in tasks: the three worked examples and two synthetic problems.

Each builder returns ``(net, train_data, val_data, task_kind)``; all
randomness comes from the ``seed`` argument.
"""
from __future__ import annotations

import math
import random

from .linalg import Matrix, Vector
from .network import ActivationSpec, Layer, Network
from .training import Dataset

TASKS = ("example1", "example2", "example3", "synthetic_regression", "synthetic_classification")

EXAMPLE1_X = (1.0, 2.0, 3.0)
EXAMPLE1_Y = (3.0, 5.0, 7.0)
EXAMPLE2_X = (1.0, 2.0, 3.0)
EXAMPLE2_Y = (6.0, 11.0, 18.0)
EXAMPLE3_W1 = ((2.5, -1.3), (0.7, 1.6))
EXAMPLE3_GRAD_W1 = ((0.1, -0.4), (0.3, 0.2))


def _column(values) -> Matrix:
    return Matrix(len(values), 1, values)


def example1():
    """Fit ``y = W x + b`` on three integer points, starting from zero."""
    data = Dataset(_column(EXAMPLE1_X), _column(EXAMPLE1_Y))
    net = Network([Layer(Matrix.zeros(1, 1), Vector.zeros(1))])
    return net, data, data, "mse"


def example2():
    """Fit ``y = W x^2 + V x + b``: a linear layer on the features ``(x^2, x)``."""
    X = Matrix(3, 2, [v for x in EXAMPLE2_X for v in (x * x, x)])
    data = Dataset(X, _column(EXAMPLE2_Y))
    net = Network([Layer(Matrix.zeros(1, 2), Vector.zeros(1))])
    return net, data, data, "mse"


def _init_layer(rng: random.Random, fan_in: int, fan_out: int, act: ActivationSpec) -> Layer:
    std = 1.0 / math.sqrt(fan_in)
    w = Matrix(fan_out, fan_in, [rng.gauss(0.0, std) for _ in range(fan_in * fan_out)])
    return Layer(w, Vector.zeros(fan_out), act)


def _uniform_inputs(rng, n, d, lo=-1.0, hi=1.0):
    return [[rng.uniform(lo, hi) for _ in range(d)] for _ in range(n)]


def _split(rows_x, rows_y, n_train):
    def mat(rows):
        return Matrix.from_rows(rows)

    return Dataset(mat(rows_x[:n_train]), mat(rows_y[:n_train])), Dataset(mat(rows_x[n_train:]), mat(rows_y[n_train:]))


def example3(seed: int = 0, hidden: ActivationSpec | None = None, n: int = 40):
    """One-hidden-layer MLP whose first weight matrix starts at the worked-example values.

    Targets come from the integer teacher ``y = 2 x1 - x2``.
    """
    rng = random.Random(seed)
    hidden = hidden or ActivationSpec.relu()
    xs = _uniform_inputs(rng, n, 2, -2.0, 2.0)
    ys = [[2.0 * a - b] for a, b in xs]
    train, val = _split(xs, ys, 3 * n // 4)
    l1 = Layer(Matrix.from_rows(EXAMPLE3_W1), Vector.zeros(2), hidden)
    l2 = _init_layer(rng, 2, 1, ActivationSpec.identity())
    return Network([l1, l2]), train, val, "mse"


def synthetic_regression(seed: int = 0, n: int = 80, noise: float = 0.1):
    """Linear target ``y = 2 x1 - 3 x2 + 1`` plus Gaussian noise."""
    rng = random.Random(seed)
    xs = _uniform_inputs(rng, n, 2)
    ys = [[2.0 * a - 3.0 * b + 1.0 + rng.gauss(0.0, noise)] for a, b in xs]
    train, val = _split(xs, ys, 3 * n // 4)
    net = Network([_init_layer(rng, 2, 1, ActivationSpec.identity())])
    return net, train, val, "mse"


def synthetic_classification(seed: int = 0, n: int = 120, hidden_units: int = 4, hidden: ActivationSpec | None = None):
    """Two Gaussian blobs in the plane, one-hot targets, a small ReLU MLP."""
    rng = random.Random(seed)
    hidden = hidden or ActivationSpec.relu()
    centers = ((1.0, 1.0), (-1.0, -1.0))
    xs, ys = [], []
    for i in range(n):
        c = i % 2
        cx, cy = centers[c]
        xs.append([cx + rng.gauss(0.0, 0.8), cy + rng.gauss(0.0, 0.8)])
        ys.append([1.0, 0.0] if c == 0 else [0.0, 1.0])
    order = list(range(n))
    rng.shuffle(order)
    xs = [xs[i] for i in order]
    ys = [ys[i] for i in order]
    train, val = _split(xs, ys, 3 * n // 4)
    net = Network([
        _init_layer(rng, 2, hidden_units, hidden),
        _init_layer(rng, hidden_units, 2, ActivationSpec.identity()),
    ])
    return net, train, val, "cross_entropy"


def build_task(name: str, seed: int = 0, **kwargs):
    builders = {
        "example1": lambda: example1(),
        "example2": lambda: example2(),
        "example3": lambda: example3(seed, **kwargs),
        "synthetic_regression": lambda: synthetic_regression(seed, **kwargs),
        "synthetic_classification": lambda: synthetic_classification(seed, **kwargs),
    }
    if name not in builders:
        raise ValueError(f"unknown task {name!r}; choose from {TASKS}")
    return builders[name]()
