"""Shared builders and an independent reference implementation for tests.

The reference forward pass and losses below use only plain lists and the
scalar activation formulas, never the kernels, so they can serve as an
oracle for the vectorised code paths.
"""
from __future__ import annotations

import math
import random

from dionet.constraints import Constraint, EncodingMap, parse_polynomial
from dionet.linalg import Matrix, Vector
from dionet.network import ActivationSpec, Layer, Network, activation_eval

# activations defined and smooth on the whole real line (relu aside), safe for finite differences
SMOOTH_ACTIVATIONS = (
    ActivationSpec.identity(),
    ActivationSpec.sigmoid(),
    ActivationSpec.relu(),
    ActivationSpec.dio_linear(2.0, -3.0, 1.0),
    ActivationSpec.dio_linear(-1.0, 2.0, 0.5),
    ActivationSpec.dio_quadratic(0.3, 1.0, 0.5, 0.2, 2.0),
    ActivationSpec.dio_quadratic(-0.2, 0.0, 0.0, 0.0, 1.0),
    ActivationSpec.dio_exponential(2, 1, 0.0),
    ActivationSpec.dio_exponential(4, 1, 0.0),
    ActivationSpec.dio_exponential(4, 2, 0.0),
)


def random_network(rng: random.Random, max_layers: int = 3, max_width: int = 5, acts=SMOOTH_ACTIVATIONS, scale=0.8):
    n_layers = rng.randint(1, max_layers)
    dims = [rng.randint(1, max_width) for _ in range(n_layers + 1)]
    layers = []
    for i in range(n_layers):
        w = [rng.uniform(-scale, scale) for _ in range(dims[i] * dims[i + 1])]
        b = [rng.uniform(-scale, scale) for _ in range(dims[i + 1])]
        layers.append(Layer(Matrix(dims[i + 1], dims[i], w), Vector(b), rng.choice(acts)))
    return Network(layers)


def random_batch(rng: random.Random, net: Network, n: int, kind: str = "mse"):
    X = Matrix(n, net.input_dim, [rng.uniform(-1, 1) for _ in range(n * net.input_dim)])
    if kind == "mse":
        Y = Matrix(n, net.output_dim, [rng.uniform(-1, 1) for _ in range(n * net.output_dim)])
    else:
        rows = []
        for _ in range(n):
            r = [0.0] * net.output_dim
            r[rng.randrange(net.output_dim)] = 1.0
            rows.append(r)
        Y = Matrix.from_rows(rows)
    return X, Y


CONSTRAINT_TEXTS = (("x1 - 2", 1), ("x1*x2 + x2 - 1", 2), ("x1^2 + x2^2 - x3", 3), ("2*x1 - x2 + x3^3", 3))


def random_constraint(rng: random.Random, n_params: int, scale: float = 1.0) -> Constraint:
    text, n_vars = rng.choice([c for c in CONSTRAINT_TEXTS if c[1] <= n_params])
    subset = rng.sample(range(n_params), n_vars)
    return Constraint(parse_polynomial(text, n_vars), EncodingMap(scale), subset)


# ---- reference implementation -------------------------------------------------------


def ref_forward(net: Network, x) -> list[float]:
    a = list(x)
    for layer in net.layers:
        W = layer.weights.tolist()
        z = [sum(wr[j] * a[j] for j in range(len(a))) + layer.bias[i] for i, wr in enumerate(W)]
        a = [activation_eval(layer.activation, v) for v in z]
    return a


def ref_sample_loss(pred, target, kind: str) -> float:
    if kind == "mse":
        return sum((p - t) ** 2 for p, t in zip(pred, target))
    m = max(pred)
    lse = m + math.log(sum(math.exp(p - m) for p in pred))
    return sum(t * (lse - p) for p, t in zip(pred, target))


def ref_batch_loss(net: Network, X: Matrix, Y: Matrix, kind: str) -> float:
    return sum(ref_sample_loss(ref_forward(net, X.row(i)), Y.row(i), kind) for i in range(X.rows)) / X.rows


def ref_poly(P, x) -> float:
    return sum(c * math.prod(v**e for v, e in zip(x, exps)) for c, exps in P.terms)


def ref_total_loss(net, X, Y, kind, lam=0.0, gamma=0.0, constraint=None, X_adv=None) -> float:
    """Total loss with the adversarial inputs supplied as fixed constants."""
    loss = ref_batch_loss(net, X, Y, kind)
    if lam > 0.0:
        s = constraint.encoding.scale
        theta = constraint.select(net.flat_params())
        loss += lam * ref_poly(constraint.polynomial, [s * t for t in theta]) ** 2
    if gamma > 0.0:
        loss += gamma * ref_batch_loss(net, X_adv, Y, kind)
    return loss


def central_diff(f, theta: list[float], h: float = 1e-6) -> list[float]:
    out = []
    for i in range(len(theta)):
        up = list(theta)
        dn = list(theta)
        up[i] += h
        dn[i] -= h
        out.append((f(up) - f(dn)) / (2 * h))
    return out


def grad_close(g: float, ref: float, rel: float = 1e-5, abs_: float = 1e-7) -> bool:
    return abs(g - ref) <= max(rel * max(abs(g), abs(ref)), abs_)
