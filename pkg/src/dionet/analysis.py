"""Stability and robustness measurements on trained networks."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .constraints import Constraint, encode, poly_eval
from .errors import DegenerateInputError, ShapeError
from .grad import adversarial_batch
from .linalg import Matrix, Vector
from .losses import LossConfig, accuracy
from .network import Network, activation_eval, forward_batch, lipschitz_constant


def _sq_dist(a, b) -> float:
    return sum((p - q) ** 2 for p, q in zip(a, b))


def output_variance(net: Network, x: Vector, sigma: float, samples: int, seed: int = 0) -> float:
    """Monte-Carlo estimate of ``E ||N(x + dx) - N(x)||^2`` with ``dx ~ N(0, sigma^2 I)``."""
    if sigma < 0 or samples < 1:
        raise ValueError("need sigma >= 0 and samples >= 1")
    if len(x) != net.input_dim:
        raise ShapeError(f"input length {len(x)} != {net.input_dim}")
    if sigma == 0:
        return 0.0
    return _variance_and_energy(net, x, sigma, samples, random.Random(seed))[0]


def _variance_and_energy(net, x, sigma, samples, rng):
    d = len(x)
    base = forward_batch(net, Matrix(1, d, x._data))._data
    noise = [rng.gauss(0.0, sigma) for _ in range(samples * d)]
    X = Matrix(samples, d, [x[j % d] + e for j, e in enumerate(noise)])
    out = forward_batch(net, X)
    k = net.output_dim
    acc = 0.0
    for r in range(samples):
        acc += _sq_dist(out._data[r * k:(r + 1) * k], base)
    energy = sum(e * e for e in noise) / samples
    return acc / samples, energy


def mean_output_variance(net: Network, X: Matrix, sigma: float, samples: int, seed: int = 0) -> float:
    """``output_variance`` averaged over the rows of ``X`` (one shared generator)."""
    if sigma == 0 or X.rows == 0:
        return 0.0
    rng = random.Random(seed)
    total = 0.0
    for r in range(X.rows):
        total += _variance_and_energy(net, X.row(r), sigma, samples, rng)[0]
    return total / X.rows


def _jacobi_max_eig(a: list[list[float]]) -> float:
    """Largest eigenvalue of a small symmetric matrix by cyclic Jacobi rotations."""
    n = len(a)
    a = [row[:] for row in a]
    for _ in range(100):
        off = sum(a[i][j] ** 2 for i in range(n) for j in range(n) if i != j)
        if off <= 1e-30 * max(1.0, sum(a[i][i] ** 2 for i in range(n))):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p][q] == 0.0:
                    continue
                theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = c * akp - s * akq
                    a[k][q] = s * akp + c * akq
                for k in range(n):
                    apk, aqk = a[p][k], a[q][k]
                    a[p][k] = c * apk - s * aqk
                    a[q][k] = s * apk + c * aqk
    return max(a[i][i] for i in range(n))


def spectral_norm(W: Matrix) -> float:
    if W.rows == 0 or W.cols == 0:
        return 0.0
    m = W.tolist()
    # Gram matrix on the smaller side
    if W.cols <= W.rows:
        g = [[sum(m[r][i] * m[r][j] for r in range(W.rows)) for j in range(W.cols)] for i in range(W.cols)]
    else:
        g = [[sum(m[i][c] * m[j][c] for c in range(W.cols)) for j in range(W.rows)] for i in range(W.rows)]
    lam = _jacobi_max_eig(g)
    # rounding margin keeps this an upper bound
    return math.sqrt(max(lam, 0.0)) * (1.0 + 1e-12)


def frobenius_norm(W: Matrix) -> float:
    return math.sqrt(sum(v * v for v in W._data))


def weight_norm(W: Matrix, norm: str = "spectral") -> float:
    if norm == "spectral":
        return spectral_norm(W)
    if norm == "frobenius":
        return frobenius_norm(W)
    raise ValueError(f"unknown norm {norm!r}")


def network_lipschitz_upper(net: Network, M: float, norm: str = "spectral") -> float:
    """Product over layers of activation Lipschitz constant times weight norm.

    ``M`` must bound every pre-activation magnitude for the quadratic and
    exponential constants to apply.
    """
    bound = 1.0
    for layer in net.layers:
        bound *= lipschitz_constant(layer.activation, M) * weight_norm(layer.weights, norm)
    return bound


def adversarial_accuracy(net: Network, data, epsilon: float, kind: str = "mse") -> float:
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    X, Y = data
    cfg = LossConfig(kind, epsilon=epsilon)
    if epsilon > 0:
        X = adversarial_batch(net, (X, Y), cfg)
    return accuracy(forward_batch(net, X), Y, kind)


@dataclass
class ErrorPropagationReport:
    ratios: list[float]
    layer_bounds: list[float]
    activation_constants: list[float]
    initial_error: float
    final_error: float
    max_preactivation: float
    product_bound: float = field(init=False)
    activation_only_bound: float = field(init=False)

    def __post_init__(self):
        self.product_bound = math.prod(self.layer_bounds)
        self.activation_only_bound = math.prod(self.activation_constants)

    @property
    def within_bounds(self) -> bool:
        return all(r <= b * (1 + 1e-9) + 1e-12 for r, b in zip(self.ratios, self.layer_bounds))

    @property
    def final_ratio(self) -> float:
        return self.final_error / self.initial_error


def error_propagation_report(net: Network, x: Vector, delta: Vector, M: float, norm: str = "spectral") -> ErrorPropagationReport:
    """Track how an input error grows through each layer.

    Per layer, records ``||f(a + d) - f(a)|| / ||d||`` next to its bound
    ``L_phi(M) * ||W||``. The report carries both the weight-aware product
    bound and the activation-only product.
    """
    if len(x) != net.input_dim or len(delta) != net.input_dim:
        raise ShapeError("x and delta must match the network input dimension")
    e0 = math.sqrt(sum(d * d for d in delta))
    if e0 == 0.0:
        raise DegenerateInputError("delta has zero norm")
    a = list(x)
    b = [p + q for p, q in zip(x, delta)]
    ratios, bounds, consts = [], [], []
    max_pre = 0.0
    err = e0
    for layer in net.layers:
        za = _affine(layer, a)
        zb = _affine(layer, b)
        max_pre = max(max_pre, max(abs(v) for v in za), max(abs(v) for v in zb))
        a = [activation_eval(layer.activation, v) for v in za]
        b = [activation_eval(layer.activation, v) for v in zb]
        new_err = math.sqrt(_sq_dist(a, b))
        ratios.append(new_err / err if err > 0.0 else 0.0)
        lc = lipschitz_constant(layer.activation, M)
        consts.append(lc)
        bounds.append(lc * weight_norm(layer.weights, norm))
        err = new_err
    return ErrorPropagationReport(ratios, bounds, consts, e0, err, max_pre)


def _affine(layer, a):
    W = layer.weights
    return [
        sum(W._data[o * W.cols + p] * a[p] for p in range(W.cols)) + layer.bias[o]
        for o in range(W.rows)
    ]


@dataclass(frozen=True)
class StabilityReport:
    variance: float
    lipschitz_upper: float
    samples: int
    sigma: float
    input_energy: float

    @property
    def certified(self) -> bool:
        """Variance respects ``L^2 * E||dx||^2`` on the drawn sample."""
        return self.variance <= self.lipschitz_upper**2 * self.input_energy * (1 + 1e-9) + 1e-300


def stability_report(net: Network, x: Vector, sigma: float, samples: int, M: float, seed: int = 0) -> StabilityReport:
    if sigma == 0:
        var, energy = 0.0, 0.0
    else:
        var, energy = _variance_and_energy(net, x, sigma, samples, random.Random(seed))
    return StabilityReport(var, network_lipschitz_upper(net, M), samples, sigma, energy)


def constraint_survival_fraction(
    net: Network, constraint: Constraint, sigma: float, samples: int, seed: int = 0
) -> float:
    """Fraction of Gaussian parameter perturbations that keep ``P(encode(theta + d)) = 0``.

    Only the constrained coordinates are perturbed.
    """
    rng = random.Random(seed)
    theta = constraint.select(net.flat_params())
    kept = 0
    for _ in range(samples):
        moved = [t + rng.gauss(0.0, sigma) for t in theta]
        if poly_eval(constraint.polynomial, encode(moved, constraint.encoding)) == 0:
            kept += 1
    return kept / samples
