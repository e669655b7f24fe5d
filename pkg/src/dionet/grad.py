"""Hand-derived backpropagation for dense networks, and a central-difference
oracle to check it against."""
from __future__ import annotations

import math
from array import array
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ._backend import kernels
from .errors import NumericError, ShapeError
from .linalg import Matrix, Vector
from .losses import LossConfig, batch_loss, batch_loss_and_grad
from .network import Network, forward_batch, forward_trace

Batch = tuple[Matrix, Matrix]


@dataclass
class Gradients:
    dW: list[Matrix]
    db: list[Vector]
    dX: Optional[Matrix] = None

    def flat(self) -> list[float]:
        out: list[float] = []
        for w, b in zip(self.dW, self.db):
            out.extend(w._data)
            out.extend(b._data)
        return out

    @classmethod
    def from_flat(cls, net: Network, flat, dX: Optional[Matrix] = None) -> Gradients:
        shaped = net.with_flat_params(list(flat))
        return cls([l.weights for l in shaped.layers], [l.bias for l in shaped.layers], dX)


def _check_batch(net: Network, batch: Batch) -> tuple[Matrix, Matrix]:
    X, Y = batch
    if X.rows == 0:
        raise ShapeError("empty batch")
    if X.rows != Y.rows:
        raise ShapeError(f"{X.rows} inputs but {Y.rows} targets")
    if X.cols != net.input_dim or Y.cols != net.output_dim:
        raise ShapeError(f"batch shapes {X.shape}/{Y.shape} do not fit network {net!r}")
    return X, Y


def task_backward(net: Network, X: Matrix, Y: Matrix, kind: str) -> tuple[float, list[array], list[array], array]:
    """Task loss and its raw gradients: per-layer dW, db buffers and dX."""
    trace = forward_trace(net, X)
    loss, g = batch_loss_and_grad(trace[-1][1], Y, kind)
    n = X.rows
    dws: list[array] = [None] * len(net.layers)
    dbs: list[array] = [None] * len(net.layers)
    for l in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[l]
        act = layer.activation
        z = trace[l][0]._data
        g = kernels.mul(g, kernels.act_deriv(act.code, act._buf, z))
        a_in = X._data if l == 0 else trace[l - 1][1]._data
        dws[l], dbs[l], g = kernels.dense_backward(layer.weights._data, a_in, g, n, layer.fan_in, layer.fan_out)
    return loss, dws, dbs, g


def _sign(v: float) -> float:
    return 1.0 if v > 0.0 else (-1.0 if v < 0.0 else 0.0)


def _step(x: float, s: float, epsilon: float) -> float:
    v = x + s * epsilon
    if s == 0.0:
        return v
    # rounding of x + eps can overshoot by an ulp; pull back so |v - x| <= eps holds exactly
    limit = Fraction(epsilon)
    while abs(Fraction(v) - Fraction(x)) > limit:
        v = math.nextafter(v, x)
    return v


def fgsm_inputs(X: Matrix, dX: array, epsilon: float) -> Matrix:
    """``X + epsilon * sign(dX)`` with ``sign(0) = 0``."""
    if epsilon == 0.0:
        return X
    return Matrix(X.rows, X.cols, [_step(x, _sign(g), epsilon) for x, g in zip(X._data, dX)])


def adversarial_batch(net: Network, batch: Batch, cfg: LossConfig) -> Matrix:
    X, Y = _check_batch(net, batch)
    _, _, _, dX = task_backward(net, X, Y, cfg.task_kind)
    return fgsm_inputs(X, dX, cfg.epsilon)


def total_loss(net: Network, batch: Batch, cfg: LossConfig) -> float:
    """Clean task loss + lam * constraint loss + gamma * adversarial task loss."""
    X, Y = _check_batch(net, batch)
    loss = batch_loss(forward_batch(net, X), Y, cfg.task_kind)
    if cfg.lam > 0.0:
        loss += cfg.lam * cfg.constraint.loss(net)
    if cfg.gamma > 0.0:
        X_adv = adversarial_batch(net, (X, Y), cfg)
        loss += cfg.gamma * batch_loss(forward_batch(net, X_adv), Y, cfg.task_kind)
    return loss


def backward(net: Network, batch: Batch, cfg: LossConfig) -> tuple[float, Gradients]:
    """Total loss and its exact gradient with respect to every parameter.

    The adversarial inputs are treated as constants (their dependence on
    the parameters is through ``sign`` and has zero derivative almost
    everywhere). The constraint term is differentiated on the smooth
    embedding ``P(s * theta)``.
    """
    X, Y = _check_batch(net, batch)
    loss, dws, dbs, dX = task_backward(net, X, Y, cfg.task_kind)
    flat = array("d")
    for w, b in zip(dws, dbs):
        flat.extend(w)
        flat.extend(b)
    if cfg.gamma > 0.0:
        X_adv = fgsm_inputs(X, dX, cfg.epsilon)
        adv_loss, adws, adbs, _ = task_backward(net, X_adv, Y, cfg.task_kind)
        adv = array("d")
        for w, b in zip(adws, adbs):
            adv.extend(w)
            adv.extend(b)
        flat = kernels.axpy(cfg.gamma, adv, flat)
        loss += cfg.gamma * adv_loss
    if cfg.lam > 0.0:
        loss += cfg.lam * cfg.constraint.loss(net)
        flat = kernels.axpy(cfg.lam, array("d", cfg.constraint.loss_grad(net)), flat)
    if not kernels.all_finite(flat) or loss != loss or loss in (float("inf"), float("-inf")):
        raise NumericError("non-finite loss or gradient")
    return loss, Gradients.from_flat(net, flat, Matrix(X.rows, X.cols, dX))


def finite_diff_grad(net: Network, batch: Batch, cfg: LossConfig, h: float = 1e-6) -> Gradients:
    """Central differences ``(L(theta + h e_i) - L(theta - h e_i)) / 2h`` for every parameter."""
    if h <= 0:
        raise ValueError("h must be positive")
    theta = net.flat_params()
    out = []
    for i in range(len(theta)):
        orig = theta[i]
        theta[i] = orig + h
        up = total_loss(net.with_flat_params(theta), batch, cfg)
        theta[i] = orig - h
        down = total_loss(net.with_flat_params(theta), batch, cfg)
        theta[i] = orig
        out.append((up - down) / (2.0 * h))
    return Gradients.from_flat(net, out)
