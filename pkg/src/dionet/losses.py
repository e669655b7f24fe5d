"""Task losses, their output gradients, accuracy, and the loss configuration."""
from __future__ import annotations

import math
from array import array
from dataclasses import dataclass
from typing import Optional

from .constraints import Constraint
from .errors import NumericError, ShapeError
from .linalg import Matrix, Vector

TASK_KINDS = ("mse", "cross_entropy")

# regression predictions within this distance of the target count as correct
REGRESSION_TOLERANCE = 0.5


@dataclass(frozen=True)
class LossConfig:
    """``task + lam * constraint + gamma * task(adversarial inputs)``.

    ``epsilon`` is the FGSM step used to build the adversarial inputs.
    """

    task_kind: str = "mse"
    lam: float = 0.0
    gamma: float = 0.0
    constraint: Optional[Constraint] = None
    epsilon: float = 0.0

    def __post_init__(self):
        if self.task_kind not in TASK_KINDS:
            raise ValueError(f"task_kind must be one of {TASK_KINDS}")
        if self.lam < 0 or self.gamma < 0 or self.epsilon < 0:
            raise ValueError("lam, gamma and epsilon must be non-negative")
        if self.lam > 0 and self.constraint is None:
            raise ValueError("lam > 0 needs a constraint")


def _logsumexp(row) -> float:
    m = max(row)
    return m + math.log(sum(math.exp(v - m) for v in row))


def task_loss(pred: Vector, target: Vector, kind: str = "mse") -> float:
    """Loss of one prediction vector against its target.

    ``mse`` averages squared errors over the entries; ``cross_entropy``
    treats ``pred`` as logits and ``target`` as a probability vector.
    """
    if len(pred) != len(target):
        raise ShapeError(f"prediction length {len(pred)} != target length {len(target)}")
    if kind == "mse":
        if len(pred) == 0:
            raise ShapeError("empty prediction")
        return sum((p - t) ** 2 for p, t in zip(pred, target)) / len(pred)
    if kind == "cross_entropy":
        lse = _logsumexp(list(pred))
        return sum(t * (lse - p) for p, t in zip(pred, target))
    raise ValueError(f"unknown task loss {kind!r}")


def batch_loss_and_grad(out: Matrix, Y: Matrix, kind: str) -> tuple[float, array]:
    """Mean per-sample loss over the batch and its gradient w.r.t. ``out``.

    For ``mse`` the per-sample loss is the squared Euclidean error
    ``||y - y_hat||^2``, which is the plain squared error for scalar outputs.
    """
    if out.shape != Y.shape:
        raise ShapeError(f"output shape {out.shape} != target shape {Y.shape}")
    n, k = out.shape
    if n == 0:
        raise ShapeError("empty batch")
    o, y = out._data, Y._data
    grad = array("d", bytes(8 * n * k))
    total = 0.0
    if kind == "mse":
        scale = 2.0 / n
        for i in range(n * k):
            r = o[i] - y[i]
            total += r * r
            grad[i] = scale * r
    elif kind == "cross_entropy":
        for r in range(n):
            row = o[r * k:(r + 1) * k]
            t = y[r * k:(r + 1) * k]
            lse = _logsumexp(row)
            tsum = sum(t)
            for j in range(k):
                total += t[j] * (lse - row[j])
                grad[r * k + j] = (tsum * math.exp(row[j] - lse) - t[j]) / n
    else:
        raise ValueError(f"unknown task loss {kind!r}")
    loss = total / n
    if not math.isfinite(loss):
        raise NumericError("task loss is not finite")
    return loss, grad


def batch_loss(out: Matrix, Y: Matrix, kind: str) -> float:
    return batch_loss_and_grad(out, Y, kind)[0]


def _argmax(row) -> int:
    best = 0
    for j in range(1, len(row)):
        if row[j] > row[best]:
            best = j
    return best


def accuracy(out: Matrix, Y: Matrix, kind: str) -> float:
    """Fraction of correct rows: argmax match for classification, every
    output within ``REGRESSION_TOLERANCE`` of its target for regression."""
    if out.shape != Y.shape:
        raise ShapeError(f"output shape {out.shape} != target shape {Y.shape}")
    n, k = out.shape
    if n == 0:
        return 0.0
    hits = 0
    for r in range(n):
        row = out._data[r * k:(r + 1) * k]
        t = Y._data[r * k:(r + 1) * k]
        if kind == "cross_entropy":
            hits += _argmax(row) == _argmax(t)
        else:
            hits += all(abs(p - q) <= REGRESSION_TOLERANCE for p, q in zip(row, t))
    return hits / n
