"""Gradient-descent training loop, in plain (normal) or integer-projected
(diophantine) mode, with optional constraint and adversarial terms."""
from __future__ import annotations

import logging
import math
import random
from array import array
from dataclasses import asdict, dataclass
from typing import Callable, NamedTuple, Optional

from ._backend import kernels
from .constraints import EncodingMap, lll_init
from .errors import NumericError
from .grad import adversarial_batch, backward, fgsm_inputs, task_backward, total_loss
from .linalg import Matrix, Vector
from .losses import LossConfig, accuracy, batch_loss, task_loss
from .network import Network, forward_batch

__all__ = [
    "Dataset",
    "EpochMetrics",
    "LossConfig",
    "TrainingConfig",
    "adversarial_perturb",
    "apply_update",
    "evaluate",
    "task_loss",
    "total_loss",
    "train",
    "train_epoch",
]

log = logging.getLogger(__name__)

MODES = ("normal", "diophantine")


class Dataset(NamedTuple):
    X: Matrix
    Y: Matrix

    def __len__(self) -> int:
        return self.X.rows

    def take(self, idx) -> Dataset:
        xs, ys = self.X, self.Y
        return Dataset(
            Matrix(len(idx), xs.cols, [v for i in idx for v in xs._data[i * xs.cols:(i + 1) * xs.cols]]),
            Matrix(len(idx), ys.cols, [v for i in idx for v in ys._data[i * ys.cols:(i + 1) * ys.cols]]),
        )


@dataclass(frozen=True)
class TrainingConfig:
    eta: float = 0.1
    epochs: int = 1
    batch_size: int = 0  # 0 means full batch
    mode: str = "normal"
    seed: int = 0
    lll_init: bool = False
    # diophantine mode projects onto (1/projection_scale) * Z; 1 gives integers
    projection_scale: float = 1.0

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 0:
            raise ValueError("batch_size must be >= 0")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not self.projection_scale > 0:
            raise ValueError("projection_scale must be positive")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    train_loss: float
    train_acc: float
    val_loss: float
    val_acc: float
    adv_acc: float
    constraint_residual: float

    FIELDS = ("epoch", "train_loss", "train_acc", "val_loss", "val_acc", "adv_acc", "constraint_residual")

    def row(self) -> tuple:
        return tuple(getattr(self, f) for f in self.FIELDS)


def adversarial_perturb(net: Network, x: Vector, y: Vector, epsilon: float, kind: str = "mse") -> Vector:
    """FGSM step ``x + epsilon * sign(grad_x task_loss)``; ``sign(0) = 0``."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    X = Matrix(1, len(x), x._data)
    Y = Matrix(1, len(y), y._data)
    _, _, _, dX = task_backward(net, X, Y, kind)
    return Vector(fgsm_inputs(X, dX, epsilon)._data)


def _project(flat: array, scale: float) -> array:
    if scale == 1.0:
        return kernels.round_ties_to_zero(flat)
    scaled = array("d", (scale * v for v in flat))
    return array("d", (v / scale for v in kernels.round_ties_to_zero(scaled)))


def apply_update(net: Network, grad_flat, eta: float, mode: str = "normal", projection_scale: float = 1.0) -> Network:
    """One step ``theta - eta * grad``, projected in diophantine mode."""
    theta = array("d", net.flat_params())
    new = kernels.axpy(-eta, array("d", grad_flat), theta)
    if mode == "diophantine":
        new = _project(new, projection_scale)
    return net.with_flat_params(new)


def evaluate(net: Network, data: Dataset, cfg: LossConfig) -> tuple[float, float, float]:
    """Clean loss, clean accuracy and FGSM accuracy at ``cfg.epsilon``."""
    out = forward_batch(net, data.X)
    loss = batch_loss(out, data.Y, cfg.task_kind)
    acc = accuracy(out, data.Y, cfg.task_kind)
    if cfg.epsilon > 0.0:
        X_adv = adversarial_batch(net, data, cfg)
        adv = accuracy(forward_batch(net, X_adv), data.Y, cfg.task_kind)
    else:
        adv = acc
    return loss, acc, adv


def _residual(net: Network, cfg: LossConfig) -> float:
    if cfg.constraint is None:
        return 0.0
    return float(cfg.constraint.residual(net))


def _batches(n: int, t_cfg: TrainingConfig, rng: Optional[random.Random]):
    idx = list(range(n))
    size = t_cfg.batch_size or n
    if size >= n:
        return [None]
    if rng is not None:
        rng.shuffle(idx)
    return [idx[i:i + size] for i in range(0, n, size)]


def train_epoch(
    net: Network,
    data: Dataset,
    t_cfg: TrainingConfig,
    l_cfg: LossConfig,
    rng: Optional[random.Random] = None,
    epoch: int = 1,
    val_data: Optional[Dataset] = None,
) -> tuple[Network, EpochMetrics]:
    data = Dataset(*data)
    if len(data) == 0:
        raise ValueError("no training data")
    for bi, idx in enumerate(_batches(len(data), t_cfg, rng)):
        batch = data if idx is None else data.take(idx)
        try:
            _, grads = backward(net, batch, l_cfg)
            net = apply_update(net, grads.flat(), t_cfg.eta, t_cfg.mode, t_cfg.projection_scale)
        except NumericError as exc:
            raise NumericError(f"epoch {epoch}, batch {bi}: {exc}") from exc
    val = Dataset(*val_data) if val_data is not None else data
    tr_loss, tr_acc, _ = evaluate(net, data, LossConfig(l_cfg.task_kind))
    v_loss, v_acc, adv_acc = evaluate(net, val, l_cfg)
    for name, v in (("train_loss", tr_loss), ("val_loss", v_loss)):
        if not math.isfinite(v):
            raise NumericError(f"epoch {epoch}: {name} is not finite")
    metrics = EpochMetrics(epoch, tr_loss, tr_acc, v_loss, v_acc, adv_acc, _residual(net, l_cfg))
    return net, metrics


def train(
    net: Network,
    train_data: Dataset,
    val_data: Optional[Dataset],
    t_cfg: TrainingConfig,
    l_cfg: LossConfig,
    on_epoch: Optional[Callable[[Network, EpochMetrics], None]] = None,
) -> tuple[Network, list[EpochMetrics]]:
    """Run ``t_cfg.epochs`` epochs; all randomness comes from ``t_cfg.seed``.

    ``on_epoch`` is called with the network and metrics at every epoch boundary.
    """
    rng = random.Random(t_cfg.seed)
    if t_cfg.lll_init:
        emap = l_cfg.constraint.encoding if l_cfg.constraint is not None else EncodingMap(t_cfg.projection_scale)
        net, report = lll_init(net, emap)
        log.info("lll init: %s", report.reason)
    if t_cfg.mode == "diophantine":
        net = net.with_flat_params(_project(array("d", net.flat_params()), t_cfg.projection_scale))
    history = []
    for epoch in range(1, t_cfg.epochs + 1):
        net, m = train_epoch(net, train_data, t_cfg, l_cfg, rng, epoch, val_data)
        history.append(m)
        if on_epoch is not None:
            on_epoch(net, m)
        log.debug("epoch %d train_loss=%.6g val_acc=%.4f", epoch, m.train_loss, m.val_acc)
    return net, history
