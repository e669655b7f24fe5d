"""Neural networks with integer-constrained parameters.

Training can add a polynomial-constraint penalty and an FGSM adversarial
term to the task loss, and can project weights onto an integer grid after
every step. Hot loops run in a compiled extension when one is available.
"""
from ._backend import NAME as BACKEND
from .errors import (
    ConfigError,
    DegenerateInputError,
    DionetError,
    DomainError,
    FormatError,
    NumericError,
    RankError,
    ShapeError,
    UnsupportedError,
)
from .linalg import Matrix, Vector, axpy, matmul
from .losses import LossConfig, accuracy, task_loss
from .network import (
    ActivationSpec,
    Layer,
    Network,
    activation_bound,
    activation_eval,
    forward,
    forward_batch,
    lipschitz_constant,
)
from .grad import Gradients, backward, total_loss
from .training import Dataset, EpochMetrics, TrainingConfig, apply_update, evaluate, train, train_epoch

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ConfigError", "DegenerateInputError", "DionetError", "DomainError", "FormatError",
    "NumericError", "RankError", "ShapeError", "UnsupportedError", "Matrix", "Vector", "axpy", "matmul",
    "LossConfig", "accuracy", "task_loss", "ActivationSpec", "Layer", "Network", "activation_bound",
    "activation_eval", "forward", "forward_batch", "lipschitz_constant", "Gradients", "backward",
    "total_loss", "Dataset", "EpochMetrics", "TrainingConfig", "apply_update", "evaluate", "train",
    "train_epoch",
]
