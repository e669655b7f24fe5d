"""Fixed-point integer encoding of parameters and the integer projection.

Rounding everywhere is to the nearest integer with ties broken toward
zero, so ``3.5 -> 3`` and ``-2.5 -> -2`` while ``0.697 -> 1``.
"""
from __future__ import annotations

import math
from array import array
from dataclasses import dataclass
from typing import Sequence

from .._backend import kernels
from ..errors import NumericError, ShapeError
from ..linalg import Matrix, Vector
from ..network import Layer, Network
from .polynomial import DiophantinePolynomial, poly_eval, poly_eval_real, poly_gradient_real


@dataclass(frozen=True)
class EncodingMap:
    """Fixed-point map ``theta -> round(scale * theta)``."""

    scale: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValueError(f"scale must be a positive finite number, got {self.scale!r}")
        object.__setattr__(self, "scale", float(self.scale))


def round_ties_to_zero(v: float) -> float:
    return kernels.round_ties_to_zero(array("d", [v]))[0]


def _flat(theta) -> list[float]:
    if isinstance(theta, Network):
        return theta.flat_params()
    if isinstance(theta, (Matrix, Vector)):
        return list(theta._data)
    return [float(v) for v in theta]


def encode(theta, emap: EncodingMap = EncodingMap()) -> list[int]:
    vals = array("d", (emap.scale * v for v in _flat(theta)))
    if not kernels.all_finite(vals):
        raise NumericError("cannot encode non-finite parameters")
    return [int(v) for v in kernels.round_ties_to_zero(vals)]


def decode(x: Sequence[int], emap: EncodingMap = EncodingMap()) -> list[float]:
    return [xi / emap.scale for xi in x]


def project_integers(theta):
    """Replace every coordinate by its nearest integer (ties toward zero).

    Accepts a float, a sequence of floats, a Matrix, a Vector or a whole
    Network and returns the same kind of object.
    """
    if isinstance(theta, (int, float)):
        return round_ties_to_zero(float(theta))
    if isinstance(theta, Matrix):
        return Matrix(theta.rows, theta.cols, kernels.round_ties_to_zero(theta._data))
    if isinstance(theta, Vector):
        return Vector(kernels.round_ties_to_zero(theta._data))
    if isinstance(theta, Network):
        return Network([
            Layer(project_integers(l.weights), project_integers(l.bias), l.activation)
            for l in theta.layers
        ])
    return list(kernels.round_ties_to_zero(array("d", theta)))


def project_to_grid(net: Network, scale: float = 1.0) -> Network:
    """Project onto the grid ``(1/scale) * Z``; ``scale=1`` is ``project_integers``."""
    if scale == 1.0:
        return project_integers(net)
    emap = EncodingMap(scale)
    return net.with_flat_params(decode(encode(net, emap), emap))


@dataclass(frozen=True)
class Constraint:
    """A polynomial constraint on (a subset of) the flattened parameters.

    ``subset`` lists flat parameter indices fed to ``x1 .. xn`` in order;
    ``None`` means all parameters.
    """

    polynomial: DiophantinePolynomial
    encoding: EncodingMap = EncodingMap()
    subset: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.subset is not None:
            object.__setattr__(self, "subset", tuple(int(i) for i in self.subset))
            if len(self.subset) != self.polynomial.n_vars:
                raise ShapeError(
                    f"subset selects {len(self.subset)} parameters, polynomial has {self.polynomial.n_vars} variables"
                )

    def select(self, flat: Sequence[float]) -> list[float]:
        if self.subset is None:
            if len(flat) != self.polynomial.n_vars:
                raise ShapeError(
                    f"polynomial has {self.polynomial.n_vars} variables but there are {len(flat)} parameters"
                )
            return list(flat)
        try:
            return [flat[i] for i in self.subset]
        except IndexError:
            raise ShapeError(f"subset index out of range for {len(flat)} parameters") from None

    def loss(self, theta) -> float:
        return diophantine_loss(self.polynomial, self.select(_flat(theta)), self.encoding)

    def loss_grad(self, theta) -> list[float]:
        """Gradient of ``loss`` with respect to every flat parameter."""
        flat = _flat(theta)
        s = self.encoding.scale
        x = [s * v for v in self.select(flat)]
        r = poly_eval_real(self.polynomial, x)
        dp = poly_gradient_real(self.polynomial, x)
        grad = [0.0] * len(flat)
        idx = range(len(flat)) if self.subset is None else self.subset
        for i, g in zip(idx, dp):
            grad[i] += 2.0 * r * s * g
        return grad

    def residual(self, theta) -> int:
        """Exact ``P(encode(theta))**2`` on the rounded encoding."""
        x = encode(self.select(_flat(theta)), self.encoding)
        return poly_eval(self.polynomial, x) ** 2


def diophantine_loss(P: DiophantinePolynomial, theta, emap: EncodingMap = EncodingMap()) -> float:
    """Squared constraint residual ``P(s*theta)**2`` on the smooth embedding.

    Agrees with the rounded residual whenever ``s*theta`` is integral.
    """
    flat = _flat(theta)
    if len(flat) != P.n_vars:
        raise ShapeError(f"polynomial has {P.n_vars} variables, got {len(flat)} parameters")
    r = poly_eval_real(P, [emap.scale * v for v in flat])
    return r * r
