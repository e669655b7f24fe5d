"""Polynomial constraints, integer encoding/projection, continued fractions and LLL."""
from .encoding import (
    Constraint,
    EncodingMap,
    decode,
    diophantine_loss,
    encode,
    project_integers,
    project_to_grid,
    round_ties_to_zero,
)
from .lattice import LatticeBasis, LLLInitReport, gram_schmidt, lll_init, lll_reduce
from .polynomial import (
    DiophantinePolynomial,
    parse_polynomial,
    poly_eval,
    poly_eval_real,
    poly_gradient_real,
)
from .rational import continued_fraction, convergents, rational_approx

__all__ = [
    "Constraint",
    "DiophantinePolynomial",
    "EncodingMap",
    "LLLInitReport",
    "LatticeBasis",
    "continued_fraction",
    "convergents",
    "decode",
    "diophantine_loss",
    "encode",
    "gram_schmidt",
    "lll_init",
    "lll_reduce",
    "parse_polynomial",
    "poly_eval",
    "poly_eval_real",
    "poly_gradient_real",
    "project_integers",
    "project_to_grid",
    "rational_approx",
    "round_ties_to_zero",
]
