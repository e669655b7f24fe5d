"""Continued fractions and convergents."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator


def continued_fraction(theta) -> Iterator[int]:
    """Partial quotients of ``theta``, taken as the exact rational it stores."""
    x = Fraction(theta)
    while True:
        a = math.floor(x)
        yield a
        frac = x - a
        if frac == 0:
            return
        x = 1 / frac


def convergents(theta) -> Iterator[tuple[int, int]]:
    # seeds p_{-1}/q_{-1} = 1/0 and p_{-2}/q_{-2} = 0/1
    p, p_prev = 1, 0
    q, q_prev = 0, 1
    for a in continued_fraction(theta):
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        yield p, q


def rational_approx(theta: float, max_den: int) -> tuple[int, int]:
    """Last convergent ``p/q`` of ``theta`` with ``q <= max_den``."""
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    if max_den < 1:
        raise ValueError("max_den must be >= 1")
    best = None
    for p, q in convergents(theta):
        if q > max_den:
            break
        best = (p, q)
    return best
