"""Integer-coefficient multivariate polynomials.

Text form, as used in config files::

    x1^2 + x2^2 - x3^2
    3*x1*x2 - 7
    -2 x1^3 x4 + x2

Variables are ``x1 .. xn`` (1-based). Factors within a term are joined by
``*`` or whitespace; terms by ``+`` / ``-``. Whitespace is ignored.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..errors import DomainError, FormatError, ShapeError

# |value| of every intermediate in poly_eval must stay below this
INT_LIMIT = 2**127

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<var>x(?P<idx>\d+))|(?P<op>[-+*^]))")


@dataclass(frozen=True)
class DiophantinePolynomial:
    n_vars: int
    terms: tuple[tuple[int, tuple[int, ...]], ...]

    def __post_init__(self):
        if self.n_vars < 0:
            raise ValueError("n_vars must be non-negative")
        seen = set()
        terms = []
        for coef, exps in self.terms:
            exps = tuple(exps)
            if not isinstance(coef, int) or isinstance(coef, bool):
                raise TypeError(f"coefficient {coef!r} is not an integer")
            if coef == 0:
                raise ValueError("zero coefficient")
            if len(exps) != self.n_vars:
                raise ShapeError(f"exponent vector {exps} has length != {self.n_vars}")
            if any(not isinstance(e, int) or e < 0 for e in exps):
                raise ValueError(f"exponents must be non-negative integers: {exps}")
            if exps in seen:
                raise ValueError(f"duplicate monomial {exps}")
            seen.add(exps)
            terms.append((coef, exps))
        object.__setattr__(self, "terms", tuple(terms))

    @classmethod
    def from_terms(cls, n_vars: int, terms: Iterable[tuple[int, Sequence[int]]]) -> DiophantinePolynomial:
        """Build a polynomial, merging like monomials and dropping zeros."""
        acc: dict[tuple[int, ...], int] = {}
        for coef, exps in terms:
            key = tuple(exps)
            acc[key] = acc.get(key, 0) + coef
        return cls(n_vars, tuple((c, e) for e, c in acc.items() if c != 0))

    @classmethod
    def parse(cls, text: str, n_vars: int | None = None) -> DiophantinePolynomial:
        return parse_polynomial(text, n_vars)

    @property
    def degree(self) -> int:
        return max((sum(e) for _, e in self.terms), default=0)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for coef, exps in self.terms:
            factors = [f"x{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e]
            mag = abs(coef)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            sign = "-" if coef < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def _tokenize(text: str):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormatError(f"unexpected character {text[pos:].lstrip()[:1]!r} at offset {pos}")
        if m.group("int") is not None:
            tokens.append(("int", int(m.group("int")), m.start("int")))
        elif m.group("var") is not None:
            idx = int(m.group("idx"))
            if idx < 1:
                raise FormatError(f"variable index must start at 1 (offset {m.start('var')})")
            tokens.append(("var", idx, m.start("var")))
        else:
            tokens.append((m.group("op"), None, m.start("op")))
        pos = m.end()
    return tokens


def parse_polynomial(text: str, n_vars: int | None = None) -> DiophantinePolynomial:
    tokens = _tokenize(text)
    if not tokens:
        raise FormatError("empty polynomial")
    i = 0
    raw_terms: list[tuple[int, dict[int, int]]] = []

    def expect_factor_start(j):
        return j < len(tokens) and tokens[j][0] in ("int", "var")

    while i < len(tokens):
        sign = 1
        if tokens[i][0] in "+-":
            sign = -1 if tokens[i][0] == "-" else 1
            i += 1
        elif raw_terms:
            raise FormatError(f"expected '+' or '-' at offset {tokens[i][2]}")
        if not expect_factor_start(i):
            where = tokens[i][2] if i < len(tokens) else len(text)
            raise FormatError(f"expected a number or variable at offset {where}")
        coef = 1
        powers: dict[int, int] = {}
        while True:
            kind, val, off = tokens[i]
            i += 1
            if kind == "int":
                coef *= val
            else:
                exp = 1
                if i < len(tokens) and tokens[i][0] == "^":
                    if i + 1 >= len(tokens) or tokens[i + 1][0] != "int":
                        raise FormatError(f"expected an integer exponent after '^' at offset {tokens[i][2]}")
                    exp = tokens[i + 1][1]
                    i += 2
                powers[val] = powers.get(val, 0) + exp
            if i < len(tokens) and tokens[i][0] == "*":
                i += 1
                if not expect_factor_start(i):
                    raise FormatError(f"dangling '*' at offset {tokens[i - 1][2]}")
                continue
            if expect_factor_start(i):
                continue
            break
        raw_terms.append((sign * coef, powers))

    used = max((v for _, p in raw_terms for v in p), default=0)
    if n_vars is None:
        n_vars = used
    elif used > n_vars:
        raise FormatError(f"variable x{used} exceeds n_vars={n_vars}")
    terms = []
    for coef, powers in raw_terms:
        exps = [0] * n_vars
        for v, e in powers.items():
            exps[v - 1] = e
        terms.append((coef, exps))
    return DiophantinePolynomial.from_terms(n_vars, terms)


def _as_int(v) -> int:
    if isinstance(v, int):
        return v
    if isinstance(v, float) and v.is_integer():
        return int(v)
    raise DomainError(f"{v!r} is not an integer")


def _check(v: int) -> int:
    if not -INT_LIMIT < v < INT_LIMIT:
        raise OverflowError("polynomial evaluation exceeds 128-bit range")
    return v


def poly_eval(P: DiophantinePolynomial, x: Sequence[int]) -> int:
    """Exact evaluation at an integer point; overflow past 128 bits is an error."""
    if len(x) != P.n_vars:
        raise ShapeError(f"point has {len(x)} coordinates, polynomial has {P.n_vars} variables")
    xs = [_as_int(v) for v in x]
    total = 0
    for coef, exps in P.terms:
        term = coef
        for xi, e in zip(xs, exps):
            for _ in range(e):
                term = _check(term * xi)
        total = _check(total + term)
    return total


def poly_eval_real(P: DiophantinePolynomial, x: Sequence[float]) -> float:
    if len(x) != P.n_vars:
        raise ShapeError(f"point has {len(x)} coordinates, polynomial has {P.n_vars} variables")
    total = 0.0
    for coef, exps in P.terms:
        term = float(coef)
        for xi, e in zip(x, exps):
            if e:
                term *= xi**e
        total += term
    return total


def poly_gradient_real(P: DiophantinePolynomial, x: Sequence[float]) -> list[float]:
    if len(x) != P.n_vars:
        raise ShapeError(f"point has {len(x)} coordinates, polynomial has {P.n_vars} variables")
    grad = [0.0] * P.n_vars
    for coef, exps in P.terms:
        for i, ei in enumerate(exps):
            if ei == 0:
                continue
            term = float(coef * ei)
            for j, (xj, ej) in enumerate(zip(x, exps)):
                e = ej - 1 if j == i else ej
                if e:
                    term *= xj**e
            grad[i] += term
    return grad
