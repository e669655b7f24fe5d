"""LLL lattice basis reduction in exact rational arithmetic, and its use to
compact encoded network parameters at initialisation."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..errors import RankError, ShapeError
from ..network import Network
from .encoding import EncodingMap, decode, encode


@dataclass(frozen=True)
class LatticeBasis:
    vectors: tuple[tuple, ...]

    def __post_init__(self):
        vecs = tuple(tuple(v) for v in self.vectors)
        if not vecs:
            raise ShapeError("empty basis")
        dim = len(vecs[0])
        if any(len(v) != dim for v in vecs):
            raise ShapeError("basis vectors differ in dimension")
        object.__setattr__(self, "vectors", vecs)

    @property
    def rank(self) -> int:
        return len(self.vectors)

    @property
    def dim(self) -> int:
        return len(self.vectors[0])


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def gram_schmidt(vectors: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Exact Gram-Schmidt data: ``mu[i][j]`` (j < i) and squared norms ``B``."""
    n = len(vectors)
    bstar: list[list[Fraction]] = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    B: list[Fraction] = []
    for i in range(n):
        v = [Fraction(x) for x in vectors[i]]
        for j in range(i):
            if B[j] == 0:
                continue
            mu[i][j] = _dot(vectors[i], bstar[j]) / B[j]
            v = [a - mu[i][j] * b for a, b in zip(v, bstar[j])]
        bstar.append(v)
        B.append(_dot(v, v))
    return mu, B


def _nearest(x: Fraction) -> int:
    # ties toward zero, matching the parameter projection
    a = abs(x)
    f = a.numerator // a.denominator
    r = f + 1 if a - f > Fraction(1, 2) else f
    return -r if x < 0 else r


def lll_reduce(basis: LatticeBasis, delta: float = 0.75) -> LatticeBasis:
    """Return an LLL-reduced basis of the same lattice.

    The result is size-reduced (``|mu_ij| <= 1/2``) and satisfies the Lovasz
    condition ``B_k >= (delta - mu_{k,k-1}^2) B_{k-1}``.
    """
    d = Fraction(delta)
    if not Fraction(1, 4) < d < 1:
        raise ValueError(f"delta must lie in (1/4, 1), got {delta}")
    b = [[Fraction(x) for x in v] for v in basis.vectors]
    n = len(b)
    mu, B = gram_schmidt(b)
    if any(Bi == 0 for Bi in B):
        raise RankError("basis vectors are linearly dependent")
    half = Fraction(1, 2)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            if abs(mu[k][j]) > half:
                q = _nearest(mu[k][j])
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                for i in range(j):
                    mu[k][i] -= q * mu[j][i]
                mu[k][j] -= q
        if B[k] >= (d - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            mu, B = gram_schmidt(b)
            k = max(k - 1, 1)
    out = []
    for v in b:
        if all(x.denominator == 1 for x in v):
            out.append(tuple(int(x) for x in v))
        else:
            out.append(tuple(v))
    return LatticeBasis(tuple(out))


@dataclass(frozen=True)
class LLLInitReport:
    reduced: bool
    reason: str
    basis: LatticeBasis | None = None
    reduced_basis: LatticeBasis | None = None


def _max_abs(values) -> float:
    return max((abs(v) for v in values), default=0.0)


def lll_init(net: Network, emap: EncodingMap = EncodingMap(), delta: float = 0.75) -> tuple[Network, LLLInitReport]:
    """Re-initialise parameters from an LLL-reduced basis of the encoded layer blocks.

    Each layer's encoded parameters (W row-major, then b) become one basis
    vector, zero-padded to a common length. The reduced vectors are decoded
    back in order, truncated to each layer's size. Falls back to a plain
    grid projection when the blocks are dependent, or when the reduced
    parameters would be larger in magnitude than the originals.
    """
    blocks = []
    for layer in net.layers:
        flat = list(layer.weights._data) + list(layer.bias._data)
        blocks.append(encode(flat, emap))
    width = max(len(v) for v in blocks)
    basis = LatticeBasis(tuple(tuple(v) + (0,) * (width - len(v)) for v in blocks))
    fallback = net.with_flat_params(decode(encode(net, emap), emap))
    try:
        reduced = lll_reduce(basis, delta)
    except RankError:
        return fallback, LLLInitReport(False, "rank-deficient parameter blocks", basis)

    flat: list[int] = []
    for v, block in zip(reduced.vectors, blocks):
        flat.extend(v[:len(block)])
    if _max_abs(flat) > _max_abs(x for blk in blocks for x in blk):
        return fallback, LLLInitReport(False, "reduced parameters exceed original magnitude", basis, reduced)
    return net.with_flat_params(decode(flat, emap)), LLLInitReport(True, "ok", basis, reduced)
