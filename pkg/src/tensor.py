"""Kronecker powers, tensor multi-indices and Kronecker-structured block operators.

Flat indices are big-endian: the first tensor slot is the most significant
digit, which matches the row ordering of ``numpy.kron``.
"""
from dataclasses import dataclass, field
from functools import reduce
from itertools import product

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import get_settings
from .exceptions import InputError, ResourceError


@dataclass(frozen=True)
class TensorIndex:
    digits: tuple[int, ...]
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InputError(f"Base dimension must be positive, got {self.n}")
        for position, digit in enumerate(self.digits):
            if not 0 <= digit < self.n:
                raise InputError(
                    f"Digit {digit} at slot {position} is outside [0, {self.n})"
                )

    @property
    def order(self) -> int:
        return len(self.digits)


def flat_index(index: TensorIndex) -> int:
    flat = 0
    for digit in index.digits:
        flat = flat * index.n + digit
    return flat


def multi_index(flat: int, n: int, m: int) -> TensorIndex:
    if not 0 <= flat < n**m:
        raise InputError(f"Flat index {flat} is outside [0, {n}^{m})")
    digits = []
    for _ in range(m):
        flat, digit = divmod(flat, n)
        digits.append(digit)
    return TensorIndex(tuple(reversed(digits)), n)


def kron_power(x: ArrayLike, k: int) -> NDArray[np.float64]:
    """Return the k-fold Kronecker power of ``x``; the 0-th power is ``(1,)``."""
    if k < 0:
        raise InputError(f"Kronecker power order must be non-negative, got {k}")
    x = np.asarray(x, dtype=float)
    result = np.ones(1)
    for _ in range(k):
        result = np.kron(result, x)
    return result


def lifted_dims(n: int, order: int) -> tuple[int, ...]:
    return tuple(n**k for k in range(order + 1))


@dataclass(frozen=True)
class Identity:
    dim: int

    @property
    def rows(self) -> int:
        return self.dim

    @property
    def cols(self) -> int:
        return self.dim

    def dense(self) -> NDArray[np.float64]:
        return np.eye(self.dim)


@dataclass(frozen=True, eq=False)
class CoeffBlock:
    """A constant r x c coefficient matrix used as one Kronecker factor."""

    matrix: NDArray[np.float64]

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=float)
        if matrix.ndim != 2:
            raise InputError(f"Coefficient block must be 2-D, got shape {matrix.shape}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    def dense(self) -> NDArray[np.float64]:
        return self.matrix


Factor = Identity | CoeffBlock


@dataclass(frozen=True)
class KronTerm:
    factors: tuple[Factor, ...]
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not self.factors:
            raise InputError("A Kronecker term needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def rows(self) -> int:
        return reduce(lambda acc, f: acc * f.rows, self.factors, 1)

    @property
    def cols(self) -> int:
        return reduce(lambda acc, f: acc * f.cols, self.factors, 1)

    def apply(self, v: NDArray[np.float64]) -> NDArray[np.float64]:
        tensor = v.reshape([f.cols for f in self.factors])
        for axis, factor in enumerate(self.factors):
            if isinstance(factor, CoeffBlock):
                contracted = np.tensordot(factor.matrix, tensor, axes=([1], [axis]))
                tensor = np.moveaxis(contracted, 0, axis)
        return self.scale * tensor.reshape(-1)

    def to_dense(self) -> NDArray[np.float64]:
        return self.scale * reduce(np.kron, (f.dense() for f in self.factors))


@dataclass(frozen=True)
class BlockOperator:
    """Block matrix whose (k, l) blocks are sums of scaled Kronecker terms."""

    block_dims_out: tuple[int, ...]
    block_dims_in: tuple[int, ...]
    blocks: dict[tuple[int, int], tuple[KronTerm, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "block_dims_out", tuple(self.block_dims_out))
        object.__setattr__(self, "block_dims_in", tuple(self.block_dims_in))

        ordered: dict[tuple[int, int], tuple[KronTerm, ...]] = {}
        for (k, l), terms in sorted(self.blocks.items()):
            if not (0 <= k < len(self.block_dims_out) and 0 <= l < len(self.block_dims_in)):
                raise InputError(f"Block ({k}, {l}) is outside the operator's block grid")
            for term in terms:
                if term.rows != self.block_dims_out[k] or term.cols != self.block_dims_in[l]:
                    raise InputError(
                        f"Term of shape {term.rows}x{term.cols} does not fit block ({k}, {l}) "
                        f"of shape {self.block_dims_out[k]}x{self.block_dims_in[l]}"
                    )
            if terms:
                ordered[(k, l)] = tuple(terms)
        object.__setattr__(self, "blocks", ordered)

    @property
    def shape(self) -> tuple[int, int]:
        return sum(self.block_dims_out), sum(self.block_dims_in)

    @property
    def offsets_out(self) -> tuple[int, ...]:
        return tuple(np.concatenate([[0], np.cumsum(self.block_dims_out)]).astype(int))

    @property
    def offsets_in(self) -> tuple[int, ...]:
        return tuple(np.concatenate([[0], np.cumsum(self.block_dims_in)]).astype(int))

    @property
    def term_count(self) -> int:
        return sum(len(terms) for terms in self.blocks.values())

    def apply(self, y: ArrayLike) -> NDArray[np.float64]:
        y = np.asarray(y, dtype=float)
        rows, cols = self.shape
        if y.shape != (cols,):
            raise InputError(f"Lifted vector has shape {y.shape}, operator expects ({cols},)")

        out_offsets = self.offsets_out
        in_offsets = self.offsets_in
        out = np.zeros(rows)
        # fixed (k, l, term) order keeps results bit-identical between runs
        for (k, l), terms in self.blocks.items():
            source = y[in_offsets[l] : in_offsets[l + 1]]
            target = out[out_offsets[k] : out_offsets[k + 1]]
            for term in terms:
                target += term.apply(source)
        return out

    def to_dense(self, cap: int | None = None) -> NDArray[np.float64]:
        if cap is None:
            cap = get_settings().numerics.dense_cap
        rows, cols = self.shape
        if rows > cap or cols > cap:
            raise ResourceError(
                f"Dense materialization of a {rows}x{cols} operator exceeds the cap of {cap}"
            )

        out_offsets = self.offsets_out
        in_offsets = self.offsets_in
        dense = np.zeros((rows, cols))
        for (k, l), terms in self.blocks.items():
            view = dense[out_offsets[k] : out_offsets[k + 1], in_offsets[l] : in_offsets[l + 1]]
            for term in terms:
                view += term.to_dense()
        return dense

    def split(self, y: ArrayLike, side: str = "in") -> list[NDArray[np.float64]]:
        offsets = self.offsets_in if side == "in" else self.offsets_out
        y = np.asarray(y, dtype=float)
        return [y[offsets[b] : offsets[b + 1]] for b in range(len(offsets) - 1)]


def apply(op: BlockOperator, y: ArrayLike) -> NDArray[np.float64]:
    return op.apply(y)


def to_dense(op: BlockOperator, cap: int | None = None) -> NDArray[np.float64]:
    return op.to_dense(cap)


def binomial_lift_transform(s: ArrayLike, P: int) -> BlockOperator:
    """Map the monomial lift (1, x, ..., x^P) onto the centred lift (1, x-s, ..., (x-s)^P).

    Each slot of (x - s)^{(x)p} is either an x slot (identity factor) or a -s
    slot (an n x 1 column); summing over all 2^p slot patterns expands the
    power exactly. The result is block lower triangular with identity diagonal.
    """
    if P < 0:
        raise InputError(f"Lift order must be non-negative, got {P}")
    s = np.asarray(s, dtype=float).reshape(-1)
    n = s.size
    minus_s = CoeffBlock(-s.reshape(n, 1))

    blocks: dict[tuple[int, int], list[KronTerm]] = {(0, 0): [KronTerm((CoeffBlock(np.ones((1, 1))),))]}
    for p in range(1, P + 1):
        for pattern in product((True, False), repeat=p):
            factors = tuple(Identity(n) if is_x else minus_s for is_x in pattern)
            blocks.setdefault((p, sum(pattern)), []).append(KronTerm(factors))

    dims = lifted_dims(n, P)
    return BlockOperator(dims, dims, {key: tuple(terms) for key, terms in blocks.items()})
