import json
import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import ValidationError

from .exceptions import InputError, ModelParseError
from .models import ModelFile, ModelTermRecord
from .tensor import TensorIndex, flat_index, kron_power


@dataclass(frozen=True)
class PolyTerm:
    m: int
    row: int
    cols: tuple[int, ...]
    value: float


@dataclass(frozen=True, eq=False)
class PivotState:
    s: NDArray[np.float64]

    def __post_init__(self) -> None:
        s = np.array(self.s, dtype=float).reshape(-1)
        if not np.all(np.isfinite(s)):
            raise InputError(f"Pivot state must be finite, got {s}")
        s.setflags(write=False)
        object.__setattr__(self, "s", s)

    @property
    def n(self) -> int:
        return self.s.size

    @classmethod
    def zeros(cls, n: int) -> "PivotState":
        return cls(np.zeros(n))


@dataclass(frozen=True, eq=False)
class PolyODE:
    """Sparse coefficient tensors of a polynomial vector field.

    Duplicate (m, row, cols) entries are summed on construction and entries
    that cancel to exactly zero are dropped.
    """

    n: int
    degree: int
    terms: tuple[PolyTerm, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InputError(f"State dimension must be positive, got {self.n}")
        if self.degree < 0:
            raise InputError(f"Degree must be non-negative, got {self.degree}")

        merged: dict[tuple[int, int, tuple[int, ...]], float] = {}
        for term in self.terms:
            if not 0 <= term.m <= self.degree:
                raise InputError(f"Term degree {term.m} is outside [0, {self.degree}]")
            if len(term.cols) != term.m:
                raise InputError(f"Term of degree {term.m} has {len(term.cols)} column digits")
            if not 0 <= term.row < self.n:
                raise InputError(f"Term row {term.row} is outside [0, {self.n})")
            TensorIndex(tuple(term.cols), self.n)
            key = (term.m, term.row, tuple(term.cols))
            merged[key] = merged.get(key, 0.0) + float(term.value)

        normalized = tuple(
            PolyTerm(m, row, cols, value)
            for (m, row, cols), value in sorted(merged.items())
            if value != 0.0
        )
        object.__setattr__(self, "terms", normalized)

    @cached_property
    def coefficient_matrices(self) -> tuple[NDArray[np.float64], ...]:
        """Dense F_m of shape n x n^m for m = 0..degree."""
        matrices = [np.zeros((self.n, self.n**m)) for m in range(self.degree + 1)]
        for term in self.terms:
            matrices[term.m][term.row, flat_index(TensorIndex(term.cols, self.n))] += term.value
        for matrix in matrices:
            matrix.setflags(write=False)
        return tuple(matrices)

    @property
    def degrees_present(self) -> tuple[int, ...]:
        return tuple(sorted({term.m for term in self.terms}))

    def term_content(self) -> dict[tuple[int, int, tuple[int, ...]], float]:
        return {(t.m, t.row, t.cols): t.value for t in self.terms}


def _check_state(ode: PolyODE, x: ArrayLike) -> NDArray[np.float64]:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != ode.n:
        raise InputError(f"State has dimension {x.size}, the ODE has n={ode.n}")
    return x


def eval_rhs(ode: PolyODE, x: ArrayLike) -> NDArray[np.float64]:
    x = _check_state(ode, x)
    out = np.zeros(ode.n)
    for m in ode.degrees_present:
        out += ode.coefficient_matrices[m] @ kron_power(x, m)
    return out


def jacobian(ode: PolyODE, x: ArrayLike) -> NDArray[np.float64]:
    x = _check_state(ode, x)
    jac = np.zeros((ode.n, ode.n))
    for term in ode.terms:
        for slot, col in enumerate(term.cols):
            others = term.cols[:slot] + term.cols[slot + 1 :]
            jac[term.row, col] += term.value * math.prod(x[c] for c in others)
    return jac


def recenter(ode: PolyODE, s: PivotState | ArrayLike) -> PolyODE:
    """Rewrite f(x) as the exact polynomial H(delta) = f(s + delta).

    Every slot of a degree-m term is expanded into a delta slot or an s slot;
    s slots are contracted into the coefficient.
    """
    s = s.s if isinstance(s, PivotState) else PivotState(s).s
    if s.size != ode.n:
        raise InputError(f"Pivot has dimension {s.size}, the ODE has n={ode.n}")

    shifted = []
    for term in ode.terms:
        for pattern in product((True, False), repeat=term.m):
            cols = tuple(c for c, keep in zip(term.cols, pattern) if keep)
            fixed = math.prod(s[c] for c, keep in zip(term.cols, pattern) if not keep)
            shifted.append(PolyTerm(len(cols), term.row, cols, term.value * fixed))
    return PolyODE(ode.n, ode.degree, tuple(shifted))


def _location(loc: tuple) -> str:
    path = ""
    for part in loc:
        path += f"[{part}]" if isinstance(part, int) else (f".{part}" if path else str(part))
    return path


def parse_model(text: str) -> PolyODE:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelParseError(f"Malformed model file: {e.msg}", line=e.lineno, column=e.colno) from e

    try:
        record = ModelFile.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        raise ModelParseError(
            f"Invalid model file: {first['msg']}", location=_location(first["loc"])
        ) from e

    for i, term in enumerate(record.terms):
        if term.m > record.degree:
            raise ModelParseError(
                f"Term degree {term.m} exceeds model degree {record.degree}",
                location=f"terms[{i}].m",
            )
        if not 0 <= term.row < record.n:
            raise ModelParseError(
                f"Row {term.row} is outside [0, {record.n})", location=f"terms[{i}].row"
            )
        for j, col in enumerate(term.cols):
            if not 0 <= col < record.n:
                raise ModelParseError(
                    f"Column digit {col} is outside [0, {record.n})",
                    location=f"terms[{i}].cols[{j}]",
                )

    return PolyODE(
        record.n,
        record.degree,
        tuple(PolyTerm(t.m, t.row, tuple(t.cols), t.value) for t in record.terms),
    )


def serialize_model(ode: PolyODE) -> str:
    record = ModelFile(
        n=ode.n,
        degree=ode.degree,
        terms=[
            ModelTermRecord(m=t.m, row=t.row, cols=list(t.cols), value=t.value)
            for t in ode.terms
        ],
    )
    return record.model_dump_json(indent=2)
