from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import get_settings
from .exceptions import ConsistencyError, InputError
from .poly_ode import PivotState, PolyODE, eval_rhs, jacobian, recenter
from .tensor import (
    BlockOperator,
    CoeffBlock,
    Identity,
    KronTerm,
    binomial_lift_transform,
    kron_power,
    lifted_dims,
)

Method = Literal["carleman", "ps", "psc"]
Basis = Literal["monomial", "centered"]


@dataclass(frozen=True, eq=False)
class LiftedSystem:
    method: Method
    pivot: PivotState
    order: int
    basis: Basis
    op: BlockOperator
    n: int

    @property
    def dims(self) -> tuple[int, ...]:
        return lifted_dims(self.n, self.order)

    @property
    def size(self) -> int:
        return sum(self.dims)


def _positional_blocks(
    coefficients: tuple[NDArray[np.float64], ...],
    degrees: tuple[int, ...],
    n: int,
    order: int,
) -> dict[tuple[int, int], tuple[KronTerm, ...]]:
    """Blocks (k, k-1+m) = sum_v I^{(x)v} (x) F_m (x) I^{(x)(k-1-v)}, truncated at ``order``."""
    blocks = {}
    for k in range(1, order + 1):
        for m in degrees:
            l = k - 1 + m
            if l > order:
                continue
            coeff = CoeffBlock(coefficients[m])
            terms = []
            for v in range(k):
                factors = []
                if v:
                    factors.append(Identity(n**v))
                factors.append(coeff)
                if k - 1 - v:
                    factors.append(Identity(n ** (k - 1 - v)))
                terms.append(KronTerm(tuple(factors)))
            blocks[(k, l)] = tuple(terms)
    return blocks


def build_carleman(ode: PolyODE, K: int) -> LiftedSystem:
    if K < 1:
        raise InputError(f"Carleman truncation order must be at least 1, got {K}")
    dims = lifted_dims(ode.n, K)
    blocks = _positional_blocks(ode.coefficient_matrices, ode.degrees_present, ode.n, K)
    return LiftedSystem(
        method="carleman",
        pivot=PivotState.zeros(ode.n),
        order=K,
        basis="monomial",
        op=BlockOperator(dims, dims, blocks),
        n=ode.n,
    )


def build_ps(ode: PolyODE, s: PivotState | ArrayLike) -> LiftedSystem:
    pivot = s if isinstance(s, PivotState) else PivotState(s)
    g0 = eval_rhs(ode, pivot.s)
    g1 = jacobian(ode, pivot.s)

    dims = lifted_dims(ode.n, 1)
    blocks = {
        (1, 0): (KronTerm((CoeffBlock((g0 - g1 @ pivot.s).reshape(ode.n, 1)),)),),
        (1, 1): (KronTerm((CoeffBlock(g1),)),),
    }
    return LiftedSystem(
        method="ps",
        pivot=pivot,
        order=1,
        basis="monomial",
        op=BlockOperator(dims, dims, blocks),
        n=ode.n,
    )


def build_psc(ode: PolyODE, s: PivotState | ArrayLike, P: int) -> LiftedSystem:
    """Re-centre the field at ``s`` exactly, then truncate Carleman in delta = x - s."""
    if P < 1:
        raise InputError(f"PSC polynomial degree must be at least 1, got {P}")
    pivot = s if isinstance(s, PivotState) else PivotState(s)
    shifted = recenter(ode, pivot)

    dims = lifted_dims(ode.n, P)
    blocks = _positional_blocks(shifted.coefficient_matrices, shifted.degrees_present, ode.n, P)
    return LiftedSystem(
        method="psc",
        pivot=pivot,
        order=P,
        basis="centered",
        op=BlockOperator(dims, dims, blocks),
        n=ode.n,
    )


def build_lifted(
    ode: PolyODE,
    method: Method,
    order: int,
    s: PivotState | ArrayLike | None = None,
) -> LiftedSystem:
    if method == "carleman":
        return build_carleman(ode, order)
    if s is None:
        raise InputError(f"Method '{method}' needs a pivot state")
    if method == "ps":
        return build_ps(ode, s)
    if method == "psc":
        return build_psc(ode, s, order)
    raise InputError(f"Unknown linearization method '{method}'")


def monomial_matrix(sys: LiftedSystem) -> NDArray[np.float64]:
    """Dense generator acting on (1, x, ..., x^{(x)order}).

    Centred systems are conjugated with the binomial re-centering transform,
    T^-1 A T, where T maps the monomial lift onto the centred one.
    """
    dense = sys.op.to_dense()
    if sys.basis == "monomial":
        return dense
    forward = binomial_lift_transform(sys.pivot.s, sys.order).to_dense()
    backward = binomial_lift_transform(-sys.pivot.s, sys.order).to_dense()
    return backward @ dense @ forward


def lift_state(x: ArrayLike, sys: LiftedSystem) -> NDArray[np.float64]:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != sys.n:
        raise InputError(f"State has dimension {x.size}, the lifted system has n={sys.n}")
    base = x - sys.pivot.s if sys.basis == "centered" else x
    return np.concatenate([kron_power(base, k) for k in range(sys.order + 1)])


def read_x(y: ArrayLike, sys: LiftedSystem) -> NDArray[np.float64]:
    y = np.asarray(y, dtype=float)
    if y.shape != (sys.size,):
        raise InputError(f"Lifted vector has shape {y.shape}, expected ({sys.size},)")
    tolerance = get_settings().numerics.block0_tolerance
    constant, first, *_ = sys.op.split(y)
    if not abs(constant[0] - 1.0) <= tolerance:
        raise ConsistencyError(f"Constant component drifted to {constant[0]!r}")
    x = first.copy()
    if sys.basis == "centered":
        x = sys.pivot.s + x
    return x


def lifted_residual(ode: PolyODE, sys: LiftedSystem, x: ArrayLike) -> float:
    """Max-norm gap between the exact derivative of the lifted state at ``x``
    and the truncated generator applied to it."""
    x = np.asarray(x, dtype=float).reshape(-1)
    base = x - sys.pivot.s if sys.basis == "centered" else x
    rhs = eval_rhs(ode, x)

    exact = [np.zeros(1)]
    for k in range(1, sys.order + 1):
        block = np.zeros(sys.n**k)
        for v in range(k):
            block += np.kron(np.kron(kron_power(base, v), rhs), kron_power(base, k - 1 - v))
        exact.append(block)

    return float(np.max(np.abs(np.concatenate(exact) - sys.op.apply(lift_state(x, sys)))))
