from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import InputError
from .poly_ode import PolyODE, PolyTerm

PHASE_FIELD_X0 = (-0.90, -0.56, 0.56, 0.90, 0.90, 0.56, -0.56, -0.90)


@dataclass(frozen=True, eq=False)
class NamedModel:
    ode: PolyODE
    default_x0: NDArray[np.float64]
    label: str

    def __post_init__(self) -> None:
        x0 = np.array(self.default_x0, dtype=float).reshape(-1)
        if x0.size != self.ode.n:
            raise InputError(f"Initial state has dimension {x0.size}, the model has n={self.ode.n}")
        x0.setflags(write=False)
        object.__setattr__(self, "default_x0", x0)


def _ring_diffusion(n: int, centre: float) -> list[PolyTerm]:
    """Second-order periodic Laplacian (dz^2 = 1) with ``centre`` on the diagonal."""
    terms = []
    for i in range(n):
        terms.append(PolyTerm(1, i, ((i - 1) % n,), 1.0))
        terms.append(PolyTerm(1, i, ((i + 1) % n,), 1.0))
        terms.append(PolyTerm(1, i, (i,), centre))
    return terms


def build_logistic(x0: float = 0.1) -> NamedModel:
    ode = PolyODE(1, 2, (PolyTerm(1, 0, (0,), 1.0), PolyTerm(2, 0, (0, 0), -1.0)))
    return NamedModel(ode, np.array([x0]), "logistic")


def build_kpp(n: int = 8, x0: ArrayLike | None = None) -> NamedModel:
    if n < 3:
        raise InputError(f"KPP ring needs at least 3 sites, got n={n}")

    # -2 from diffusion, +1 from the linear part of u(1 - u)
    terms = _ring_diffusion(n, -1.0)
    terms += [PolyTerm(2, i, (i, i), -1.0) for i in range(n)]
    ode = PolyODE(n, 2, tuple(terms))

    if x0 is None:
        x0 = np.full(n, 0.1)
        x0[[i for i in (3, 4) if i < n]] = 0.9
    return NamedModel(ode, x0, "kpp")


def build_phase_field(
    n: int = 8,
    beta: float = -0.2,
    x0: ArrayLike | None = None,
    printed_sign: bool = False,
) -> NamedModel:
    """Periodic 1-D phase field with a cubic reaction vanishing at -1, -beta and 1.

    The default reaction -(phi - 1)(phi + beta)(phi + 1) relaxes towards -1 for
    beta < 0. ``printed_sign=True`` builds +(phi - 1)(phi + beta)(phi + 1)
    instead, whose +-1 states are unstable.
    """
    if n < 3:
        raise InputError(f"Phase-field ring needs at least 3 sites, got n={n}")
    if x0 is None and n != len(PHASE_FIELD_X0):
        raise InputError(
            f"The reference initial condition is defined for n={len(PHASE_FIELD_X0)}, got n={n}"
        )

    sign = 1.0 if printed_sign else -1.0
    # (phi^2 - 1)(phi + beta) = phi^3 + beta phi^2 - phi - beta
    terms = _ring_diffusion(n, -2.0 - sign)
    for i in range(n):
        terms.append(PolyTerm(0, i, (), -sign * beta))
        terms.append(PolyTerm(2, i, (i, i), sign * beta))
        terms.append(PolyTerm(3, i, (i, i, i), sign))
    ode = PolyODE(n, 3, tuple(terms))

    return NamedModel(ode, PHASE_FIELD_X0 if x0 is None else x0, "phase-field")


def build_named(
    name: str,
    n: int | None = None,
    beta: float | None = None,
    x0: ArrayLike | None = None,
) -> NamedModel:
    if name == "logistic":
        if n not in (None, 1):
            raise InputError(f"The logistic model is scalar, got n={n}")
        return build_logistic() if x0 is None else build_logistic(float(np.asarray(x0).reshape(-1)[0]))
    if name == "kpp":
        return build_kpp(8 if n is None else n, x0)
    if name == "phase-field":
        return build_phase_field(8 if n is None else n, -0.2 if beta is None else beta, x0)
    raise InputError(f"Unknown model '{name}'")


def logistic_analytic(x0: float, t: float | ArrayLike) -> float | NDArray[np.float64]:
    if not 0.0 < x0 <= 1.0:
        raise InputError(f"Analytic logistic solution needs x0 in (0, 1], got {x0}")
    growth = np.exp(t)
    value = x0 * growth / (1.0 - x0 + x0 * growth)
    return float(value) if np.ndim(value) == 0 else value

