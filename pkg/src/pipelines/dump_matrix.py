import sys

import numpy as np
from numpy.typing import NDArray

from ..io import save_matrix, write_matrix
from ..linearize import build_lifted, monomial_matrix
from ..logging import get_logger
from ..models import RunSpec
from .run_trajectory import load_model

logger = get_logger("dump_matrix")


def run_dump_matrix(spec: RunSpec) -> NDArray[np.float64]:
    ode, x0, label = load_model(spec)
    pivot = None if spec.method == "carleman" else (spec.pivot if spec.pivot is not None else x0)
    lifted = build_lifted(ode, spec.method, spec.order, pivot)

    if spec.basis == "monomial":
        matrix = monomial_matrix(lifted)
    else:
        matrix = lifted.op.to_dense()

    logger.info(
        f"{label} {spec.method} order {spec.order}: {matrix.shape[0]}x{matrix.shape[1]} "
        f"({lifted.basis if spec.basis == 'centered' else 'monomial'} basis)"
    )

    if spec.output is not None:
        save_matrix(matrix, spec.output)
        logger.info(f"Matrix written to {spec.output}")
    else:
        write_matrix(matrix, sys.stdout)
    return matrix
