import sys

from ..logging import get_logger
from ..models import RunSpec
from ..poly_ode import PolyODE, serialize_model
from .run_trajectory import load_model

logger = get_logger("export_model")


def run_export_model(spec: RunSpec) -> PolyODE:
    ode, _, label = load_model(spec)
    text = serialize_model(ode)

    if spec.output is not None:
        spec.output.parent.mkdir(parents=True, exist_ok=True)
        spec.output.write_text(text + "\n", encoding="utf-8")
        logger.info(f"Exported {label} ({len(ode.terms):,} terms) to {spec.output}")
    else:
        sys.stdout.write(text + "\n")
    return ode
