#!/usr/bin/env python3
import argparse
import sys
from pathlib import Path

from src.exceptions import PivotCarlemanError, ResourceError
from src.logging import setup_logging
from src.models import RunSpec
from src.pipelines import run_compare, run_dump_matrix, run_export_model, run_simulation, run_sweep
from src.pipelines.sweep import SWEEPABLE
from src.poly_ode import parse_model
from src.presets import PRESETS, resolve_run_spec

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID = 2
EXIT_DIVERGED = 3
EXIT_IO = 4
EXIT_TOLERANCE = 5


def add_spec_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("run specification")
    group.add_argument("--preset", type=str, default=None, help="Figure preset (see run --list-presets)")
    group.add_argument("--model", choices=["logistic", "kpp", "phase-field"], default=None)
    group.add_argument("--model-file", type=Path, default=None, help="Model file in the JSON term format")
    group.add_argument("--n", type=int, default=None, help="Number of sites for kpp / phase-field")
    group.add_argument("--beta", type=float, default=None, help="Phase-field stability parameter")
    group.add_argument("--method", choices=["carleman", "ps", "psc"], default=None)
    group.add_argument("--order", type=int, default=None, help="Truncation order K or P")
    group.add_argument("--x0", type=str, default=None, help="Initial state as a comma list")
    group.add_argument("--pivot", type=str, default=None, help="Initial pivot as a comma list (default: x0)")
    group.add_argument(
        "--pivot-schedule",
        type=str,
        default=None,
        help="Scripted pivots, e.g. '1=1' or '2.9=-1;5=-1'",
    )
    group.add_argument("--switch", type=str, default=None, help="never | at:t1,t2 | every:T | drift:E")
    group.add_argument("--dt", type=float, default=None, help="Euler time step (default: 0.01)")
    group.add_argument("--t-end", type=float, default=None, help="Integration horizon")
    group.add_argument("--eta", type=float, default=None, help="Pivot readout noise amplitude")
    group.add_argument("--seed", type=int, default=None, help="Readout noise seed")
    group.add_argument("--stride", type=int, default=None, help="Record every STRIDE steps")
    group.add_argument("--threshold", type=float, default=None, help="Divergence threshold on max |x|")
    group.add_argument(
        "--reembed",
        choices=["state", "blocks"],
        default=None,
        help="Re-lift from x on a switch (state) or carry the higher blocks over (blocks)",
    )
    group.add_argument("--basis", choices=["monomial", "centered"], default=None)
    group.add_argument("--out", type=Path, default=None, help="Output path (default: stdout)")


def create_parser() -> argparse.ArgumentParser:
    """Create the CLI argument parser."""
    parser = argparse.ArgumentParser(
        prog="pivot-carleman",
        description="Carleman, PS and PSC linearization simulators for polynomial ODEs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  uv run main.py run --list-presets                       # Show figure presets
  uv run main.py run --preset fig1a-K3 --out k3.csv       # Carleman blow-up (exit 3)
  uv run main.py run --model logistic --method ps --switch every:0.01
  uv run main.py compare --preset fig3f --reference euler --tol 0.05
  uv run main.py matrix --model logistic --method psc --order 3 --pivot 1 --basis monomial
  uv run main.py sweep --preset fig1a-K3 --param order --values 2,3,4,5

Exit codes: 0 ok, 2 invalid input, 3 diverged, 4 I/O failure, 5 over tolerance.
        """,
    )

    parser.add_argument(
        "--json-logs",
        action="store_true",
        help="Output logs in JSON format",
    )
    parser.add_argument(
        "--debug",
        action="store_true",
        help="Enable debug logging",
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    run_parser = subparsers.add_parser("run", help="Integrate one lifted system and write its trajectory CSV")
    run_parser.add_argument("--list-presets", action="store_true", help="List figure presets and exit")
    add_spec_arguments(run_parser)

    compare_parser = subparsers.add_parser(
        "compare",
        help="Compare two trajectory CSVs, or a run against a reference solution",
    )
    compare_parser.add_argument("files", nargs="*", type=Path, help="Zero, one or two trajectory CSVs")
    compare_parser.add_argument("--reference", choices=["euler", "rk4", "analytic"], default=None)
    compare_parser.add_argument("--tol", type=float, default=None, help="Maximum allowed max_abs error")
    add_spec_arguments(compare_parser)

    matrix_parser = subparsers.add_parser("matrix", help="Dump the dense lifted generator as CSV")
    add_spec_arguments(matrix_parser)

    sweep_parser = subparsers.add_parser("sweep", help="Repeat a run over values of one parameter")
    sweep_parser.add_argument("--param", choices=SWEEPABLE, required=True, help="Parameter to sweep")
    sweep_parser.add_argument("--values", type=str, required=True, help="Comma list of values")
    sweep_parser.add_argument("--out-dir", type=Path, default=Path("sweep"), help="Directory for CSVs")
    sweep_parser.add_argument(
        "--reference",
        choices=["euler", "rk4", "analytic", "none"],
        default="euler",
        help="Reference for the max_abs_vs_reference column",
    )
    sweep_parser.add_argument("--workers", "-w", type=int, default=None, help="Parallel runs (default: 4)")
    add_spec_arguments(sweep_parser)

    export_parser = subparsers.add_parser("export-model", help="Write a built-in model in the model-file format")
    add_spec_arguments(export_parser)

    return parser


def spec_from_args(args: argparse.Namespace) -> RunSpec:
    model_file_n = None
    if args.model_file is not None:
        model_file_n = parse_model(args.model_file.read_text(encoding="utf-8")).n

    options = {
        "model": args.model,
        "model_file": args.model_file,
        "n": args.n,
        "beta": args.beta,
        "method": args.method,
        "order": args.order,
        "x0": args.x0,
        "pivot": args.pivot,
        "pivot_schedule": args.pivot_schedule,
        "policy": args.switch,
        "dt": args.dt,
        "t_end": args.t_end,
        "readout_noise": args.eta,
        "rng_seed": args.seed,
        "output_stride": args.stride,
        "divergence_threshold": args.threshold,
        "reembed": args.reembed,
        "basis": args.basis,
        "output": args.out,
    }
    return resolve_run_spec(args.preset, options, model_file_n)


def cmd_run(args: argparse.Namespace) -> int:
    if args.list_presets:
        for preset in PRESETS.values():
            print(f"{preset.name}\t{preset.description}")
        return EXIT_OK

    result = run_simulation(spec_from_args(args))
    return EXIT_DIVERGED if result.diverged else EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    spec = spec_from_args(args) if args.reference is not None else None
    result = run_compare(args.files, spec=spec, reference=args.reference, tolerance=args.tol)

    print(result.report.format_line())
    return EXIT_OK if result.within_tolerance else EXIT_TOLERANCE


def cmd_matrix(args: argparse.Namespace) -> int:
    run_dump_matrix(spec_from_args(args))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    values = [value.strip() for value in args.values.split(",") if value.strip()]
    reference = None if args.reference == "none" else args.reference
    run_sweep(
        spec_from_args(args),
        parameter=args.param,
        values=values,
        out_dir=args.out_dir,
        reference=reference,
        workers=args.workers,
    )
    return EXIT_OK


def cmd_export_model(args: argparse.Namespace) -> int:
    run_export_model(spec_from_args(args))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = create_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_OK

    log_level = "DEBUG" if args.debug else "INFO"
    setup_logging(level=log_level, json_format=args.json_logs)

    commands = {
        "compare": cmd_compare,
        "export-model": cmd_export_model,
        "matrix": cmd_matrix,
        "run": cmd_run,
        "sweep": cmd_sweep,
    }

    handler = commands.get(args.command)
    if not handler:
        parser.print_help()
        return EXIT_ERROR

    try:
        return handler(args)
    except (ValueError, ResourceError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except PivotCarlemanError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
