"""
Command-line entry point

Usage: python -m src.main <subcommand> [options]
Exit codes: 0 success, 1 computation error, 2 usage error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import ValidationError

from src.cli.commands import CHANNEL_PRESETS, STATE_PRESETS, run_command
from src.cli.models import OutputFormat, ParameterGrid, RunConfig, Subcommand
from src.config import apply_settings, load_settings, settings
from src.dynamics.maps import describe_catalog
from src.utils.exceptions import ChaosDegreeException, UsageError
from src.utils.logging import setup_logging

logger = logging.getLogger(__name__)

SHORTHAND_PARAMS = ("a", "b", "c", "d", "v", "mu")

OUTPUT_HELP = """\
output columns:
  ecd           map,params,L,skip,n,D_nats|D_bits,S_out,I,classification
  sweep         param,D,lambda,n,converged,classification,warning
  bifurcation   param,x
  circle-decay  j,c_j,D_emp,D_theo,bound
  lyapunov      param,lambda_top,n,converged[,lambda_1..lambda_m]
  quantum-ecd   D,S_canonical,degenerate,trials
  ingest        length,dimension,box

maps:
{catalog}
"""


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="KEY=value settings file (ECD_* keys)")
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--map", dest="map_name", default="logistic", help="catalog map name")
    common.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                        help="map parameter, repeatable")
    for name in SHORTHAND_PARAMS:
        common.add_argument(f"--{name}", type=float, help=f"shorthand for --param {name}=VALUE")
    common.add_argument("--x0", help="initial point, comma-separated coordinates")
    common.add_argument("--cells", default="100", help='partition spec, e.g. "100" or "32x32"')
    common.add_argument("--auto-box", action="store_true", help="partition the orbit's bounding box")
    common.add_argument("--orbit-file", help="CSV orbit with a header and the step index first")
    common.add_argument("--skip", type=int, help="transient length")
    common.add_argument("--n", dest="length", type=int, help="retained orbit length")
    common.add_argument("--epsilon", type=float, help="chaos threshold on D")
    common.add_argument("--log-base", choices=["e", "2"])
    common.add_argument("--seed", type=int)
    common.add_argument("--out", default="ecd", help="output file stem")
    common.add_argument("--output-dir", help="directory for output files")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default="csv")
    common.add_argument("--svg", action="store_true", help="also write SVG figures")
    common.add_argument("--workers", type=int, help="worker pool size")
    return common


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per subcommand"""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="ecd",
        description=f"{settings.APP_NAME} v{settings.VERSION}",
        epilog=OUTPUT_HELP.format(catalog=describe_catalog()),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(
            name, parents=[common], help=help_text,
            epilog=OUTPUT_HELP.format(catalog=describe_catalog()),
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )

    ecd = add("ecd", "chaos degree of a map or an orbit file")
    ecd.add_argument("--family", help="comma-separated partition specs; reports the infimum")
    ecd.add_argument("--ensemble", type=int, dest="ensemble_size", help="uniform initial sample size")

    sweep = add("sweep", "chaos degree and Lyapunov exponent over a parameter grid")
    sweep.add_argument("--sweep", required=True, metavar="NAME=START:STOP:STEP",
                       help="inclusive range, or NAME=V1,V2,...")

    bifurcation = add("bifurcation", "bifurcation diagram data for a 1D map")
    bifurcation.add_argument("--sweep", required=True, metavar="NAME=START:STOP:STEP")
    bifurcation.add_argument("--keep", type=int, default=200, help="points kept per parameter value")

    decay = add("circle-decay", "chaos degree at the convergent partitions of a rotation")
    decay.add_argument("--count", type=int, default=7, help="number of convergents J")
    decay.add_argument("--min-denominator", type=int, default=2)
    decay.add_argument("--theta0", type=float, default=0.1)

    lyap = add("lyapunov", "Lyapunov exponents")
    lyap.add_argument("--sweep", metavar="NAME=START:STOP:STEP")
    lyap.add_argument("--spectrum", action="store_true", help="full spectrum by QR iteration")
    lyap.add_argument("--reorth", type=int, dest="reorthonormalize_every",
                      help="steps between re-orthonormalizations")

    quantum = add("quantum-ecd", "quantum chaos degree of a state under a channel")
    quantum.add_argument("--state", dest="state_file", help="state matrix file")
    quantum.add_argument("--state-preset", choices=STATE_PRESETS)
    quantum.add_argument("--kraus", dest="kraus_file", help="Kraus operator file")
    quantum.add_argument("--channel", dest="channel_preset", choices=CHANNEL_PRESETS)
    quantum.add_argument("--strength", type=float, default=0.0, help="depolarizing probability p")
    quantum.add_argument("--dim", type=int, default=2)
    quantum.add_argument("--trials", type=int, help="random bases searched on degenerate spectra")

    ingest = add("ingest", "read and summarise an external orbit")
    ingest.add_argument("--expect-dim", type=int, help="required number of coordinates")
    ingest.add_argument("--export", help="re-export the orbit to this CSV")
    return parser


def _parse_params(args: argparse.Namespace) -> Dict[str, float]:
    params: Dict[str, float] = {}
    for name in SHORTHAND_PARAMS:
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    for item in args.param:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise UsageError(f"Invalid --param '{item}'; expected NAME=VALUE")
        try:
            params[name.strip()] = float(value)
        except ValueError as e:
            raise UsageError(f"Invalid value in --param '{item}'") from e
    return params


def _parse_x0(text: Optional[str]) -> Optional[List[float]]:
    if text is None:
        return None
    try:
        return [float(part) for part in text.split(",")]
    except ValueError as e:
        raise UsageError(f"Invalid --x0 '{text}'") from e


def _pick(value, default):
    return default if value is None else value


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags over settings into a RunConfig"""
    extra = {}
    if getattr(args, "sweep", None):
        extra["grid"] = ParameterGrid.parse(args.sweep)
    if getattr(args, "family", None):
        extra["family"] = [cells.strip() for cells in args.family.split(",") if cells.strip()]
    for name in (
        "ensemble_size", "keep", "count", "min_denominator", "theta0", "spectrum",
        "state_file", "state_preset", "kraus_file", "channel_preset", "strength", "dim",
        "expect_dim", "export",
    ):
        value = getattr(args, name, None)
        if value is not None:
            extra[name] = value

    return RunConfig(
        subcommand=Subcommand(args.subcommand),
        map_name=args.map_name,
        params=_parse_params(args),
        x0=_parse_x0(args.x0),
        orbit_file=args.orbit_file,
        cells=args.cells,
        auto_box=args.auto_box,
        skip=_pick(args.skip, settings.DEFAULT_SKIP),
        length=_pick(args.length, settings.DEFAULT_LENGTH),
        epsilon=_pick(args.epsilon, settings.DEFAULT_EPSILON),
        log_base=_pick(args.log_base, settings.LOG_BASE),
        seed=_pick(args.seed, settings.DEFAULT_SEED),
        reorthonormalize_every=_pick(
            getattr(args, "reorthonormalize_every", None), settings.REORTHONORMALIZE_EVERY
        ),
        trials=_pick(getattr(args, "trials", None), settings.QUANTUM_SEARCH_TRIALS),
        out=args.out,
        output_dir=_pick(args.output_dir, settings.OUTPUT_DIR),
        format=OutputFormat(args.format),
        svg=args.svg,
        workers=_pick(args.workers, settings.MAX_WORKERS),
        **extra,
    )


def _fail(error: ChaosDegreeException) -> None:
    print(f"error[{error.error_code}]: {error.message}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and return its exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    try:
        if args.config:
            if not Path(args.config).is_file():
                raise UsageError(f"Config file '{args.config}' not found")
            apply_settings(load_settings(args.config))
        setup_logging(level=args.log_level)
        config = resolve_config(args)
    except UsageError as e:
        _fail(e)
        return 2
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "config"
        print(f"error[usage]: {location}: {first['msg']}", file=sys.stderr)
        return 2

    try:
        run_command(config)
    except UsageError as e:
        _fail(e)
        return 2
    except ChaosDegreeException as e:
        logger.error("Command failed", extra={"code": e.error_code, "details": str(e.details)})
        _fail(e)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
