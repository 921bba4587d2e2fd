import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from .exceptions import BatteryError, InvalidConfig
from .models.battery_enum import OutputFormat, Verb
from .routers.analysis import run_advantage, run_optimize
from .routers.figures import run_figures
from .routers.simulation import run_closed_form, run_simulate, run_verify
from .schemas.command import Command
from .settings import LOG_LEVEL, configure_logging
from .utils import parse_overrides

# Configure logger
logger = logging.getLogger(__name__)


class UsageError(InvalidConfig):
    code = "USAGE_ERROR"


class CommandParser(argparse.ArgumentParser):
    """
    ArgumentParser that raises instead of printing usage and exiting, so every
    failure reaches the single-line error handler.
    """

    def error(self, message: str):
        raise UsageError(message)


HANDLERS: Dict[Verb, Callable[[Command], int]] = {
    Verb.SIMULATE: run_simulate,
    Verb.CLOSED_FORM: run_closed_form,
    Verb.VERIFY: run_verify,
    Verb.OPTIMIZE: run_optimize,
    Verb.ADVANTAGE: run_advantage,
    Verb.FIGURES: run_figures,
}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", dest="config_path", help="flat JSON config document")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config key (repeatable)")
    parser.add_argument("--dump-config", action="store_true", help="print the validated config and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = CommandParser(prog="nrbattery", description="Nonreciprocal quantum battery toolkit")
    parser.add_argument("--log-level", default=None, help="logging level (default from NRBATTERY_LOG_LEVEL)")
    verbs = parser.add_subparsers(dest="verb", required=True)

    simulate = verbs.add_parser(Verb.SIMULATE.value, help="integrate the moment equations")
    _add_config_flags(simulate)
    simulate.add_argument("--t-end", type=float)
    simulate.add_argument("--dt-max", type=float)

    closed = verbs.add_parser(Verb.CLOSED_FORM.value, help="evaluate the closed-form energy curves")
    _add_config_flags(closed)
    closed.add_argument("--t-end", type=float)
    closed.add_argument("--points", type=int)

    verify = verbs.add_parser(Verb.VERIFY.value, help="compare closed forms with the integrator")
    _add_config_flags(verify)
    verify.add_argument("--points", type=int)

    optimize = verbs.add_parser(Verb.OPTIMIZE.value, help="optimal shared-reservoir rescaling")
    _add_config_flags(optimize)
    optimize.add_argument("--format", choices=[f.value for f in OutputFormat], help="json summary (default) or csv curve")

    advantage = verbs.add_parser(Verb.ADVANTAGE.value, help="scan the nonreciprocal advantage region")
    advantage.add_argument("--grid", help='grid as "rN:yM" (default r101:y22)')
    advantage.add_argument("--y-max", type=float)

    figures = verbs.add_parser(Verb.FIGURES.value, help="write the data bundle of a figure")
    figures.add_argument("figure", help="fig2, fig3, fig4, fig5 or chi")

    for sub in (simulate, closed, verify, optimize, advantage, figures):
        sub.add_argument("--out", dest="output_path", help="output file (directory for figures)")
    return parser


def parse_command(args: argparse.Namespace) -> Command:
    """
    Turns parsed arguments into a validated Command.

    Raises:
        InvalidConfig: On malformed or unknown overrides.
    """
    values = dict(vars(args))
    values["overrides"] = parse_overrides(values.get("overrides") or [])
    values.pop("log_level", None)
    try:
        return Command(**{key: value for key, value in values.items() if value is not None})
    except ValidationError as e:
        raise InvalidConfig("; ".join(error["msg"] for error in e.errors()))


def main(argv: Optional[List[str]] = None) -> int:
    """
    Command line entry point.

    Every failure is printed as one line `CODE: detail` on stderr and mapped
    to the error's exit code; anything unexpected exits 1.

    Args:
        argv (list): Arguments without the program name; defaults to sys.argv[1:].

    Returns:
        int: The process exit code.
    """
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(argv)
        configure_logging((args.log_level or LOG_LEVEL).upper())
        cmd = parse_command(args)
        return HANDLERS[cmd.verb](cmd)
    except BatteryError as exc:
        print(str(exc).replace("\n", " "), file=sys.stderr)
        return exc.exit_code
    except Exception as exc:
        logger.error(f"Unhandled error: {exc}")
        print(f"{BatteryError.code}: {exc}".replace("\n", " "), file=sys.stderr)
        return BatteryError.exit_code


if __name__ == "__main__":
    sys.exit(main())
