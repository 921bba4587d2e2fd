import logging

from ..crud.export import write_optimization_dal, write_scan_dal
from ..exceptions import BatteryError
from ..models.battery_enum import OutputFormat
from ..schemas.command import Command
from ..service.analysis import advantage_region_scan, optimal_rescaling
from ..utils import parse_grid
from .simulation import output_path, resolve_config

# Configure logger
logger = logging.getLogger(__name__)

DEFAULT_GRID = "r101:y22"
DEFAULT_Y_MAX = 0.21


def run_optimize(cmd: Command) -> int:
    """
    Finds the optimal shared-reservoir rescaling of the config.

    Writes the OptimizationResult summary as JSON (default) or, with
    --format csv, the diagnostic x / energy curve.
    """
    try:
        config = resolve_config(cmd)
        if config is None:
            return 0
        result = optimal_rescaling(config)
        as_json = cmd.format is not OutputFormat.CSV
        write_optimization_dal(output_path(cmd, "optimize.json" if as_json else "optimize.csv"), result, as_json)
        return 0
    except BatteryError as battery_exc:
        raise battery_exc
    except Exception as e:
        logger.error(f"Unexpected error in optimize: {e}")
        raise BatteryError("An unexpected error occurred while optimizing")


def run_advantage(cmd: Command) -> int:
    """
    Scans chi(r, y) on the --grid "rN:yM" over r in [0, 1], y in [0, --y-max].

    Writes the `r,y,chi` CSV and a JSON summary next to it. Violations found
    outside the certified region are reported, not raised.
    """
    try:
        r_points, y_points = parse_grid(cmd.grid or DEFAULT_GRID)
        y_max = cmd.y_max if cmd.y_max is not None else DEFAULT_Y_MAX
        scan = advantage_region_scan(r_points, y_points, y_max)
        write_scan_dal(output_path(cmd, "advantage.csv"), scan)
        return 0
    except BatteryError as battery_exc:
        raise battery_exc
    except Exception as e:
        logger.error(f"Unexpected error in advantage: {e}")
        raise BatteryError("An unexpected error occurred while scanning the advantage region")
