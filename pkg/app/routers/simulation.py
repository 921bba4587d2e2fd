import logging
import sys
from pathlib import Path
from typing import Callable, Dict, Optional

import numpy as np

from ..crud.config_store import dump_config_dal, load_config_dal
from ..crud.export import write_curves_dal, write_json_dal, write_trajectory_dal
from ..exceptions import BatteryError, EvaluationError, VerificationFailed
from ..schemas.battery import SystemConfig
from ..schemas.command import Command
from ..service import closedform
from ..service.moments import integrate
from ..service.params import reciprocal_counterpart, validate
from ..service.verification import verify_config
from ..settings import DEFAULT_DT_MAX, DEFAULT_T_END, OUTPUT_DIR, VERIFY_POINTS

# Configure logger
logger = logging.getLogger(__name__)

CURVE_POINTS = 1001


def output_path(cmd: Command, default_name: str) -> str:
    return cmd.output_path or str(Path(OUTPUT_DIR) / default_name)


def resolve_config(cmd: Command) -> Optional[SystemConfig]:
    """
    Loads and validates the command's config.

    With --dump-config the validated config is echoed to stdout and None is
    returned, telling the caller to stop.
    """
    config = validate(load_config_dal(cmd.config_path, cmd.overrides))
    if cmd.dump_config:
        sys.stdout.write(dump_config_dal(config))
        return None
    return config


def run_simulate(cmd: Command) -> int:
    """
    Integrates the moment equations from vacuum and writes the trajectory CSV.

    Args:
        cmd (Command): Parsed invocation; uses --t-end and --dt-max.

    Returns:
        int: Exit code 0.

    Raises:
        BatteryError: Config (exit 2) and integrator guard (exit 3) failures pass through unchanged.
    """
    try:
        config = resolve_config(cmd)
        if config is None:
            return 0
        trajectory = integrate(
            config,
            t_end=cmd.t_end if cmd.t_end is not None else DEFAULT_T_END,
            dt_max=cmd.dt_max if cmd.dt_max is not None else DEFAULT_DT_MAX,
        )
        path = write_trajectory_dal(output_path(cmd, "trajectory.csv"), trajectory)
        logger.info(
            f"Simulation finished: E_A={trajectory.energy_a[-1]!r}, E_B={trajectory.energy_b[-1]!r} -> {path}"
        )
        return 0
    except BatteryError as battery_exc:
        raise battery_exc
    except Exception as e:
        logger.error(f"Unexpected error in simulate: {e}")
        raise BatteryError("An unexpected error occurred while simulating")


def _optional_curve(evaluator: Callable[..., np.ndarray], *args) -> Optional[np.ndarray]:
    try:
        return evaluator(*args)
    except EvaluationError as e:
        logger.info(f"Curve left out: {e}")
        return None


def _ratio_curve(evaluator: Callable[..., np.ndarray], config: SystemConfig, times: np.ndarray) -> Optional[np.ndarray]:
    # ratios are undefined at t = 0
    positive = times > 0
    values = _optional_curve(evaluator, config, times[positive])
    if values is None:
        return None
    curve = np.full(times.shape, np.nan)
    curve[positive] = values
    return curve


def closed_form_curves(config: SystemConfig, times: np.ndarray) -> Dict[str, Optional[np.ndarray]]:
    """Every closed-form curve of `config` on `times`; None where a precondition fails."""
    reciprocal = reciprocal_counterpart(config)
    return {
        "E_B_nr": _optional_curve(closedform.energy_battery_nr_detuned, config, times),
        "E_A_nr": _optional_curve(closedform.energy_charger_nr_detuned, config, times),
        "E_B_rec": _optional_curve(closedform.energy_battery_reciprocal, reciprocal, times),
        "eta_AB": _ratio_curve(closedform.eta_ab, config, times),
        "eta_BB": _ratio_curve(closedform.eta_bb, config, times),
    }


def run_closed_form(cmd: Command) -> int:
    """
    Writes the closed-form curve CSV `t,E_B_nr,E_A_nr,E_B_rec,eta_AB,eta_BB`.

    Columns whose preconditions fail for the config are left out; the ratio
    columns hold nan at t = 0.
    """
    try:
        config = resolve_config(cmd)
        if config is None:
            return 0
        t_end = cmd.t_end if cmd.t_end is not None else DEFAULT_T_END
        times = np.linspace(0.0, t_end, cmd.points or CURVE_POINTS)
        write_curves_dal(output_path(cmd, "curves.csv"), times, closed_form_curves(config, times))
        return 0
    except BatteryError as battery_exc:
        raise battery_exc
    except Exception as e:
        logger.error(f"Unexpected error in closed-form: {e}")
        raise BatteryError("An unexpected error occurred while evaluating closed forms")


def run_verify(cmd: Command) -> int:
    """
    Runs the analytic-numeric equivalence harness and writes the JSON report.

    Returns:
        int: Exit code 0 when every variant passes or is skipped.

    Raises:
        VerificationFailed: After writing the report, if any variant fails (exit 4).
    """
    try:
        config = resolve_config(cmd)
        if config is None:
            return 0
        report = verify_config(config, points=cmd.points or VERIFY_POINTS)
        write_json_dal(output_path(cmd, "verify_report.json"), report.as_document())
        if not report.passed:
            failed = [check.variant for check in report.variants if check.status == "fail"]
            raise VerificationFailed(f"variants above tolerance {report.tolerance}: {', '.join(failed)}")
        return 0
    except BatteryError as battery_exc:
        raise battery_exc
    except Exception as e:
        logger.error(f"Unexpected error in verify: {e}")
        raise BatteryError("An unexpected error occurred while verifying")
