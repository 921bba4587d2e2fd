import logging
import math
from typing import Callable, Dict, List

import numpy as np

from ..exceptions import BatteryError, InvalidConfig
from ..models.battery_enum import EnergyVariant
from ..schemas.analysis import VariantCheck, VerificationReport
from ..schemas.battery import SystemConfig, Trajectory
from ..settings import VERIFY_POINTS, VERIFY_TOLERANCE
from .closedform import VARIANT_EVALUATORS
from .moments import fastest_rate, integrate_on_grid
from .params import derive, make_nonreciprocal, reciprocal_counterpart

# Configure logger
logger = logging.getLogger(__name__)

# Horizon in units of the slowest relaxation time
HORIZON_FACTOR = 20.0
# Target of dt times the fastest rate inside each sampling interval
STEP_RESOLUTION = 0.01

NONRECIPROCAL_VARIANTS = (
    EnergyVariant.NONRECIPROCAL_GENERAL,
    EnergyVariant.NONRECIPROCAL_RESONANT,
    EnergyVariant.NONRECIPROCAL_SYMMETRIC,
    EnergyVariant.CHARGER_NONRECIPROCAL,
)


def verification_horizon(config: SystemConfig) -> float:
    """
    20 / min(Lambda_a, Lambda_b, kappa_a + kappa_b), taking only the nonzero rates.

    The rates are those of the nonreciprocal version of `config` when it has
    a shared reservoir.

    Raises:
        InvalidConfig: If every rate vanishes.
    """
    reference = make_nonreciprocal(config) if config.Gamma > 0 else config
    derived = derive(reference)
    rates = [rate for rate in (derived.lambda_a, derived.lambda_b, derived.kappa_ab) if rate > 0]
    if not rates:
        raise InvalidConfig("verification needs at least one nonzero damping rate")
    return HORIZON_FACTOR / min(rates)


def _relative_error(closed: np.ndarray, numeric: np.ndarray) -> float:
    return float(np.max(np.abs(closed - numeric) / (1 + np.abs(closed))))


def _check(
    variant: EnergyVariant,
    evaluator: Callable,
    config: SystemConfig,
    trajectory: Trajectory,
    tolerance: float,
) -> VariantCheck:
    try:
        closed = evaluator(config, trajectory.times)
    except BatteryError as e:
        return VariantCheck(variant=variant.value, status="skipped", reason=str(e))
    numeric = trajectory.energy_a if variant is EnergyVariant.CHARGER_NONRECIPROCAL else trajectory.energy_b
    error = _relative_error(closed, numeric)
    return VariantCheck(
        variant=variant.value,
        status="pass" if error <= tolerance else "fail",
        max_relative_error=error,
        grid_size=len(trajectory),
    )


def _skipped(variants, reason: str) -> List[VariantCheck]:
    return [VariantCheck(variant=variant.value, status="skipped", reason=reason) for variant in variants]


def verify_config(
    config: SystemConfig,
    points: int = VERIFY_POINTS,
    tolerance: float = VERIFY_TOLERANCE,
) -> VerificationReport:
    """
    Compares every closed-form variant with the RK4 integrator on a common time grid.

    Nonreciprocal variants run on `make_nonreciprocal(config)` (skipped when
    Gamma = 0); the reciprocal variant runs on the Gamma = 0 counterpart.
    A variant whose preconditions fail is reported as skipped with the reason.

    Args:
        config (SystemConfig): A validated configuration.
        points (int): Number of sample times, including t = 0.
        tolerance (float): Largest accepted |closed - numeric| / (1 + closed).

    Returns:
        VerificationReport: Per-variant errors and the overall verdict.
    """
    t_max = verification_horizon(config)
    interval = t_max / (points - 1)
    checks: List[VariantCheck] = []
    notes: List[str] = []
    substeps_used: Dict[str, int] = {}

    def run(target: SystemConfig, label: str) -> Trajectory:
        substeps = max(1, math.ceil(interval * fastest_rate(derive(target)) / STEP_RESOLUTION))
        substeps_used[label] = substeps
        return integrate_on_grid(target, t_max, points, substeps)

    if config.Gamma > 0:
        nonreciprocal = make_nonreciprocal(config)
        if nonreciprocal.J != config.J:
            notes.append(f"nonreciprocal variants use J={nonreciprocal.J!r} in place of {config.J!r}")
        trajectory = run(nonreciprocal, "nonreciprocal")
        for variant in NONRECIPROCAL_VARIANTS:
            checks.append(_check(variant, VARIANT_EVALUATORS[variant], nonreciprocal, trajectory, tolerance))
        if derive(nonreciprocal).coop_dissipative_extrapolated:
            notes.append("C_d = 4 Gamma_a Gamma_b / (Lambda_a Lambda_b) is extrapolated for asymmetric rates")
    else:
        checks.extend(_skipped(NONRECIPROCAL_VARIANTS, "Gamma = 0: no shared reservoir"))

    reciprocal = reciprocal_counterpart(config)
    if config.charger.kappa * config.battery.kappa == 0:
        checks.append(VariantCheck(variant=EnergyVariant.RECIPROCAL.value, status="skipped",
                                   reason="kappa_a * kappa_b = 0"))
    elif derive(config).delta != 0:
        checks.append(VariantCheck(variant=EnergyVariant.RECIPROCAL.value, status="skipped",
                                   reason="detuned drive"))
    else:
        trajectory = run(reciprocal, "reciprocal")
        checks.append(_check(EnergyVariant.RECIPROCAL, VARIANT_EVALUATORS[EnergyVariant.RECIPROCAL],
                             reciprocal, trajectory, tolerance))

    report = VerificationReport(
        tolerance=tolerance,
        t_max=t_max,
        substeps=max(substeps_used.values(), default=0),
        variants=checks,
        notes=notes,
    )
    for check in checks:
        logger.info(f"Variant {check.variant}: {check.status} (max relative error {check.max_relative_error!r})")
    return report
