import logging
import math
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.signal import argrelmin

from ..exceptions import (
    ConsistencyError,
    InvalidGrid,
    NotUnderdamped,
    ZeroLocalDamping,
    ZeroSharedCoupling,
)
from ..schemas.analysis import AdvantageScan, OptimizationResult
from ..schemas.battery import SystemConfig
from .closedform import energy_battery_reciprocal, steady_battery_energy_nr
from .params import derive, make_nonreciprocal, rescale_shared_coupling, unit_weights

# Configure logger
logger = logging.getLogger(__name__)

# Golden-section search on log x
LOG_X_BRACKET = (-30.0, 30.0)
GOLDEN_TOL = 1e-10
INV_PHI = (math.sqrt(5) - 1) / 2
# Oracle checks of the optimizer
X_OPT_RTOL = 1e-6
ENERGY_OPT_RTOL = 1e-9
DIAGNOSTIC_POINTS = 80
# Agreement of the two gap evaluations
GAP_RTOL = 1e-9
# The advantage claim holds for y strictly below this
CERTIFIED_Y_MAX = 0.22
BOUNDARY_TOL = 1e-12


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float = GOLDEN_TOL) -> float:
    """
    Maximizer of a unimodal function on [lo, hi] by golden-section search.

    Args:
        f: Function to maximize.
        lo (float): Left end of the bracket.
        hi (float): Right end of the bracket.
        tol (float): Width of the final bracket.

    Returns:
        float: Midpoint of the final bracket.
    """
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = f(d)
    return (lo + hi) / 2


def _shared_rate(config: SystemConfig) -> float:
    """sqrt(Gamma_a Gamma_b) of the config, or 2|J| for a system without the shared reservoir."""
    derived = derive(config)
    rate = derived.gamma_shared if derived.gamma_shared > 0 else 2 * abs(config.J)
    if rate == 0:
        raise ZeroSharedCoupling("optimization needs Gamma > 0 or J != 0")
    return rate


def _rescaled_profile(config: SystemConfig, x):
    # steady battery energy per unit drive power E^2
    G = _shared_rate(config)
    kappa_a, kappa_b = config.charger.kappa, config.battery.kappa
    return 16 * config.omega * G ** 2 / ((x * G + kappa_a) ** 2 * (G / x + kappa_b) ** 2)


def rescaled_steady_energy(config: SystemConfig, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """16 omega G^2 E^2 / ((x G + kappa_a)^2 (G / x + kappa_b)^2) with G = sqrt(Gamma_a Gamma_b)."""
    return config.drive.amplitude ** 2 * _rescaled_profile(config, x)


def optimal_rescaling(config: SystemConfig) -> OptimizationResult:
    """
    Maximizes the nonreciprocal steady battery energy over the rescaling x.

    The search runs on log x; the analytic optimum sqrt(kappa_a / kappa_b)
    and its energy 16 omega G^2 E^2 / (G + sqrt(kappa_a kappa_b))^4 are only
    used to check the result.

    Args:
        config (SystemConfig): A validated configuration.

    Returns:
        OptimizationResult: The optimum, its analytic counterpart and a diagnostic curve.

    Raises:
        ZeroLocalDamping: If kappa_a * kappa_b = 0.
        ConsistencyError: If the numeric optimum disagrees with the analytic one.
    """
    kappa_a, kappa_b = config.charger.kappa, config.battery.kappa
    if kappa_a * kappa_b == 0:
        raise ZeroLocalDamping("rescaling optimum needs kappa_a, kappa_b > 0")

    # The drive only scales the objective, so the search runs on the profile
    log_x = golden_section_max(lambda u: _rescaled_profile(config, math.exp(u)), *LOG_X_BRACKET)
    x_opt = math.exp(log_x)
    energy_opt = float(rescaled_steady_energy(config, x_opt))

    G = _shared_rate(config)
    x_analytic = math.sqrt(kappa_a / kappa_b)
    energy_analytic = 16 * config.omega * G ** 2 * config.drive.amplitude ** 2 / (G + math.sqrt(kappa_a * kappa_b)) ** 4
    if abs(x_opt - x_analytic) > X_OPT_RTOL * x_analytic:
        raise ConsistencyError(f"numeric optimum x={x_opt!r} differs from sqrt(kappa_a/kappa_b)={x_analytic!r}")
    if abs(energy_opt - energy_analytic) > ENERGY_OPT_RTOL * abs(energy_analytic):
        raise ConsistencyError(f"optimized energy {energy_opt!r} differs from closed form {energy_analytic!r}")

    x_grid = np.geomspace(x_opt / 100, x_opt * 100, DIAGNOSTIC_POINTS)
    logger.info(f"Optimal rescaling x={x_opt!r} (analytic {x_analytic!r})")
    return OptimizationResult(
        x_opt=x_opt,
        energy_opt=energy_opt,
        x_analytic=x_analytic,
        energy_analytic=energy_analytic,
        x_grid=x_grid,
        energy_grid=rescaled_steady_energy(config, x_grid),
    )


def optimized_config(config: SystemConfig, Gamma: Optional[float] = None) -> SystemConfig:
    """
    Nonreciprocal partner at the numeric optimum: unit weights, shared rate
    `Gamma` (default sqrt(Gamma_a Gamma_b), or 2|J| when Gamma = 0), rescaled by x_opt.
    """
    rate = _shared_rate(config) if Gamma is None else Gamma
    base = unit_weights(config, rate)
    result = optimal_rescaling(base)
    return make_nonreciprocal(rescale_shared_coupling(base, result.x_opt))


def _scan_variables(config: SystemConfig) -> Tuple[float, float, float]:
    J_abs = abs(config.J)
    kappa_a, kappa_b = config.charger.kappa, config.battery.kappa
    if J_abs == 0 or kappa_a == 0 or 16 * J_abs ** 2 <= (kappa_a - kappa_b) ** 2:
        raise NotUnderdamped("gap needs 16|J|^2 > (kappa_a - kappa_b)^2 and kappa_a > 0")
    return kappa_a / J_abs, kappa_b / kappa_a, J_abs


def gap_direct(
    r: float,
    y: float,
    J_abs: float,
    F: float,
    t: Union[float, np.ndarray],
    omega: float = 1.0,
) -> Union[float, np.ndarray]:
    """
    Gap between the optimized nonreciprocal steady energy and the reciprocal
    energy in the expanded form, written in r = kappa_a/|J|, y = kappa_b/kappa_a.

    D_t / N = 8/(r sqrt(y) + 2)^4
              - 2 (1 - alpha e^{-kappa_ab t/4} + [beta + 2|J|^2 (r^2 y + 4)/Delta_+^2] e^{-kappa_ab t/2}) / (r^2 y + 4)^2

    with alpha = 2 cos(Delta_+ t/4) + 2 kappa_ab sin(Delta_+ t/4)/Delta_+ and
    beta = ((Delta_+^2 - kappa_ab^2) cos(Delta_+ t/2) + 2 kappa_ab Delta_+ sin(Delta_+ t/2)) / (2 Delta_+^2).
    It shares no code with `energy_battery_reciprocal`, so `gap` can use it as a cross-check.

    Raises:
        NotUnderdamped: If 16 - r^2 (1 - y)^2 <= 0.
    """
    root = 16 - r ** 2 * (1 - y) ** 2
    if root <= 0:
        raise NotUnderdamped(f"16 - r^2 (1 - y)^2 must be > 0, got {root!r}")
    # rates in units of |J|
    d = math.sqrt(root)
    k = r * (1 + y)
    s = r ** 2 * y + 4
    phase = J_abs * d * np.asarray(t, dtype=float)
    decay = np.exp(-J_abs * k * np.asarray(t, dtype=float) / 4)

    alpha = 2 * np.cos(phase / 4) + 2 * k * np.sin(phase / 4) / d
    beta = ((d ** 2 - k ** 2) * np.cos(phase / 2) + 2 * k * d * np.sin(phase / 2)) / (2 * d ** 2)
    tail = beta + 2 * s / d ** 2

    scale = omega * 8 * F ** 2 / J_abs ** 2
    value = scale * (8 / (r * math.sqrt(y) + 2) ** 4 - 2 * (1 - alpha * decay + tail * decay ** 2) / s ** 2)
    return float(value) if value.ndim == 0 else value


def gap(config: SystemConfig, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    E_B,opt^nr(inf) - E_B(t) for a reciprocal configuration and its optimized
    nonreciprocal partner with Gamma = 2|J|.

    Args:
        config (SystemConfig): Reciprocal configuration; Gamma is ignored.
        t (float or ndarray): Time(s) >= 0.

    Raises:
        NotUnderdamped: If 16|J|^2 <= (kappa_a - kappa_b)^2.
        ConsistencyError: If the closed-form and scan-variable evaluations disagree.
    """
    r, y, J_abs = _scan_variables(config)
    partner = optimized_config(config, Gamma=2 * J_abs)
    stationary = steady_battery_energy_nr(partner)
    value = stationary - energy_battery_reciprocal(config, t)

    direct = gap_direct(r, y, J_abs, config.drive.amplitude, t, omega=config.omega)
    mismatch = np.max(np.abs(np.asarray(value) - np.asarray(direct)) - GAP_RTOL * (np.abs(direct) + stationary))
    if mismatch > 0:
        raise ConsistencyError(f"gap evaluations disagree by more than {GAP_RTOL} relative")
    return value


def chi(r, y, k: int = 0):
    """
    Minimal gap at the k-th local minimum in units of N = 8 F^2 / |J|^2.

    Accepts scalars or broadcastable arrays for r and y.
    """
    r = np.asarray(r, dtype=float)
    y = np.asarray(y, dtype=float)
    exponent = -math.pi * (2 * k + 1) * r * (1 + y) / np.sqrt(16 - r ** 2 * (1 - y) ** 2)
    value = 8 / (r * np.sqrt(y) + 2) ** 4 - 2 * (np.exp(exponent) + 1) ** 2 / (r ** 2 * y + 4) ** 2
    return float(value) if value.ndim == 0 else value


def minima_times(J_abs: float, r: float, y: float, k_max: int = 10) -> np.ndarray:
    """t*(k) = (2k + 1) 4 pi / Delta_plus for k = 0..k_max."""
    delta_plus = J_abs * math.sqrt(16 - r ** 2 * (1 - y) ** 2)
    return (2 * np.arange(k_max + 1) + 1) * 4 * math.pi / delta_plus


def local_minima(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Times of the strict interior local minima of a sampled curve."""
    return np.asarray(times)[argrelmin(np.asarray(values))[0]]


def advantage_region_scan(r_points: int = 101, y_points: int = 22, y_max: float = 0.21) -> AdvantageScan:
    """
    Evaluates chi(r, y; k=0) over r in [0, 1] and y in [0, y_max].

    Points with |chi| <= 1e-12 (the r = 0 column) are boundary points and
    are left out of min_gap; chi < -1e-12 is a violation. Scans reaching
    y >= 0.22 run in exploratory mode and record, per r, the first violating
    y.

    Raises:
        InvalidGrid: If either axis has fewer than 2 points or y_max is outside [0, 1).
    """
    if r_points < 2 or y_points < 2:
        raise InvalidGrid(f"grid needs at least 2 points per axis, got {r_points}x{y_points}")
    if not 0 <= y_max < 1:
        raise InvalidGrid(f"y_max must lie in [0, 1), got {y_max}")
    certified = y_max < CERTIFIED_Y_MAX
    if not certified:
        logger.warning(f"y_max={y_max} reaches beyond the certified region y < {CERTIFIED_Y_MAX}")

    r_grid = np.linspace(0.0, 1.0, r_points)
    y_grid = np.linspace(0.0, y_max, y_points)
    R, Y = np.meshgrid(r_grid, y_grid, indexing="ij")
    values = chi(R, Y, 0)

    boundary = np.abs(values) <= BOUNDARY_TOL
    violation = values < -BOUNDARY_TOL
    interior = ~boundary
    if np.any(interior):
        masked = np.where(interior, values, np.inf)
        i, j = np.unravel_index(np.argmin(masked), values.shape)
    else:
        i, j = np.unravel_index(np.argmin(np.abs(values)), values.shape)
    first_violation: Dict[float, float] = {}
    for i_r, r in enumerate(r_grid):
        if r == 0:
            continue
        hits = np.nonzero(violation[i_r])[0]
        if hits.size:
            first_violation[float(r)] = float(y_grid[hits[0]])

    def points(mask: np.ndarray) -> List[Tuple[float, float]]:
        return [(float(R[idx]), float(Y[idx])) for idx in zip(*np.nonzero(mask))]

    scan = AdvantageScan(
        r_grid=r_grid,
        y_grid=y_grid,
        chi_values=values,
        min_gap=float(values[i, j]),
        argmin_r=float(r_grid[i]),
        argmin_y=float(y_grid[j]),
        violation_points=points(violation),
        boundary_points=points(boundary),
        first_violation_y=first_violation,
        certified_region=certified,
    )
    logger.info(
        f"Advantage scan {r_points}x{y_points}: min chi={scan.min_gap!r}, "
        f"{len(scan.violation_points)} violations"
    )
    return scan
