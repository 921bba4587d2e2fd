import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm

from ..exceptions import InvalidConfig, SingularSystem, StepTooLarge
from ..schemas.battery import DerivedParams, DriveParams, MomentState, SystemConfig, Trajectory
from .params import derive

# Configure logger
logger = logging.getLogger(__name__)

# dt_max * fastest rate must stay below this
STABILITY_GUARD = 0.5
# Invariant slack, scaled by (1 + max occupation)
INVARIANT_TOL = 1e-9
STATE_SIZE = 8


def rhs(state: MomentState, derived: DerivedParams, drive: DriveParams) -> MomentState:
    """
    Time derivative of the five moments in the frame rotating at the drive frequency.

    Args:
        state (MomentState): Moments at the current instant.
        derived (DerivedParams): Rates and couplings of a validated configuration.
        drive (DriveParams): The pump; only its amplitude enters here, the
            frequency is already folded into `derived.delta`.

    Returns:
        MomentState: d/dt of every moment (occupation derivatives may be negative).
    """
    a, b = state.mean_a, state.mean_b
    n_a, n_b, ab = state.n_a, state.n_b, state.coh_ab
    g_ab, g_ba = derived.coupling_ab, derived.coupling_ba
    F = drive.amplitude
    delta = derived.delta

    d_a = -(derived.lambda_a / 2 - 1j * delta) * a - 1j * g_ab * b - 1j * F
    d_b = -(derived.lambda_b / 2 - 1j * delta) * b - 1j * g_ba * a
    d_n_a = -derived.lambda_a * n_a - 2 * (1j * g_ab * ab).real - 2 * (F * a).imag
    d_n_b = -derived.lambda_b * n_b + 2 * (1j * g_ba.conjugate() * ab).real
    d_ab = (
        -(derived.lambda_a + derived.lambda_b) / 2 * ab
        - 1j * g_ba * n_a
        + 1j * g_ab.conjugate() * n_b
        + 1j * F * b
    )
    return MomentState(mean_a=d_a, mean_b=d_b, n_a=d_n_a, n_b=d_n_b, coh_ab=d_ab)


def drift_system(config: SystemConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    Real affine form dy/dt = A y + c of `rhs` in the layout of `MomentState.to_vector`.

    `rhs` is affine in the moments, so c is the driven derivative at the
    vacuum and column j of A is the driven derivative at the j-th unit
    vector minus c. The drive therefore reaches the occupations and the
    cross-coherence through the state-dependent terms F<a> and F<b>.
    """
    derived = derive(config)
    c = rhs(MomentState.vacuum(), derived, config.drive).to_vector()
    A = np.empty((STATE_SIZE, STATE_SIZE))
    for j, basis in enumerate(np.eye(STATE_SIZE)):
        A[:, j] = rhs(MomentState.from_vector(basis), derived, config.drive).to_vector() - c
    return A, c


def _augmented(A: np.ndarray, c: np.ndarray) -> np.ndarray:
    aug = np.zeros((STATE_SIZE + 1, STATE_SIZE + 1))
    aug[:STATE_SIZE, :STATE_SIZE] = A
    aug[:STATE_SIZE, STATE_SIZE] = c
    return aug


def rk4_step_operator(A: np.ndarray, c: np.ndarray, dt: float) -> np.ndarray:
    """
    One classical RK4 step of the affine system as a matrix on [y, 1].

    The four stages are applied to the identity, so the returned matrix is
    exactly the RK4 update map of the autonomous system.
    """
    hM = dt * _augmented(A, c)
    Z = np.eye(STATE_SIZE + 1)
    k1 = hM @ Z
    k2 = hM @ (Z + k1 / 2)
    k3 = hM @ (Z + k2 / 2)
    k4 = hM @ (Z + k3)
    return Z + (k1 + 2 * k2 + 2 * k3 + k4) / 6


def fastest_rate(derived: DerivedParams) -> float:
    return max(derived.lambda_a, derived.lambda_b, 4 * abs(derived.J), 4 * abs(derived.delta))


def step_count(t_end: float, dt_max: float) -> int:
    """Smallest integer number of equal steps whose size does not exceed dt_max."""
    n = max(1, math.ceil(t_end / dt_max))
    while n > 1 and t_end / (n - 1) <= dt_max:
        n -= 1
    return n


def check_invariants(state: MomentState, tol: float) -> List[str]:
    """
    Lists the MomentState invariants violated by more than `tol`.

    Args:
        state (MomentState): The moments to check.
        tol (float): Absolute slack.

    Returns:
        list: Human-readable descriptions, empty when every invariant holds.
    """
    violations = []
    if state.n_a < -tol:
        violations.append(f"n_a={state.n_a!r} < 0")
    if state.n_b < -tol:
        violations.append(f"n_b={state.n_b!r} < 0")
    bound = math.sqrt(max(state.n_a, 0.0) * max(state.n_b, 0.0))
    if abs(state.coh_ab) > bound + tol:
        violations.append(f"|<a^dag b>|={abs(state.coh_ab)!r} exceeds sqrt(n_a n_b)={bound!r}")
    return violations


def integrate(
    config: SystemConfig,
    initial: Optional[MomentState] = None,
    t_end: float = 400.0,
    dt_max: float = 0.05,
) -> Trajectory:
    """
    Fixed-step classical RK4 integration of the moment equations.

    The step is t_end / n for the smallest integer n with t_end / n <= dt_max;
    every step is recorded, starting with the initial state at t = 0.

    Args:
        config (SystemConfig): A validated configuration.
        initial (MomentState): Starting moments; the vacuum when omitted.
        t_end (float): Final time (units of 1/omega).
        dt_max (float): Largest allowed step.

    Returns:
        Trajectory: Times, moments and energies at every step.

    Raises:
        StepTooLarge: If dt_max times the fastest rate exceeds the stability guard.
        InvalidConfig: If t_end or dt_max is not positive.
    """
    if not t_end > 0 or not dt_max > 0:
        raise InvalidConfig(f"t_end and dt_max must be > 0, got {t_end} and {dt_max}")
    derived = derive(config)
    rate = fastest_rate(derived)
    if dt_max * rate > STABILITY_GUARD:
        raise StepTooLarge(
            f"dt_max={dt_max!r} times fastest rate {rate!r} exceeds {STABILITY_GUARD}"
        )

    n_steps = step_count(t_end, dt_max)
    dt = t_end / n_steps
    A, c = drift_system(config)
    step = rk4_step_operator(A, c, dt)

    y = np.append((initial or MomentState.vacuum()).to_vector(), 1.0)
    moments = np.empty((n_steps + 1, STATE_SIZE))
    moments[0] = y[:STATE_SIZE]
    for k in range(1, n_steps + 1):
        y = step @ y
        moments[k] = y[:STATE_SIZE]

    times = np.linspace(0.0, t_end, n_steps + 1)
    times.flags.writeable = False
    moments.flags.writeable = False
    trajectory = Trajectory(omega=derived.omega, times=times, moments=moments)

    final = trajectory.final
    tol = INVARIANT_TOL * (1 + max(abs(final.n_a), abs(final.n_b)))
    violations = check_invariants(final, tol)
    if violations:
        logger.warning(f"Final state outside invariant slack {tol!r}: {'; '.join(violations)}")
    logger.debug(f"Integrated {n_steps} RK4 steps of size {dt!r}")
    return trajectory


def integrate_on_grid(
    config: SystemConfig,
    t_end: float,
    points: int,
    substeps: int,
    initial: Optional[MomentState] = None,
) -> Trajectory:
    """
    RK4 trajectory sampled at `points` equally spaced times on [0, t_end].

    Each sampling interval is covered by exactly `substeps` RK4 steps, so
    the samples sit on the requested grid without rounding drift.

    Raises:
        StepTooLarge: If the resulting step violates the stability guard.
        InvalidConfig: If t_end <= 0, points < 2 or substeps < 1.
    """
    if not t_end > 0 or points < 2 or substeps < 1:
        raise InvalidConfig(f"need t_end > 0, points >= 2, substeps >= 1; got {t_end}, {points}, {substeps}")
    derived = derive(config)
    interval = t_end / (points - 1)
    dt = interval / substeps
    rate = fastest_rate(derived)
    if dt * rate > STABILITY_GUARD:
        raise StepTooLarge(f"step {dt!r} times fastest rate {rate!r} exceeds {STABILITY_GUARD}")

    A, c = drift_system(config)
    sampler = np.linalg.matrix_power(rk4_step_operator(A, c, dt), substeps)
    y = np.append((initial or MomentState.vacuum()).to_vector(), 1.0)
    moments = np.empty((points, STATE_SIZE))
    moments[0] = y[:STATE_SIZE]
    for k in range(1, points):
        y = sampler @ y
        moments[k] = y[:STATE_SIZE]
    return Trajectory(omega=derived.omega, times=np.linspace(0.0, t_end, points), moments=moments)


def steady_state(config: SystemConfig) -> MomentState:
    """
    Fixed point of the rotating-frame moment equations by a direct linear solve.

    Raises:
        SingularSystem: If a total rate vanishes or the drift matrix is singular.
    """
    derived = derive(config)
    if derived.lambda_a == 0 or derived.lambda_b == 0:
        raise SingularSystem("steady state needs Lambda_a > 0 and Lambda_b > 0")
    A, c = drift_system(config)
    if np.linalg.cond(A) > 1e14:
        raise SingularSystem("drift matrix is numerically singular")
    try:
        y = np.linalg.solve(A, -c)
    except np.linalg.LinAlgError as e:
        raise SingularSystem(f"drift matrix is singular: {e}")
    return MomentState.from_vector(y)


def propagate_exact(
    config: SystemConfig,
    times: Sequence[float],
    initial: Optional[MomentState] = None,
) -> Trajectory:
    """
    Exact solution at the given times through the matrix exponential of the augmented drift.
    """
    A, c = drift_system(config)
    aug = _augmented(A, c)
    y0 = np.append((initial or MomentState.vacuum()).to_vector(), 1.0)
    times = np.asarray(times, dtype=float)
    moments = np.array([(expm(aug * t) @ y0)[:STATE_SIZE] for t in times])
    return Trajectory(omega=config.omega, times=times, moments=moments)
