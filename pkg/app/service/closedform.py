import logging
import math
from typing import Tuple, Union

import numpy as np

from ..exceptions import (
    AsymmetricRates,
    DivisionByZero,
    NotNonreciprocal,
    NotResonant,
    NumericalResidue,
    ZeroLocalDamping,
)
from ..models.battery_enum import EnergyVariant
from ..schemas.battery import DerivedParams, EnergyCurveSpec, SystemConfig
from .params import (
    derive,
    is_nonreciprocal,
    make_nonreciprocal,
    nonreciprocity_residual,
    reciprocal_counterpart,
    rescale_shared_coupling,
    unit_weights,
)

# Configure logger
logger = logging.getLogger(__name__)

Times = Union[float, np.ndarray]

# |Lambda_a - Lambda_b| below this (relative) takes the equal-rate limit
RATE_DEGENERACY = 1e-8
# |Delta| t below this takes the critical-damping series
CRITICAL_SERIES = 1e-6
# Largest |Delta t / 4| evaluated through cosh/sinh directly
DIRECT_HYPERBOLIC = 20.0
# Tolerated imaginary part of the reciprocal energy (relative)
IMAG_RESIDUE = 1e-10


def _times(t: Times) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(t, dtype=float)
    return np.atleast_1d(arr), arr.ndim == 0


def _out(values: np.ndarray, scalar: bool) -> Times:
    return float(values[0]) if scalar else values


def _require_nonreciprocal(config: SystemConfig) -> DerivedParams:
    if not is_nonreciprocal(config):
        raise NotNonreciprocal(
            f"J must equal -i mu Gamma / 2, residual {nonreciprocity_residual(config)!r}"
        )
    return derive(config)


def _require_resonant(derived: DerivedParams) -> None:
    if derived.delta != 0:
        raise NotResonant(f"drive detuning must be 0, got {derived.delta!r}")


def _transfer_envelope(derived: DerivedParams, t: np.ndarray) -> np.ndarray:
    """
    s(t) = (e^{-Lambda_a t/2} - e^{-Lambda_b t/2}) / (Lambda_a - Lambda_b).

    Written as e^{-min t/2} expm1(-|D| t/2) / |D| so that neither exponential
    overflows and the nearly-degenerate case keeps full precision.
    """
    slow = min(derived.lambda_a, derived.lambda_b)
    gap = abs(derived.lambda_a - derived.lambda_b)
    decay = np.exp(-slow * t / 2)
    if gap < RATE_DEGENERACY * (derived.lambda_a + derived.lambda_b):
        return -decay * t / 2
    return decay * np.expm1(-gap * t / 2) / gap


def steady_battery_energy_nr(config: SystemConfig) -> float:
    """16 omega Gamma_s^2 E^2 / (Phi_a Phi_b), the t -> infinity battery energy under nonreciprocity."""
    derived = _require_nonreciprocal(config)
    phi_a = derived.lambda_a ** 2 + 4 * derived.delta ** 2
    phi_b = derived.lambda_b ** 2 + 4 * derived.delta ** 2
    return 16 * derived.omega * derived.gamma_shared ** 2 * config.drive.amplitude ** 2 / (phi_a * phi_b)


def energy_battery_nr_detuned(config: SystemConfig, t: Times) -> Times:
    """
    Battery energy under nonreciprocity for an arbitrary drive detuning.

    Args:
        config (SystemConfig): A nonreciprocal configuration.
        t (float or ndarray): Time(s) >= 0 in units of 1/omega.

    Returns:
        float or ndarray: omega <b^dag b>(t), matching the shape of `t`.

    Raises:
        NotNonreciprocal: If J != -i mu Gamma / 2.
    """
    derived = _require_nonreciprocal(config)
    times, scalar = _times(t)
    delta = derived.delta
    s = _transfer_envelope(derived, times)
    q = np.exp(-derived.lambda_b * times / 2) - derived.lambda_b * s
    y = 2 * delta * s
    bracket = 1 + q ** 2 + y ** 2 - 2 * q * np.cos(delta * times) + 2 * y * np.sin(delta * times)
    return _out(steady_battery_energy_nr(config) * bracket, scalar)


def energy_battery_nr(config: SystemConfig, t: Times) -> Times:
    """
    Resonant battery energy under nonreciprocity, E_B(inf) (1 - q(t))^2.

    The equal-rate degeneracy is handled by the same envelope as the detuned
    form, so the switch is continuous.

    Raises:
        NotNonreciprocal: If J != -i mu Gamma / 2.
        NotResonant: If omega_L != omega.
    """
    derived = _require_nonreciprocal(config)
    _require_resonant(derived)
    times, scalar = _times(t)
    q = np.exp(-derived.lambda_b * times / 2) - derived.lambda_b * _transfer_envelope(derived, times)
    return _out(steady_battery_energy_nr(config) * (1 - q) ** 2, scalar)


def energy_battery_nr_symmetric(config: SystemConfig, t: Times) -> Times:
    """Equal total rates: 16 omega Gamma^2 E^2 / Lambda^4 (1 - e^{-Lambda t/2}(1 + Lambda t/2))^2."""
    derived = _require_nonreciprocal(config)
    _require_resonant(derived)
    if not math.isclose(derived.lambda_a, derived.lambda_b, rel_tol=RATE_DEGENERACY):
        raise AsymmetricRates(
            f"symmetric form needs Lambda_a == Lambda_b, got {derived.lambda_a!r} and {derived.lambda_b!r}"
        )
    times, scalar = _times(t)
    rate = derived.lambda_a
    half = rate * times / 2
    bracket = (1 - np.exp(-half) * (1 + half)) ** 2
    return _out(steady_battery_energy_nr(config) * bracket, scalar)


def energy_charger_nr(config: SystemConfig, t: Times) -> Times:
    """
    Resonant charger energy 4 omega E^2 (1 - e^{-Lambda_a t/2})^2 / Lambda_a^2.

    Raises:
        NotNonreciprocal: If J != -i mu Gamma / 2.
        NotResonant: If omega_L != omega.
    """
    derived = _require_nonreciprocal(config)
    _require_resonant(derived)
    times, scalar = _times(t)
    F = config.drive.amplitude
    energy = 4 * derived.omega * F ** 2 * (-np.expm1(-derived.lambda_a * times / 2)) ** 2 / derived.lambda_a ** 2
    return _out(energy, scalar)


def energy_charger_nr_detuned(config: SystemConfig, t: Times) -> Times:
    """Charger energy 4 omega E^2 |1 - e^{-(Lambda_a/2 - i delta) t}|^2 / Phi_a at any detuning."""
    derived = _require_nonreciprocal(config)
    times, scalar = _times(t)
    z = derived.lambda_a / 2 - 1j * derived.delta
    phi_a = derived.lambda_a ** 2 + 4 * derived.delta ** 2
    energy = 4 * derived.omega * config.drive.amplitude ** 2 * np.abs(-np.expm1(-z * times)) ** 2 / phi_a
    return _out(energy, scalar)


def _reciprocal_inputs(config: SystemConfig) -> DerivedParams:
    derived = derive(reciprocal_counterpart(config))
    if config.charger.kappa * config.battery.kappa == 0:
        raise ZeroLocalDamping("reciprocal energy needs kappa_a * kappa_b > 0")
    _require_resonant(derived)
    return derived


def reciprocal_steady_energy(config: SystemConfig) -> float:
    """zeta = 4 omega E^2 C / (kappa_a kappa_b (C + 1)^2)."""
    derived = _reciprocal_inputs(config)
    C = derived.coop_coherent
    kk = config.charger.kappa * config.battery.kappa
    return 4 * derived.omega * config.drive.amplitude ** 2 * C / (kk * (C + 1) ** 2)


def _reciprocal_envelope(derived: DerivedParams, t: np.ndarray) -> np.ndarray:
    """
    e^{-kappa_ab t/4} (cosh(Delta t/4) + kappa_ab sinh(Delta t/4) / Delta) in complex arithmetic.

    Three regimes: the critical-damping series, direct hyperbolics, and the
    exponential form, whose exponents all have negative real part.
    """
    kab = derived.kappa_ab
    delta_cap = complex(derived.delta_cap)
    arg = delta_cap * t
    envelope = np.empty(t.shape, dtype=complex)

    series = np.abs(arg) < CRITICAL_SERIES
    direct = ~series & (np.abs(arg) / 4 <= DIRECT_HYPERBOLIC)
    far = ~series & ~direct

    ts = t[series]
    envelope[series] = np.exp(-kab * ts / 4) * (1 + kab * ts / 4)

    td = t[direct]
    envelope[direct] = np.exp(-kab * td / 4) * (
        np.cosh(delta_cap * td / 4) + kab * np.sinh(delta_cap * td / 4) / delta_cap
    )

    tf = t[far]
    grow = np.exp((delta_cap - kab) * tf / 4)
    fall = np.exp(-(delta_cap + kab) * tf / 4)
    envelope[far] = (grow + fall) / 2 + kab * (grow - fall) / (2 * delta_cap)
    return envelope


def energy_battery_reciprocal(config: SystemConfig, t: Times) -> Times:
    """
    Battery energy without the shared reservoir, zeta (1 - envelope(t))^2.

    Gamma is ignored by construction. Over- and underdamped regimes are the
    same complex expression; the real part is returned after checking the
    imaginary residue.

    Args:
        config (SystemConfig): Any configuration with kappa_a, kappa_b > 0 and a resonant drive.
        t (float or ndarray): Time(s) >= 0.

    Returns:
        float or ndarray: omega <b^dag b>(t) for the reciprocal system.

    Raises:
        ZeroLocalDamping: If kappa_a * kappa_b = 0.
        NotResonant: If omega_L != omega.
        NumericalResidue: If the imaginary part exceeds 1e-10 of the result.
    """
    derived = _reciprocal_inputs(config)
    times, scalar = _times(t)
    energy = reciprocal_steady_energy(config) * (1 - _reciprocal_envelope(derived, times)) ** 2
    residue = np.abs(energy.imag)
    if np.any(residue > IMAG_RESIDUE * np.abs(energy.real) + np.finfo(float).tiny):
        worst = float(np.max(residue))
        raise NumericalResidue(f"imaginary residue {worst!r} in reciprocal energy")
    return _out(energy.real, scalar)


def reciprocal_alpha_beta(config: SystemConfig, t: Times) -> Tuple[Times, Times]:
    """
    alpha(t) and beta(t) of the expanded reciprocal energy
    zeta (1 - alpha e^{-kappa_ab t/4} + [beta - 2 kappa_a kappa_b (C+1)/Delta^2] e^{-kappa_ab t/2}).

    beta carries the + sign in front of its sinh term; with it the bracket is a
    perfect square. Both are real for real or imaginary Delta.

    Raises:
        DivisionByZero: At critical damping (Delta = 0), where beta diverges.
    """
    derived = _reciprocal_inputs(config)
    delta_cap = complex(derived.delta_cap)
    if delta_cap == 0:
        raise DivisionByZero("alpha and beta are undefined at Delta = 0")
    times, scalar = _times(t)
    kab = derived.kappa_ab
    alpha = 2 / delta_cap * (delta_cap * np.cosh(delta_cap * times / 4) + kab * np.sinh(delta_cap * times / 4))
    beta = (
        (delta_cap ** 2 + kab ** 2) * np.cosh(delta_cap * times / 2)
        + 2 * kab * delta_cap * np.sinh(delta_cap * times / 2)
    ) / (2 * delta_cap ** 2)
    return _out(alpha.real, scalar), _out(beta.real, scalar)


def eta_ab(config: SystemConfig, t: Times) -> Times:
    """
    E_B^nr(t) / E_A^nr(t) for a resonant nonreciprocal configuration.

    Raises:
        DivisionByZero: For t <= 0, where both energies vanish.
    """
    times, scalar = _times(t)
    if np.any(times <= 0):
        raise DivisionByZero("eta_AB is defined only for t > 0")
    return _out(energy_battery_nr(config, times) / energy_charger_nr(config, times), scalar)


def eta_ab_steady(config: SystemConfig) -> float:
    """4 Gamma_a Gamma_b / Lambda_b^2; equals C_d when the total rates coincide."""
    derived = _require_nonreciprocal(config)
    return 4 * derived.gamma_a * derived.gamma_b / derived.lambda_b ** 2


def eta_bb(config: SystemConfig, t: Times) -> Times:
    """
    E_B^nr(t) / E_B(t): a nonreciprocal configuration against its Gamma = 0 counterpart.

    With |mu| = 1 the nonreciprocity condition gives Gamma = 2|J|, so both
    systems share omega, E, kappa_a, kappa_b and |J|.
    """
    times, scalar = _times(t)
    if np.any(times <= 0):
        raise DivisionByZero("eta_BB is defined only for t > 0")
    ratio = energy_battery_nr(config, times) / energy_battery_reciprocal(reciprocal_counterpart(config), times)
    return _out(ratio, scalar)


def optimally_weighted(config: SystemConfig) -> SystemConfig:
    """
    Nonreciprocal partner with Gamma_a = xi Gamma_s and Gamma_b = Gamma_s / xi.

    Raises:
        ZeroLocalDamping: If kappa_a * kappa_b = 0 (xi undefined or zero).
    """
    derived = derive(config)
    if config.charger.kappa * config.battery.kappa == 0:
        raise ZeroLocalDamping("optimal weighting needs kappa_a * kappa_b > 0")
    base = unit_weights(config, derived.gamma_shared)
    return make_nonreciprocal(rescale_shared_coupling(base, derived.xi))


def eta_bb_opt(config: SystemConfig, t: Times) -> Times:
    """E_B,opt^nr(t) / E_B(t) with the optimally weighted shared reservoir."""
    _require_nonreciprocal(config)
    times, scalar = _times(t)
    if np.any(times <= 0):
        raise DivisionByZero("eta_BB^opt is defined only for t > 0")
    optimized = energy_battery_nr(optimally_weighted(config), times)
    return _out(optimized / energy_battery_reciprocal(reciprocal_counterpart(config), times), scalar)


def eta_bb_steady(C: float, xi: float) -> float:
    """4 ((1 + C) / ((sqrt(C) + xi)(sqrt(C) + 1/xi)))^2."""
    root = math.sqrt(C)
    return 4 * ((1 + C) / ((root + xi) * (root + 1 / xi))) ** 2


def eta_bb_opt_steady(C: float) -> float:
    """4 ((1 + C) / (sqrt(C) + 1)^2)^2, independent of xi."""
    return 4 * ((1 + C) / (math.sqrt(C) + 1) ** 2) ** 2


def eta_bb_opt_steady_general(Gamma: float, J_abs: float, kappa_a: float, kappa_b: float) -> float:
    """Gamma^2 (4|J|^2 + kappa_a kappa_b)^2 / (|J|^2 (Gamma + sqrt(kappa_a kappa_b))^4), any Gamma."""
    kk = kappa_a * kappa_b
    return Gamma ** 2 * (4 * J_abs ** 2 + kk) ** 2 / (J_abs ** 2 * (Gamma + math.sqrt(kk)) ** 4)


# Evaluators behind each curve selector
VARIANT_EVALUATORS = {
    EnergyVariant.NONRECIPROCAL_GENERAL: energy_battery_nr_detuned,
    EnergyVariant.NONRECIPROCAL_RESONANT: energy_battery_nr,
    EnergyVariant.NONRECIPROCAL_SYMMETRIC: energy_battery_nr_symmetric,
    EnergyVariant.CHARGER_NONRECIPROCAL: energy_charger_nr,
    EnergyVariant.RECIPROCAL: energy_battery_reciprocal,
}


def evaluate(spec: EnergyCurveSpec, t: Times) -> Times:
    """Evaluates the closed-form curve selected by `spec.variant`."""
    return VARIANT_EVALUATORS[spec.variant](spec.config, t)
