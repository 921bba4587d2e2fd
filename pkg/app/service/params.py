import cmath
import logging
import math
from typing import Optional

from ..exceptions import FrequencyMismatch, InvalidConfig, NegativeRate, ZeroSharedCoupling
from ..schemas.battery import DerivedParams, DriveParams, ModeParams, SystemConfig

# Configure logger
logger = logging.getLogger(__name__)

# |mu| counts as already normalised inside this slack
MU_NORM_SLACK = 8 * 2.220446049250313e-16
# Relative slack of the nonreciprocity condition
NONRECIPROCITY_TOL = 1e-12


def make_config(
    kappa_a: float,
    kappa_b: float,
    Gamma: float,
    J: complex = 0.0,
    drive_amplitude: float = 0.0,
    omega: float = 1.0,
    p_a: complex = 1.0,
    p_b: complex = 1.0,
    omega_L: Optional[float] = None,
) -> SystemConfig:
    """
    Builds a SystemConfig from flat keyword arguments.

    The drive frequency defaults to the mode frequency (resonant drive). No
    invariant is checked here; pass the result through `validate`.
    """
    return SystemConfig(
        charger=ModeParams(omega=omega, kappa=kappa_a, p=p_a),
        battery=ModeParams(omega=omega, kappa=kappa_b, p=p_b),
        J=J,
        Gamma=Gamma,
        drive=DriveParams(amplitude=drive_amplitude, omega_L=omega if omega_L is None else omega_L),
    )


def validate(config: SystemConfig, normalize_mu: bool = True) -> SystemConfig:
    """
    Checks every configuration invariant and normalises the shared-reservoir weights.

    When `normalize_mu` is set, p_a and p_b are divided by sqrt(|mu|) and Gamma is
    multiplied by |mu|, so that |mu| = 1 while Gamma_a = Gamma |p_a|^2 and
    Gamma_b = Gamma |p_b|^2 (and therefore the dynamics) stay unchanged.

    Args:
        config (SystemConfig): The configuration to check.
        normalize_mu (bool): Whether to rescale the weights to |mu| = 1.

    Returns:
        SystemConfig: The validated (and possibly normalised) configuration.

    Raises:
        NegativeRate: If kappa_a, kappa_b or Gamma is negative.
        FrequencyMismatch: If the charger and battery frequencies differ.
        ZeroSharedCoupling: If normalisation is requested but p_a * p_b = 0.
        InvalidConfig: For non-finite values, omega <= 0 or a negative drive amplitude.
    """
    values = {
        "omega_a": config.charger.omega,
        "omega_b": config.battery.omega,
        "kappa_a": config.charger.kappa,
        "kappa_b": config.battery.kappa,
        "Gamma": config.Gamma,
        "drive_amplitude": config.drive.amplitude,
        "omega_L": config.drive.omega_L,
    }
    complex_values = {"p_a": config.charger.p, "p_b": config.battery.p, "J": config.J}
    for name, value in values.items():
        if not math.isfinite(value):
            raise InvalidConfig(f"{name} must be finite, got {value}")
    for name, value in complex_values.items():
        if not cmath.isfinite(value):
            raise InvalidConfig(f"{name} must be finite, got {value}")

    for name in ("kappa_a", "kappa_b", "Gamma"):
        if values[name] < 0:
            raise NegativeRate(f"{name} must be >= 0, got {values[name]}")
    if values["omega_a"] <= 0 or values["omega_b"] <= 0:
        raise InvalidConfig("omega must be > 0")
    if values["omega_a"] != values["omega_b"]:
        raise FrequencyMismatch(
            f"charger and battery frequencies must coincide, got {values['omega_a']} and {values['omega_b']}"
        )
    if values["drive_amplitude"] < 0:
        raise InvalidConfig(f"drive_amplitude must be >= 0, got {values['drive_amplitude']}")

    if not normalize_mu:
        return config

    p_a, p_b = config.charger.p, config.battery.p
    mu_abs = abs(p_a) * abs(p_b)
    if mu_abs == 0:
        raise ZeroSharedCoupling("|mu| normalisation needs p_a * p_b != 0")
    if abs(mu_abs - 1.0) <= MU_NORM_SLACK:
        return config

    scale = math.sqrt(mu_abs)
    logger.info(f"Normalising shared coupling: |mu|={mu_abs!r} absorbed into Gamma")
    return config.model_copy(update={
        "charger": config.charger.model_copy(update={"p": p_a / scale}),
        "battery": config.battery.model_copy(update={"p": p_b / scale}),
        "Gamma": config.Gamma * mu_abs,
    })


def discriminant(kappa_a: float, kappa_b: float, J_abs: float) -> complex:
    """Delta = sqrt(-16|J|^2 + (kappa_a - kappa_b)^2) on the branch Re >= 0 (Im >= 0 when Re = 0)."""
    return cmath.sqrt(complex(-16.0 * J_abs ** 2 + (kappa_a - kappa_b) ** 2, 0.0))


def derive(config: SystemConfig) -> DerivedParams:
    """
    Computes every derived quantity of a validated configuration.

    Args:
        config (SystemConfig): A configuration that passed `validate`.

    Returns:
        DerivedParams: mu, the shared and total rates, detuning, discriminant,
        xi and both cooperativities. Undefined ratios (kappa_b = 0 for xi,
        kappa_a kappa_b = 0 for C) are left as None.
    """
    kappa_a, kappa_b = config.charger.kappa, config.battery.kappa
    p_a, p_b = config.charger.p, config.battery.p
    J_abs = abs(config.J)

    mu = -p_b * p_a.conjugate()
    gamma_a = config.Gamma * abs(p_a) ** 2
    gamma_b = config.Gamma * abs(p_b) ** 2
    lambda_a = gamma_a + kappa_a
    lambda_b = gamma_b + kappa_b

    xi = math.sqrt(kappa_a / kappa_b) if kappa_b > 0 else None
    coop_coherent = 4.0 * J_abs ** 2 / (kappa_a * kappa_b) if kappa_a * kappa_b > 0 else None
    coop_dissipative = 4.0 * gamma_a * gamma_b / (lambda_a * lambda_b) if lambda_a * lambda_b > 0 else None
    symmetric = math.isclose(lambda_a, lambda_b, rel_tol=1e-12) and math.isclose(gamma_a, gamma_b, rel_tol=1e-12)

    return DerivedParams(
        omega=config.omega,
        mu=mu,
        gamma_a=gamma_a,
        gamma_b=gamma_b,
        gamma_shared=config.Gamma * abs(mu),
        lambda_a=lambda_a,
        lambda_b=lambda_b,
        delta=config.drive.omega_L - config.omega,
        delta_cap=discriminant(kappa_a, kappa_b, J_abs),
        kappa_ab=kappa_a + kappa_b,
        xi=xi,
        coop_coherent=coop_coherent,
        coop_dissipative=coop_dissipative,
        coop_dissipative_extrapolated=not symmetric,
        underdamped=16.0 * J_abs ** 2 > (kappa_a - kappa_b) ** 2,
        J=config.J,
        coupling_ab=config.J + 1j * mu * config.Gamma / 2,
        coupling_ba=config.J.conjugate() + 1j * mu.conjugate() * config.Gamma / 2,
    )


def nonreciprocity_residual(config: SystemConfig) -> float:
    """|J - (-i mu Gamma / 2)|; zero iff the charger equations decouple from the battery."""
    mu = -config.battery.p * config.charger.p.conjugate()
    return abs(config.J - (-1j * mu * config.Gamma / 2))


def is_nonreciprocal(config: SystemConfig) -> bool:
    residual = nonreciprocity_residual(config)
    if residual == 0:
        return True
    mu = -config.battery.p * config.charger.p.conjugate()
    return residual <= NONRECIPROCITY_TOL * max(abs(config.J), config.Gamma * abs(mu))


def make_nonreciprocal(config: SystemConfig) -> SystemConfig:
    """
    Replaces J by -i mu Gamma / 2, balancing coherent and dissipative coupling.

    Raises:
        ZeroSharedCoupling: If Gamma = 0 or p_a * p_b = 0.
    """
    mu = -config.battery.p * config.charger.p.conjugate()
    if config.Gamma == 0 or mu == 0:
        raise ZeroSharedCoupling("nonreciprocity needs Gamma > 0 and p_a * p_b != 0")
    return config.model_copy(update={"J": -1j * mu * config.Gamma / 2})


def rescale_shared_coupling(config: SystemConfig, x: float) -> SystemConfig:
    """
    Applies p_a -> p_a sqrt(x), p_b -> p_b / sqrt(x).

    mu and Gamma_a * Gamma_b are unchanged; for |p_a| = |p_b| = 1 this sets
    Gamma_a = x Gamma and Gamma_b = Gamma / x.
    """
    if not x > 0:
        raise InvalidConfig(f"rescaling factor must be > 0, got {x}")
    root = math.sqrt(x)
    return config.model_copy(update={
        "charger": config.charger.model_copy(update={"p": config.charger.p * root}),
        "battery": config.battery.model_copy(update={"p": config.battery.p / root}),
    })


def unit_weights(config: SystemConfig, Gamma: float) -> SystemConfig:
    """Keeps the phases of p_a and p_b, sets |p_a| = |p_b| = 1 and the shared rate to Gamma."""
    p_a, p_b = config.charger.p, config.battery.p
    if p_a == 0 or p_b == 0:
        raise ZeroSharedCoupling("unit weights need p_a * p_b != 0")
    return config.model_copy(update={
        "charger": config.charger.model_copy(update={"p": p_a / abs(p_a)}),
        "battery": config.battery.model_copy(update={"p": p_b / abs(p_b)}),
        "Gamma": Gamma,
    })


def reciprocal_counterpart(config: SystemConfig) -> SystemConfig:
    """The same charger-battery pair without the shared reservoir (Gamma = 0)."""
    return config.model_copy(update={"Gamma": 0.0})
