import json
import logging
import math
from pathlib import Path
from typing import Dict, Optional

from ..exceptions import InvalidConfig
from ..schemas.battery import DriveParams, ModeParams, SystemConfig
from ..schemas.command import CONFIG_KEYS

# Configure logger
logger = logging.getLogger(__name__)

REQUIRED_KEYS = ("kappa_a", "kappa_b", "Gamma", "drive_amplitude")


def _number(key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidConfig(f"config key {key!r} must be a number, got {value!r}")
    return float(value)


def config_from_flat(document: Dict[str, float]) -> SystemConfig:
    """
    Builds a SystemConfig from the flat key-value document.

    Missing optional keys take their defaults: omega = 1, p_a = p_b = 1,
    J = 0 and omega_L = omega.

    Raises:
        InvalidConfig: On unknown keys, missing required keys or non-numeric values.
    """
    unknown = sorted(set(document) - set(CONFIG_KEYS))
    if unknown:
        raise InvalidConfig(f"unknown config keys: {', '.join(unknown)}")
    missing = [key for key in REQUIRED_KEYS if key not in document]
    if missing:
        raise InvalidConfig(f"missing config keys: {', '.join(missing)}")
    values = {key: _number(key, value) for key, value in document.items()}

    omega = values.get("omega", 1.0)
    return SystemConfig(
        charger=ModeParams(
            omega=omega,
            kappa=values["kappa_a"],
            p=complex(values.get("p_a_re", 1.0), values.get("p_a_im", 0.0)),
        ),
        battery=ModeParams(
            omega=omega,
            kappa=values["kappa_b"],
            p=complex(values.get("p_b_re", 1.0), values.get("p_b_im", 0.0)),
        ),
        J=complex(values.get("J_re", 0.0), values.get("J_im", 0.0)),
        Gamma=values["Gamma"],
        drive=DriveParams(amplitude=values["drive_amplitude"], omega_L=values.get("omega_L", omega)),
    )


def config_to_flat(config: SystemConfig) -> Dict[str, float]:
    """Inverse of `config_from_flat`; every key is written."""
    return {
        "omega": config.omega,
        "kappa_a": config.charger.kappa,
        "kappa_b": config.battery.kappa,
        "p_a_re": config.charger.p.real,
        "p_a_im": config.charger.p.imag,
        "p_b_re": config.battery.p.real,
        "p_b_im": config.battery.p.imag,
        "J_re": config.J.real,
        "J_im": config.J.imag,
        "Gamma": config.Gamma,
        "drive_amplitude": config.drive.amplitude,
        "omega_L": config.drive.omega_L,
    }


def load_config_dal(path: Optional[str], overrides: Optional[Dict[str, float]] = None) -> SystemConfig:
    """
    Data Access Layer function to read a config document and apply overrides.

    Args:
        path (str): JSON file holding a flat object; None starts from overrides alone.
        overrides (dict): Key to value pairs applied on top of the file.

    Returns:
        SystemConfig: The unvalidated configuration.

    Raises:
        InvalidConfig: If the file is missing, unreadable, not a JSON object,
            or the merged document is not a valid flat config.
    """
    document: Dict[str, float] = {}
    if path is not None:
        try:
            document = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise InvalidConfig(f"config file {path} not found")
        except (OSError, json.JSONDecodeError) as e:
            raise InvalidConfig(f"config file {path} is unreadable: {e}")
        if not isinstance(document, dict):
            raise InvalidConfig(f"config file {path} must hold a JSON object")
    document = {**document, **(overrides or {})}
    config = config_from_flat(document)
    logger.info(f"Loaded config from {path or 'overrides'}")
    return config


def dump_config_dal(config: SystemConfig) -> str:
    """
    Data Access Layer function to serialise a config as JSON text.

    Floats keep their repr, which round-trips doubles exactly.
    """
    flat = config_to_flat(config)
    for key, value in flat.items():
        if not math.isfinite(value):
            raise InvalidConfig(f"config key {key!r} is not finite")
    return json.dumps(flat, indent=2, sort_keys=False) + "\n"
