from typing import Dict, Optional

from pydantic import BaseModel, field_validator

from ..models.battery_enum import OutputFormat, Verb

# Keys of the flat config document
CONFIG_KEYS = (
    "omega", "kappa_a", "kappa_b",
    "p_a_re", "p_a_im", "p_b_re", "p_b_im",
    "J_re", "J_im", "Gamma",
    "drive_amplitude", "omega_L",
)


class Command(BaseModel):
    """
    Pydantic Model for one parsed command line invocation
    """
    verb: Verb
    config_path: Optional[str] = None
    overrides: Dict[str, float] = {}
    output_path: Optional[str] = None
    format: Optional[OutputFormat] = None
    t_end: Optional[float] = None
    dt_max: Optional[float] = None
    points: Optional[int] = None
    grid: Optional[str] = None
    y_max: Optional[float] = None
    figure: Optional[str] = None
    dump_config: bool = False

    @field_validator("overrides")
    @classmethod
    def _known_keys(cls, overrides: Dict[str, float]) -> Dict[str, float]:
        unknown = sorted(set(overrides) - set(CONFIG_KEYS))
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return overrides
