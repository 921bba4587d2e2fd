import logging
import re
from typing import Dict, Iterable, Tuple

from .exceptions import InvalidConfig, InvalidGrid

# Configure logger
logger = logging.getLogger(__name__)

GRID_PATTERN = re.compile(r"^r(\d+):y(\d+)$")


def parse_overrides(pairs: Iterable[str]) -> Dict[str, float]:
    """
    Parses repeated ``KEY=VALUE`` command line overrides.

    Args:
        pairs (iterable): Raw strings as given to --set.

    Returns:
        dict: Key to float value; later pairs win over earlier ones.

    Raises:
        InvalidConfig: If a pair lacks "=" or its value is not a number.
    """
    overrides = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep or not key.strip():
            raise InvalidConfig(f"override {pair!r} is not of the form KEY=VALUE")
        try:
            overrides[key.strip()] = float(raw)
        except ValueError:
            raise InvalidConfig(f"override {pair!r} has a non-numeric value")
    return overrides


def parse_grid(spec: str) -> Tuple[int, int]:
    """Parses "rN:yM" into (N, M); both need at least 2 points."""
    match = GRID_PATTERN.match(spec.strip())
    if not match:
        raise InvalidGrid(f"grid {spec!r} is not of the form rN:yM")
    r_points, y_points = int(match.group(1)), int(match.group(2))
    if r_points < 2 or y_points < 2:
        raise InvalidGrid(f"grid needs at least 2 points per axis, got {spec!r}")
    return r_points, y_points
