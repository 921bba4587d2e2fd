import os
import logging
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Logging
LOG_LEVEL = os.getenv("NRBATTERY_LOG_LEVEL", "INFO").upper()
LOG_FORMAT = "%(asctime)s %(levelname)s %(message)s"

# Integration defaults (units of 1/omega)
DEFAULT_T_END = float(os.getenv("NRBATTERY_T_END", "400"))
DEFAULT_DT_MAX = float(os.getenv("NRBATTERY_DT_MAX", "0.05"))

# Analytic-numeric equivalence harness
VERIFY_POINTS = int(os.getenv("NRBATTERY_VERIFY_POINTS", "1000"))
VERIFY_TOLERANCE = 1e-6

# Where `figures` writes its bundle when --out is not given
OUTPUT_DIR = os.getenv("NRBATTERY_OUTPUT_DIR", ".")


def configure_logging(level: str = LOG_LEVEL) -> None:
    """
    Configures the root logger once for command line runs.

    Args:
        level (str): A logging level name such as "INFO" or "WARNING".
    """
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT)
