import logging

from ..crud.export import write_bundle_dal
from ..exceptions import BatteryError, UnknownFigure
from ..schemas.command import Command
from ..service.figures import build_figure
from ..settings import OUTPUT_DIR

# Configure logger
logger = logging.getLogger(__name__)


def run_figures(cmd: Command) -> int:
    """
    Writes the data bundle of one figure: a CSV per panel plus a manifest.

    Args:
        cmd (Command): Parsed invocation; the figure id is positional and
            --out names the output directory.

    Returns:
        int: Exit code 0.

    Raises:
        UnknownFigure: For ids other than fig2, fig3, fig4, fig5, chi (exit 2).
    """
    try:
        if not cmd.figure:
            raise UnknownFigure("a figure id is required")
        bundle = build_figure(cmd.figure)
        written = write_bundle_dal(cmd.output_path or OUTPUT_DIR, bundle)
        logger.info(f"Figure {bundle.figure}: wrote {len(written)} files")
        return 0
    except BatteryError as battery_exc:
        raise battery_exc
    except Exception as e:
        logger.error(f"Unexpected error in figures: {e}")
        raise BatteryError("An unexpected error occurred while building figure data")
