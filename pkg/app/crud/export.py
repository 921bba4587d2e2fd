import json
import logging
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from ..exceptions import OutputError
from ..schemas.analysis import AdvantageScan, OptimizationResult
from ..schemas.battery import Trajectory
from ..schemas.figure import FigureBundle, SweepResult

# Configure logger
logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = ["t", "re_a", "im_a", "re_b", "im_b", "n_a", "n_b", "re_ab", "im_ab", "E_A", "E_B"]
# Full double precision in every output file
FLOAT_FORMAT = "%.17g"


def _ensure_parent(path: str) -> Path:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"cannot create directory for {path}: {e}")
    return target


def write_table_dal(path: str, columns: List[str], rows: np.ndarray) -> str:
    """
    Data Access Layer function to write a numeric table as CSV.

    Args:
        path (str): Destination file.
        columns (list): Header entries.
        rows (ndarray): One row per record, one column per header entry.

    Returns:
        str: The path written.

    Raises:
        OutputError: If the file cannot be written.
    """
    target = _ensure_parent(path)
    try:
        np.savetxt(target, np.asarray(rows, dtype=float), delimiter=",", fmt=FLOAT_FORMAT,
                   header=",".join(columns), comments="")
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}")
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


def _clean(value):
    # json has no complex numbers or numpy scalars
    if isinstance(value, dict):
        return {str(key): _clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(item) for item in value]
    if isinstance(value, np.ndarray):
        return [_clean(item) for item in value.tolist()]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def write_json_dal(path: str, document: dict) -> str:
    """Data Access Layer function to write a JSON document (float repr round-trips exactly)."""
    target = _ensure_parent(path)
    try:
        target.write_text(json.dumps(_clean(document), indent=2) + "\n")
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}")
    logger.info(f"Wrote {path}")
    return path


def trajectory_rows(trajectory: Trajectory) -> np.ndarray:
    return np.column_stack([trajectory.times, trajectory.moments, trajectory.energy_a, trajectory.energy_b])


def write_trajectory_dal(path: str, trajectory: Trajectory) -> str:
    """Writes `t,re_a,im_a,re_b,im_b,n_a,n_b,re_ab,im_ab,E_A,E_B`, one row per recorded step."""
    return write_table_dal(path, TRAJECTORY_COLUMNS, trajectory_rows(trajectory))


def write_curves_dal(path: str, times: np.ndarray, curves: Dict[str, Optional[np.ndarray]]) -> str:
    """
    Writes the closed-form curve table; curves that are None (undefined for
    the config) are left out of the header.
    """
    defined = {name: values for name, values in curves.items() if values is not None}
    columns = ["t", *defined]
    return write_table_dal(path, columns, np.column_stack([times, *defined.values()]))


def write_sweep_dal(path: str, sweep: SweepResult) -> str:
    return write_table_dal(path, sweep.columns, sweep.rows)


def write_scan_dal(path: str, scan: AdvantageScan) -> List[str]:
    """
    Writes the `r,y,chi` grid CSV at `path` and its summary next to it as JSON.

    Returns:
        list: Both paths written.
    """
    R, Y = np.meshgrid(scan.r_grid, scan.y_grid, indexing="ij")
    rows = np.column_stack([R.ravel(), Y.ravel(), scan.chi_values.ravel()])
    csv_path = write_table_dal(path, ["r", "y", "chi"], rows)
    summary_path = write_json_dal(str(Path(path).with_suffix(".json")), scan.summary())
    return [csv_path, summary_path]


def write_optimization_dal(path: str, result: OptimizationResult, as_json: bool) -> str:
    """Writes the optimum as JSON, or the diagnostic x, energy curve as CSV."""
    if as_json:
        return write_json_dal(path, result.summary())
    return write_table_dal(path, ["x", "energy"], np.column_stack([result.x_grid, result.energy_grid]))


def write_bundle_dal(directory: str, bundle: FigureBundle) -> List[str]:
    """
    Writes one CSV per panel and `<figure>_manifest.json` into `directory`.

    Returns:
        list: Every path written, manifest last.
    """
    written = [write_sweep_dal(str(Path(directory) / f"{panel.name}.csv"), panel) for panel in bundle.panels]
    manifest = {**bundle.manifest, "files": [Path(path).name for path in written]}
    written.append(write_json_dal(str(Path(directory) / f"{bundle.figure}_manifest.json"), manifest))
    return written
