import logging
from typing import Callable, Dict, List

import numpy as np

from ..crud.config_store import config_to_flat
from ..exceptions import UnknownFigure
from ..models.battery_enum import FigureId
from ..schemas.battery import SystemConfig
from ..schemas.figure import FigureBundle, SweepResult
from . import closedform
from .analysis import advantage_region_scan, optimal_rescaling, optimized_config
from .params import derive, make_config, reciprocal_counterpart, validate

# Configure logger
logger = logging.getLogger(__name__)

# Samples per time panel
CURVE_POINTS = 1001
# Cooperativity axis of the steady-state ratio panel
COOPERATIVITY_RANGE = (1e-3, 1e3)
COOPERATIVITY_POINTS = 121
# Advantage map
CHI_GRID = (101, 22)
CHI_Y_MAX = 0.21

# Horizon of every time panel in units of 1/|J|
JT_MAX = {
    FigureId.FIG2: 10.0,
    FigureId.FIG3: 60.0,
    FigureId.FIG4: 10.0,
    FigureId.FIG5: 40.0,
}


def preset(figure: FigureId) -> SystemConfig:
    """
    Reference parameter set of a figure (omega = omega_L = 1, |mu| = 1).

    "J = Gamma/2" is read as |J| = Gamma/2 with the phase of the nonreciprocity
    condition, J = -i mu Gamma / 2 = i Gamma / 2 for p_a = p_b = 1.
    """
    if figure in (FigureId.FIG2, FigureId.FIG3):
        config = make_config(kappa_a=0.003, kappa_b=0.003, Gamma=0.04, J=0.02j, drive_amplitude=0.1)
    elif figure is FigureId.FIG4:
        config = make_config(kappa_a=0.1, kappa_b=0.003, Gamma=0.01, J=0.005j, drive_amplitude=0.1)
    elif figure is FigureId.FIG5:
        config = make_config(kappa_a=0.05, kappa_b=0.01, Gamma=0.4, J=0.2j, drive_amplitude=0.1)
    else:
        raise UnknownFigure(f"no parameter preset for {figure.value}")
    return validate(config)


def _time_axis(config: SystemConfig, figure: FigureId):
    J_abs = abs(config.J)
    jt = np.linspace(0.0, JT_MAX[figure], CURVE_POINTS)
    return jt, jt / J_abs


def _panel(name: str, columns: Dict[str, np.ndarray]) -> SweepResult:
    return SweepResult(name=name, columns=list(columns), rows=np.column_stack(list(columns.values())))


def _manifest(figure: FigureId, configs: Dict[str, SystemConfig], notes: List[str]) -> dict:
    manifest = {
        "figure": figure.value,
        "parameters": {label: config_to_flat(config) for label, config in configs.items()},
        "notes": notes,
    }
    if figure in JT_MAX:
        J_abs = abs(next(iter(configs.values())).J)
        manifest["Jt_max"] = JT_MAX[figure]
        manifest["t_end"] = JT_MAX[figure] / J_abs
        manifest["points"] = CURVE_POINTS
    return manifest


def figure2() -> FigureBundle:
    config = preset(FigureId.FIG2)
    jt, t = _time_axis(config, FigureId.FIG2)
    positive = t > 0
    panels = [
        _panel("fig2a", {
            "Jt": jt,
            "E_A_nr": closedform.energy_charger_nr(config, t),
            "E_B_nr": closedform.energy_battery_nr(config, t),
        }),
        _panel("fig2b", {
            "Jt": jt[positive],
            "eta_AB": closedform.eta_ab(config, t[positive]),
        }),
    ]
    notes = [
        "time horizon is not part of the reference parameter set; Jt_max chosen to show the approach to steady state",
        "eta_AB is sampled for t > 0 only",
        f"steady eta_AB = C_d = {derive(config).coop_dissipative!r}",
    ]
    return FigureBundle(figure="fig2", panels=panels, manifest=_manifest(FigureId.FIG2, {"nonreciprocal": config}, notes))


def figure3() -> FigureBundle:
    config = preset(FigureId.FIG3)
    reciprocal = reciprocal_counterpart(config)
    jt, t = _time_axis(config, FigureId.FIG3)
    positive = t > 0
    derived = derive(reciprocal)
    panels = [
        _panel("fig3a", {
            "Jt": jt,
            "E_B": closedform.energy_battery_reciprocal(reciprocal, t),
            "E_B_nr": closedform.energy_battery_nr(config, t),
        }),
        _panel("fig3b", {
            "Jt": jt[positive],
            "eta_BB": closedform.eta_bb(config, t[positive]),
        }),
    ]
    notes = [
        f"Delta = {derived.delta_cap!r}",
        f"steady eta_BB = {closedform.eta_bb_steady(derived.coop_coherent, derived.xi)!r}",
    ]
    configs = {"nonreciprocal": config, "reciprocal": reciprocal}
    return FigureBundle(figure="fig3", panels=panels, manifest=_manifest(FigureId.FIG3, configs, notes))


def figure4() -> FigureBundle:
    config = preset(FigureId.FIG4)
    reciprocal = reciprocal_counterpart(config)
    optimized = optimized_config(config)
    jt, t = _time_axis(config, FigureId.FIG4)
    positive = t > 0
    derived = derive(reciprocal)

    C = np.geomspace(*COOPERATIVITY_RANGE, COOPERATIVITY_POINTS)
    panels = [
        _panel("fig4a", {
            "Jt": jt,
            "E_B": closedform.energy_battery_reciprocal(reciprocal, t),
            "E_B_nr": closedform.energy_battery_nr(config, t),
            "E_B_opt_nr": closedform.energy_battery_nr(optimized, t),
        }),
        _panel("fig4b", {
            "Jt": jt[positive],
            "eta_BB": closedform.eta_bb(config, t[positive]),
            "eta_BB_opt": closedform.eta_bb_opt(config, t[positive]),
        }),
        _panel("fig4c", {
            "C": C,
            "eta_BB_inf": np.array([closedform.eta_bb_steady(c, derived.xi) for c in C]),
            "eta_BB_opt_inf": np.array([closedform.eta_bb_opt_steady(c) for c in C]),
        }),
    ]
    notes = [
        f"Delta = {derived.delta_cap!r}",
        f"optimized weights Gamma_a = xi Gamma, Gamma_b = Gamma / xi with xi = {derived.xi!r}",
        "panel c uses xi of the panel a parameters",
    ]
    configs = {"nonreciprocal": config, "reciprocal": reciprocal, "optimized": optimized}
    return FigureBundle(figure="fig4", panels=panels, manifest=_manifest(FigureId.FIG4, configs, notes))


def figure5() -> FigureBundle:
    config = preset(FigureId.FIG5)
    reciprocal = reciprocal_counterpart(config)
    result = optimal_rescaling(config)
    optimized = optimized_config(config)
    jt, t = _time_axis(config, FigureId.FIG5)
    panels = [
        _panel("fig5", {
            "Jt": jt,
            "E_B": closedform.energy_battery_reciprocal(reciprocal, t),
            "E_B_nr": closedform.energy_battery_nr(config, t),
            "E_A_nr": closedform.energy_charger_nr(config, t),
            "E_B_opt_nr": closedform.energy_battery_nr(optimized, t),
            "E_A_opt_nr": closedform.energy_charger_nr(optimized, t),
        }),
    ]
    notes = [
        "drive amplitude is not part of the reference parameter set; 0.1 assumed as in the other figures",
        f"x_opt = {result.x_opt!r}, p_a = x_opt^(1/2) = {abs(optimized.charger.p)!r}",
    ]
    configs = {"nonreciprocal": config, "reciprocal": reciprocal, "optimized": optimized}
    return FigureBundle(figure="fig5", panels=panels, manifest=_manifest(FigureId.FIG5, configs, notes))


def figure_chi() -> FigureBundle:
    scan = advantage_region_scan(*CHI_GRID, y_max=CHI_Y_MAX)
    R, Y = np.meshgrid(scan.r_grid, scan.y_grid, indexing="ij")
    panel = _panel("chi", {"r": R.ravel(), "y": Y.ravel(), "chi": scan.chi_values.ravel()})
    manifest = {
        "figure": FigureId.CHI.value,
        "grid": {"r_points": CHI_GRID[0], "y_points": CHI_GRID[1], "y_max": CHI_Y_MAX},
        "summary": scan.summary(),
        "notes": ["chi in units of N = 8 F^2 / |J|^2, first minimum k = 0"],
    }
    return FigureBundle(figure="chi", panels=[panel], manifest=manifest)


FIGURE_BUILDERS: Dict[FigureId, Callable[[], FigureBundle]] = {
    FigureId.FIG2: figure2,
    FigureId.FIG3: figure3,
    FigureId.FIG4: figure4,
    FigureId.FIG5: figure5,
    FigureId.CHI: figure_chi,
}


def build_figure(figure: str) -> FigureBundle:
    """
    Builds every panel of a figure from its built-in parameters.

    Raises:
        UnknownFigure: If `figure` is not one of fig2, fig3, fig4, fig5, chi.
    """
    try:
        figure_id = FigureId(figure)
    except ValueError:
        raise UnknownFigure(f"unknown figure id {figure!r}; expected one of {', '.join(f.value for f in FigureId)}")
    logger.info(f"Building figure {figure_id.value}")
    return FIGURE_BUILDERS[figure_id]()
