from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator


class OptimizationResult(BaseModel):
    """
    Optimal shared-reservoir rescaling x and the optimized steady battery energy
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x_opt: float
    energy_opt: float
    x_analytic: Optional[float] = None
    energy_analytic: Optional[float] = None
    x_grid: np.ndarray
    energy_grid: np.ndarray

    @model_validator(mode="after")
    def _check_grid(self):
        if self.x_opt <= 0:
            raise ValueError("x_opt must be positive")
        if self.x_grid.shape != self.energy_grid.shape:
            raise ValueError("x_grid and energy_grid must have the same shape")
        return self

    def summary(self) -> dict:
        return {
            "x_opt": self.x_opt,
            "energy_opt": self.energy_opt,
            "x_analytic": self.x_analytic,
            "energy_analytic": self.energy_analytic,
        }


class AdvantageScan(BaseModel):
    """
    chi(r, y) over a grid with its minimum and any sign violations
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    r_grid: np.ndarray
    y_grid: np.ndarray
    chi_values: np.ndarray
    min_gap: float
    argmin_r: float
    argmin_y: float
    violation_points: List[Tuple[float, float]] = []
    boundary_points: List[Tuple[float, float]] = []
    first_violation_y: Dict[float, float] = {}
    certified_region: bool = True

    @model_validator(mode="after")
    def _check_shape(self):
        if self.chi_values.shape != (len(self.r_grid), len(self.y_grid)):
            raise ValueError("chi_values dimensions must match (r_grid, y_grid)")
        return self

    def summary(self) -> dict:
        return {
            "min_gap": self.min_gap,
            "argmin_r": self.argmin_r,
            "argmin_y": self.argmin_y,
            "violations": [list(point) for point in self.violation_points],
            "boundary_points": len(self.boundary_points),
            "certified_region": self.certified_region,
            "first_violation_y": self.first_violation_y,
        }


class VariantCheck(BaseModel):
    """
    Outcome of comparing one closed-form variant against the integrator
    """
    variant: str
    status: str
    max_relative_error: Optional[float] = None
    grid_size: int = 0
    reason: Optional[str] = None


class VerificationReport(BaseModel):
    """
    Analytic-numeric equivalence report for one configuration
    """
    tolerance: float
    t_max: float
    substeps: int
    variants: List[VariantCheck]
    notes: List[str] = []

    @property
    def passed(self) -> bool:
        return all(check.status != "fail" for check in self.variants)

    def as_document(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "t_max": self.t_max,
            "substeps": self.substeps,
            "passed": self.passed,
            "variants": {
                check.variant: {
                    "status": check.status,
                    "max_relative_error": check.max_relative_error,
                    "grid_size": check.grid_size,
                    "pass": check.status == "pass",
                    **({"reason": check.reason} if check.reason else {}),
                }
                for check in self.variants
            },
            "notes": self.notes,
        }
