from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator


class SweepResult(BaseModel):
    """
    Tabulated scalar outputs over one grid; one CSV file per instance
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    columns: List[str]
    rows: np.ndarray

    @model_validator(mode="after")
    def _check_columns(self):
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.columns):
            raise ValueError("rows must be a 2-D array with one column per header entry")
        return self

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]


class FigureBundle(BaseModel):
    """
    All panels of one reproduced figure plus the manifest describing them
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    figure: str
    panels: List[SweepResult]
    manifest: dict

    def panel(self, name: str) -> SweepResult:
        for panel in self.panels:
            if panel.name == name:
                return panel
        raise KeyError(name)
