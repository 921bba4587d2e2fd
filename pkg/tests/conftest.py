import json

import pytest

from app.crud.config_store import config_to_flat
from app.models.battery_enum import FigureId
from app.service.figures import preset
from app.service.params import reciprocal_counterpart


@pytest.fixture
def fig2_config():
    """Symmetric nonreciprocal rates: Gamma = 0.04, E = 0.1, kappa = 0.003, J = 0.02i."""
    return preset(FigureId.FIG2)


@pytest.fixture
def fig3_reciprocal(fig2_config):
    return reciprocal_counterpart(fig2_config)


@pytest.fixture
def fig4_config():
    return preset(FigureId.FIG4)


@pytest.fixture
def fig5_config():
    return preset(FigureId.FIG5)


@pytest.fixture
def write_config(tmp_path):
    """Writes a flat config document and returns its path."""
    def _write(config=None, name="config.json", **values):
        document = config_to_flat(config) if config is not None else {}
        document.update(values)
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return str(path)
    return _write
