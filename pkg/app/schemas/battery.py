from typing import Annotated, List, Optional

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict

from ..models.battery_enum import EnergyVariant


def _as_complex(value):
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    return complex(value)


Complex = Annotated[complex, BeforeValidator(_as_complex)]


class ModeParams(BaseModel):
    """
    One bosonic mode: frequency, local damping and shared-reservoir weight
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    omega: float = 1.0
    kappa: float
    p: Complex = 1.0 + 0.0j


class DriveParams(BaseModel):
    """
    Classical pump applied to the charger
    """
    model_config = ConfigDict(frozen=True)

    amplitude: float
    omega_L: float = 1.0


class SystemConfig(BaseModel):
    """
    Full charger-battery-reservoir-drive configuration (units of omega, hbar=1)
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    charger: ModeParams
    battery: ModeParams
    J: Complex = 0.0 + 0.0j
    Gamma: float
    drive: DriveParams

    @property
    def omega(self) -> float:
        return self.charger.omega


class DerivedParams(BaseModel):
    """
    Quantities computed from a validated SystemConfig
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    omega: float
    mu: Complex
    gamma_a: float
    gamma_b: float
    gamma_shared: float
    lambda_a: float
    lambda_b: float
    delta: float
    delta_cap: Complex
    kappa_ab: float
    xi: Optional[float] = None
    coop_coherent: Optional[float] = None
    coop_dissipative: Optional[float] = None
    coop_dissipative_extrapolated: bool = False
    underdamped: bool = False
    J: Complex = 0.0j
    coupling_ab: Complex = 0.0j
    coupling_ba: Complex = 0.0j

    @property
    def xi_defined(self) -> bool:
        return self.xi is not None


class MomentState(BaseModel):
    """
    The five dynamical moments <a>, <b>, <a^dag a>, <b^dag b>, <a^dag b> (rotating frame)
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mean_a: Complex = 0.0j
    mean_b: Complex = 0.0j
    n_a: float = 0.0
    n_b: float = 0.0
    coh_ab: Complex = 0.0j

    @classmethod
    def vacuum(cls) -> "MomentState":
        return cls()

    @classmethod
    def coherent(cls, alpha: complex, beta: complex) -> "MomentState":
        """Moments of the product coherent state |alpha>|beta>."""
        return cls(
            mean_a=alpha,
            mean_b=beta,
            n_a=abs(alpha) ** 2,
            n_b=abs(beta) ** 2,
            coh_ab=np.conj(alpha) * beta,
        )

    def to_vector(self) -> np.ndarray:
        """Real layout [Re a, Im a, Re b, Im b, n_a, n_b, Re ab, Im ab]."""
        return np.array([
            self.mean_a.real, self.mean_a.imag,
            self.mean_b.real, self.mean_b.imag,
            self.n_a, self.n_b,
            self.coh_ab.real, self.coh_ab.imag,
        ], dtype=float)

    @classmethod
    def from_vector(cls, vector) -> "MomentState":
        v = np.asarray(vector, dtype=float)
        return cls(
            mean_a=complex(v[0], v[1]),
            mean_b=complex(v[2], v[3]),
            n_a=float(v[4]),
            n_b=float(v[5]),
            coh_ab=complex(v[6], v[7]),
        )


class Trajectory(BaseModel):
    """
    Time grid, moment history (real layout, one row per step) and energies
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    omega: float
    times: np.ndarray
    moments: np.ndarray

    @property
    def energy_a(self) -> np.ndarray:
        return self.omega * self.moments[:, 4]

    @property
    def energy_b(self) -> np.ndarray:
        return self.omega * self.moments[:, 5]

    @property
    def mean_a(self) -> np.ndarray:
        return self.moments[:, 0] + 1j * self.moments[:, 1]

    @property
    def mean_b(self) -> np.ndarray:
        return self.moments[:, 2] + 1j * self.moments[:, 3]

    @property
    def coh_ab(self) -> np.ndarray:
        return self.moments[:, 6] + 1j * self.moments[:, 7]

    @property
    def states(self) -> List[MomentState]:
        return [MomentState.from_vector(row) for row in self.moments]

    @property
    def final(self) -> MomentState:
        return MomentState.from_vector(self.moments[-1])

    def __len__(self) -> int:
        return len(self.times)


class EnergyCurveSpec(BaseModel):
    """
    Selector for one closed-form energy curve
    """
    model_config = ConfigDict(frozen=True)

    config: SystemConfig
    variant: EnergyVariant
