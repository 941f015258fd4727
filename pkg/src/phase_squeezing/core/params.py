from dataclasses import dataclass, asdict, replace
from typing import Dict, Optional
import logging
import math

import numpy as np

from phase_squeezing.errors import ParameterError

logger = logging.getLogger(__name__)

# Propagation phase exp(2i(-phi_1 + omega_1 r/c)) of the detected field, fixed to unity.
# Spectra and variances are reported in units of the detection prefactor |mu_13|^2 f(r)^2.
PROPAGATION_PHASE = 1.0 + 0.0j

# Two-photon detuning Delta_1 - Delta_2 - Delta_3 must vanish to this tolerance.
DELTA4_TOL = 1e-12


def normalize_phase(angle: float) -> float:
    """Map an angle into (-pi, pi]"""
    if -math.pi < angle <= math.pi:
        return float(angle)
    wrapped = math.pi - math.fmod(math.pi - angle, 2 * math.pi)
    if wrapped > math.pi:
        wrapped -= 2 * math.pi
    elif wrapped <= -math.pi:
        wrapped += 2 * math.pi
    return wrapped


@dataclass(frozen=True)
class QuadraturePhase:
    """Quadrature selection angle theta of the detected field"""
    theta: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ParameterError(f"theta must be finite, got {self.theta}")
        object.__setattr__(self, 'theta', normalize_phase(self.theta))

    @property
    def factor(self) -> complex:
        """exp(2i theta), the only way theta enters the spectrum"""
        return complex(np.exp(2j * self.theta)) * PROPAGATION_PHASE


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the driven Lambda atom, in units of gamma2"""
    gamma1: float
    gamma2: float
    delta1: float
    delta2: float
    delta3: float
    omega1: float
    omega2: float
    omega3: float
    phi: float

    @property
    def delta4(self) -> float:
        return self.delta1 - self.delta2 - self.delta3

    @property
    def total_decay(self) -> float:
        """gamma1 + gamma2, the decay rate of the optical coherences"""
        return self.gamma1 + self.gamma2

    @property
    def ground_coupling(self) -> complex:
        """Omega3 exp(i Phi)"""
        return self.omega3 * complex(np.exp(1j * self.phi))

    def with_(self, **changes) -> 'SystemParams':
        """Copy with some raw fields changed, re-validated through make_params"""
        values = self.as_dict()
        values.update(changes)
        if 'delta3' not in changes:
            values.pop('delta3')
        return make_params(**values)

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def make_params(
    gamma1: float,
    gamma2: float = 1.0,
    delta1: float = 0.0,
    delta2: float = 0.0,
    omega1: float = 0.0,
    omega2: float = 0.0,
    omega3: float = 0.0,
    phi: float = 0.0,
    delta3: Optional[float] = None
) -> SystemParams:
    """
    Validate raw values and build SystemParams.
    Every frequency is divided by gamma2 so the stored gamma2 is exactly 1.
    delta3 is derived as delta1 - delta2; an explicit delta3 must agree with it.
    """
    raw = {
        'gamma1': gamma1, 'gamma2': gamma2,
        'delta1': delta1, 'delta2': delta2,
        'omega1': omega1, 'omega2': omega2, 'omega3': omega3,
        'phi': phi
    }
    if delta3 is not None:
        raw['delta3'] = delta3

    for key, value in raw.items():
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ParameterError(f"{key} must be a real number, got {value!r}")
        if not math.isfinite(value):
            raise ParameterError(f"{key} must be finite, got {value}")
        raw[key] = value

    for key in ('gamma1', 'gamma2'):
        if raw[key] <= 0:
            raise ParameterError(f"{key} must be positive, got {raw[key]}")
    for key in ('omega1', 'omega2', 'omega3'):
        if raw[key] < 0:
            raise ParameterError(f"{key} must be non-negative, got {raw[key]}")

    derived_delta3 = raw['delta1'] - raw['delta2']
    if delta3 is not None:
        delta4 = derived_delta3 - raw['delta3']
        if abs(delta4) > DELTA4_TOL * max(1.0, abs(derived_delta3)):
            raise ParameterError(
                f"delta4 = delta1 - delta2 - delta3 = {delta4:g} must be zero"
            )

    scale = raw['gamma2']
    if scale != 1.0:
        logger.debug(f"Rescaling frequencies by gamma2 = {scale}")

    return SystemParams(
        gamma1=raw['gamma1'] / scale,
        gamma2=1.0,
        delta1=raw['delta1'] / scale,
        delta2=raw['delta2'] / scale,
        delta3=derived_delta3 / scale,
        omega1=raw['omega1'] / scale,
        omega2=raw['omega2'] / scale,
        omega3=raw['omega3'] / scale,
        phi=normalize_phase(raw['phi'])
    )
