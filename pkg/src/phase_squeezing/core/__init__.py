from .params import QuadraturePhase, SystemParams, make_params, normalize_phase
from .liouville import LiouvilleSolver, LiouvilleSystem, StateVector, DensityMatrix

__all__ = [
    'QuadraturePhase',
    'SystemParams',
    'make_params',
    'normalize_phase',
    'LiouvilleSolver',
    'LiouvilleSystem',
    'StateVector',
    'DensityMatrix'
]
