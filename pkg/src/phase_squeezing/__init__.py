__version__ = "1.0.0"
__license__ = "MIT"

from .core.params import QuadraturePhase, SystemParams, make_params
from .core.liouville import (
    DensityMatrix,
    LiouvilleSolver,
    LiouvilleSystem,
    StateVector,
    build_liouvillian,
    evolve,
    steady_state,
    to_density_matrix
)
from .analysis.spectrum import SpectrumAnalyzer, SpectrumResult, squeezing_spectrum
from .analysis.dressed import DressedBasis, DressedStateAnalyzer, diagonalize
from .analysis.variance import SqueezingReport, VarianceAnalyzer, squeezing_parameter

__all__ = [
    'QuadraturePhase',
    'SystemParams',
    'make_params',
    'DensityMatrix',
    'LiouvilleSolver',
    'LiouvilleSystem',
    'StateVector',
    'build_liouvillian',
    'evolve',
    'steady_state',
    'to_density_matrix',
    'SpectrumAnalyzer',
    'SpectrumResult',
    'squeezing_spectrum',
    'DressedBasis',
    'DressedStateAnalyzer',
    'diagonalize',
    'SqueezingReport',
    'VarianceAnalyzer',
    'squeezing_parameter'
]
