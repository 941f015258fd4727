from .spectrum import SpectrumAnalyzer, SpectrumResult, CovarianceVector
from .dressed import DressedStateAnalyzer, DressedBasis
from .variance import VarianceAnalyzer, SqueezingReport

__all__ = [
    'SpectrumAnalyzer',
    'SpectrumResult',
    'CovarianceVector',
    'DressedStateAnalyzer',
    'DressedBasis',
    'VarianceAnalyzer',
    'SqueezingReport'
]
