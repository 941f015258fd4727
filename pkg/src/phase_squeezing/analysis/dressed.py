from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from phase_squeezing.analysis.spectrum import SpectrumResult, ThetaLike, _as_phase
from phase_squeezing.core.liouville import DensityMatrix, LiouvilleSystem, hamiltonian
from phase_squeezing.core.params import SystemParams
from phase_squeezing.errors import DegenerateSpectrum

LABELS = ('alpha', 'beta', 'kappa')
PAIRS: Tuple[Tuple[int, int], ...] = tuple(combinations(range(3), 2))


@dataclass(frozen=True, eq=False)
class DressedBasis:
    """
    Eigenstates of the rotating-frame Hamiltonian, sorted by descending eigenvalue.
    coeffs[j, i] is the amplitude of bare state |j+1> in dressed state i.
    """
    lambdas: np.ndarray
    coeffs: np.ndarray
    gammas: np.ndarray

    def label(self, i: int) -> str:
        return LABELS[i]

    def frequency(self, i: int, j: int) -> float:
        """omega_ij = lambda_i - lambda_j"""
        return float(self.lambdas[i] - self.lambdas[j])

    def column(self, i: int) -> np.ndarray:
        return self.coeffs[:, i]


def _fix_gauge(vector: np.ndarray) -> np.ndarray:
    """Rotate a column so its largest component is real and positive"""
    pivot = vector[np.argmax(np.abs(vector))]
    return vector * (abs(pivot) / pivot)


class DressedStateAnalyzer:
    def __init__(self, config: Optional[Dict] = None):
        self.config = config or self.default_config()
        self.logger = logging.getLogger(__name__)

    def default_config(self) -> Dict:
        return {
            'degeneracy_tol': 1e-9,
            'high_field_ratio': 5.0,
            'norm_floor': 1e-12
        }

    def diagonalize(self, params: SystemParams) -> DressedBasis:
        H = hamiltonian(params)
        values, vectors = np.linalg.eigh(H)
        order = np.argsort(values)[::-1]
        lambdas = values[order]
        gaps = -np.diff(lambdas)
        if np.min(gaps) < self.config['degeneracy_tol']:
            raise DegenerateSpectrum(f"eigenvalue gap {np.min(gaps):.3e} below tolerance")

        coeffs = np.column_stack([_fix_gauge(vectors[:, k]) for k in order])
        gammas = np.zeros((3, 3))
        for i, j in PAIRS:
            gammas[i, j] = gammas[j, i] = self._decay_rate(coeffs, i, j, params)
        return DressedBasis(lambdas=lambdas, coeffs=coeffs, gammas=gammas)

    def closed_form_coefficients(self, params: SystemParams, lambdas: Sequence[float]) -> np.ndarray:
        """Explicit eigenvector for each eigenvalue, normalized column by column"""
        coupling = params.omega3 * np.exp(-1j * params.phi)
        o1, o2, d1 = params.omega1, params.omega2, params.delta1
        columns = []
        for lam in lambdas:
            column = np.array([
                lam * o2 - o1 * coupling,
                o1 ** 2 - lam * (d1 + lam),
                (d1 + lam) * coupling - o1 * o2
            ], dtype=complex)
            norm = np.linalg.norm(column)
            if norm < self.config['norm_floor']:
                raise DegenerateSpectrum(
                    f"closed form vanishes at lambda = {lam:g}", operation='closed_form_coefficients'
                )
            columns.append(column / norm)
        return np.column_stack(columns)

    def _decay_rate(self, coeffs: np.ndarray, i: int, j: int, params: SystemParams) -> float:
        a1i, a2i, a3i = coeffs[:, i]
        a1j, a2j, a3j = coeffs[:, j]
        excited = abs(a1i) ** 2 + abs(a1j) ** 2
        channel1 = excited - 2 * np.real(np.conj(a1i) * a1j * a3i * np.conj(a3j))
        channel2 = excited - 2 * np.real(np.conj(a1i) * a1j * a2i * np.conj(a2j))
        return float(params.gamma1 * channel1 + params.gamma2 * channel2)

    def coherence_decay(self, basis: DressedBasis, i: int, j: int, params: SystemParams) -> float:
        if i == j:
            raise ValueError("coherence decay needs two distinct dressed states")
        return self._decay_rate(basis.coeffs, i, j, params)

    def dressed_populations(self, basis: DressedBasis, rho: DensityMatrix) -> np.ndarray:
        """Diagonal of the steady-state density matrix in the dressed basis"""
        transformed = basis.coeffs.conj().T @ rho.rho @ basis.coeffs
        return np.real(np.diag(transformed)).copy()

    def transition_frequencies(self, basis: DressedBasis) -> Dict[Tuple[int, int], float]:
        return {(i, j): basis.frequency(i, j) for i, j in PAIRS}

    def sideband_widths(self, sys: LiouvilleSystem, basis: DressedBasis) -> Dict[Tuple[int, int], float]:
        """Decay rate of the Liouvillian mode oscillating closest to each omega_ij"""
        eigenvalues = sys.eigenvalues()
        widths = {}
        for (i, j), omega in self.transition_frequencies(basis).items():
            nearest = eigenvalues[np.argmin(np.abs(np.abs(eigenvalues.imag) - omega))]
            widths[(i, j)] = float(-nearest.real)
        return widths

    def high_field(self, params: SystemParams) -> bool:
        rabi = [w for w in (params.omega1, params.omega2, params.omega3) if w > 0]
        if not rabi:
            return False
        return min(rabi) / max(params.gamma1, params.gamma2) > self.config['high_field_ratio']

    def pair_weights(
        self,
        basis: DressedBasis,
        populations: Sequence[float],
        theta: ThetaLike = 0.0
    ) -> Dict[Tuple[int, int], float]:
        """Lorentzian amplitude of each dressed-state pair (both sidebands share it)"""
        factor = _as_phase(theta).factor
        a1, a3 = basis.coeffs[0], basis.coeffs[2]
        weights = {}
        for i, j in PAIRS:
            cross = np.real(factor * a1[i] * np.conj(a3[i]) * a1[j] * np.conj(a3[j]))
            weights[(i, j)] = float(
                abs(a1[i]) ** 2 * abs(a3[j]) ** 2 * populations[i]
                + cross * (populations[i] + populations[j])
                + abs(a3[i]) ** 2 * abs(a1[j]) ** 2 * populations[j]
            )
        return weights

    def lorentzian_spectrum(
        self,
        basis: DressedBasis,
        populations: Sequence[float],
        omega_grid: Sequence[float],
        theta: ThetaLike = 0.0,
        params: Optional[SystemParams] = None
    ) -> SpectrumResult:
        """Sum of sideband Lorentzians at +-omega_ij with widths Gamma_ij"""
        if params is not None and not self.high_field(params):
            self.logger.warning(
                "Rabi frequencies are not well above the decay rates; "
                "the sideband approximation may be poor"
            )
        theta = _as_phase(theta)
        omegas = np.asarray(omega_grid, dtype=float)
        values = np.zeros_like(omegas)
        for (i, j), weight in self.pair_weights(basis, populations, theta).items():
            width = basis.gammas[i, j]
            if width <= 0:
                continue
            center = basis.frequency(i, j)
            for sign in (1, -1):
                values += weight * width / (width ** 2 + (omegas - sign * center) ** 2)
        return SpectrumResult(theta, omegas, values, 0.0, 'dressed')

    def contributing_pairs(self, basis: DressedBasis, omega: float, tol: float = 1e-6) -> List[Tuple[int, int]]:
        """Pairs whose sideband sits at |omega|"""
        return [
            pair for pair, center in self.transition_frequencies(basis).items()
            if abs(center - abs(omega)) <= tol
        ]


_default_analyzer = DressedStateAnalyzer()


def diagonalize(params: SystemParams) -> DressedBasis:
    return _default_analyzer.diagonalize(params)


def closed_form_coefficients(params: SystemParams, lambdas: Sequence[float]) -> np.ndarray:
    return _default_analyzer.closed_form_coefficients(params, lambdas)


def coherence_decay(basis: DressedBasis, i: int, j: int, params: SystemParams) -> float:
    return _default_analyzer.coherence_decay(basis, i, j, params)


def dressed_populations(basis: DressedBasis, rho: DensityMatrix) -> np.ndarray:
    return _default_analyzer.dressed_populations(basis, rho)


def transition_frequencies(basis: DressedBasis) -> Dict[Tuple[int, int], float]:
    return _default_analyzer.transition_frequencies(basis)


def sideband_widths(sys: LiouvilleSystem, basis: DressedBasis) -> Dict[Tuple[int, int], float]:
    return _default_analyzer.sideband_widths(sys, basis)


def lorentzian_spectrum(
    basis: DressedBasis,
    populations: Sequence[float],
    omega_grid: Sequence[float],
    theta: ThetaLike = 0.0,
    params: Optional[SystemParams] = None
) -> SpectrumResult:
    return _default_analyzer.lorentzian_spectrum(basis, populations, omega_grid, theta, params)
