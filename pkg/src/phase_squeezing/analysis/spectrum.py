from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Union
import logging

import numpy as np
from scipy import integrate, linalg

from phase_squeezing.core.liouville import (
    RHO11,
    RHO12,
    RHO13,
    RHO31,
    RHO32,
    LiouvilleSystem,
    StateVector,
    hamiltonian
)
from phase_squeezing.core.params import QuadraturePhase
from phase_squeezing.errors import HorizonTooShort, ResolventSingular

# Rows of the resolvent that feed the spectrum: <dA31(tau) dA31> and <dA13(tau) dA31>
ANOMALOUS_ROW = RHO13
NORMAL_ROW = RHO31

ThetaLike = Union[QuadraturePhase, float]


def _as_phase(theta: ThetaLike) -> QuadraturePhase:
    return theta if isinstance(theta, QuadraturePhase) else QuadraturePhase(theta)


@dataclass(frozen=True, eq=False)
class CovarianceVector:
    """
    Equal-time steady-state covariances <dX dA31> for X in
    (A11, A22, A21, A12, A31, A13, A32, A23), i.e. the state-vector order.
    """
    u: np.ndarray

    def variance(self, theta: ThetaLike) -> float:
        """Normally ordered quadrature variance recovered from the covariances"""
        factor = _as_phase(theta).factor
        return float(2 * np.real(factor * self.u[ANOMALOUS_ROW] + self.u[NORMAL_ROW]))


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """S(omega, theta) samples in units of |mu13|^2 f(r)^2 / (pi gamma2)"""
    theta: QuadraturePhase
    omegas: np.ndarray
    values: np.ndarray
    imag_residue: float = 0.0
    method: str = 'resolvent'

    def __post_init__(self):
        if np.any(np.diff(self.omegas) <= 0):
            raise ValueError("omega grid must be strictly increasing")

    def window(self, low: float, high: float) -> np.ndarray:
        mask = (self.omegas >= low) & (self.omegas <= high)
        return self.values[mask]

    def local_maxima(self, magnitude: bool = False) -> np.ndarray:
        """Frequencies of strict interior local maxima of S (or |S|)"""
        data = np.abs(self.values) if magnitude else self.values
        inner = (data[1:-1] > data[:-2]) & (data[1:-1] > data[2:])
        return self.omegas[1:-1][inner]

    def local_minima(self) -> np.ndarray:
        data = self.values
        inner = (data[1:-1] < data[:-2]) & (data[1:-1] < data[2:])
        return self.omegas[1:-1][inner]


class SpectrumAnalyzer:
    def __init__(self, config: Optional[Dict] = None):
        self.config = config or self.default_config()
        self.logger = logging.getLogger(__name__)

    def default_config(self) -> Dict:
        return {
            'grid_points': 2001,
            'grid_span': 1.5,
            'condition_cap': 1e12,
            'chunk_size': 2048,
            'oracle_dtau': 0.005,
            'horizon_factor': 25.0,
            'decay_tol': 1e-8,
            'oracle_block': 512,
            'oracle_chunk': 16,
            'sum_rule_span': 20.0,
            'sum_rule_step': 0.05,
            'imag_warning': 1e-10
        }

    def default_grid(self, sys: LiouvilleSystem) -> np.ndarray:
        """Uniform grid over +-1.5 times the widest dressed-state splitting"""
        levels = np.linalg.eigvalsh(hamiltonian(sys.params))
        widest = float(levels.max() - levels.min())
        half_width = self.config['grid_span'] * max(widest, 10.0)
        return np.linspace(-half_width, half_width, self.config['grid_points'])

    def equal_time_covariances(self, psi_ss: StateVector) -> CovarianceVector:
        """
        <A_ij A31> = delta_j3 <A_i1>, so only A13 (-> rho11) and A23 (-> rho12)
        keep a product term; every component subtracts <A_ij><A31>.
        """
        psi = psi_ss.psi
        mean31 = psi[RHO13]
        u = -psi * mean31
        u[NORMAL_ROW] += psi[RHO11]
        u[RHO32] += psi[RHO12]
        return CovarianceVector(u)

    def resolvent(self, sys: LiouvilleSystem, omega: float) -> np.ndarray:
        """M(omega) = (i omega - L)^-1 + (-i omega - L)^-1"""
        identity = np.eye(8, dtype=complex)
        total = np.zeros((8, 8), dtype=complex)
        for sign in (1, -1):
            factor = sign * 1j * omega * identity - sys.L
            condition = np.linalg.cond(factor)
            if not np.isfinite(condition) or condition > self.config['condition_cap']:
                raise ResolventSingular(
                    f"(±i omega - L) at omega = {omega:g} has condition number {condition:.3e}"
                )
            total += linalg.solve(factor, identity)
        return total

    def _assembled(
        self,
        sys: LiouvilleSystem,
        cov: CovarianceVector,
        theta: QuadraturePhase,
        omegas: np.ndarray
    ) -> np.ndarray:
        """Complex sum over k of M_5k U_k exp(2i theta) + M_6k U_k on a grid"""
        if not sys.is_stable():
            raise ResolventSingular("Liouvillian is not strictly stable", operation='squeezing_spectrum')

        chunk = self.config['chunk_size']
        identity = np.eye(8, dtype=complex)
        rhs = cov.u[:, None]
        out = np.empty(len(omegas), dtype=complex)
        for start in range(0, len(omegas), chunk):
            block = omegas[start:start + chunk]
            shift = 1j * block[:, None, None] * identity
            response = (
                np.linalg.solve(shift - sys.L, np.broadcast_to(rhs, (len(block), 8, 1)))
                + np.linalg.solve(-shift - sys.L, np.broadcast_to(rhs, (len(block), 8, 1)))
            )[..., 0]
            out[start:start + chunk] = (
                theta.factor * response[:, ANOMALOUS_ROW] + response[:, NORMAL_ROW]
            )
        if not np.all(np.isfinite(out)):
            raise ResolventSingular("non-finite resolvent response", operation='squeezing_spectrum')
        return out

    def squeezing_spectrum(
        self,
        sys: LiouvilleSystem,
        psi_ss: StateVector,
        theta: ThetaLike = 0.0,
        omega_grid: Optional[Sequence[float]] = None
    ) -> SpectrumResult:
        theta = _as_phase(theta)
        omegas = self.default_grid(sys) if omega_grid is None else np.asarray(omega_grid, dtype=float)
        cov = self.equal_time_covariances(psi_ss)
        assembled = self._assembled(sys, cov, theta, omegas)

        residue = float(np.max(np.abs(assembled.imag))) if len(assembled) else 0.0
        if residue > self.config['imag_warning']:
            self.logger.debug(f"Imaginary residue of spectral assembly: {residue:.3e}")
        return SpectrumResult(theta, omegas, assembled.real.copy(), residue, 'resolvent')

    def correlation_horizon(self, sys: LiouvilleSystem) -> float:
        rate = sys.slowest_rate
        if rate <= 0:
            raise HorizonTooShort("Liouvillian has a non-decaying mode")
        return self.config['horizon_factor'] / rate

    def time_domain_spectrum_oracle(
        self,
        sys: LiouvilleSystem,
        psi_ss: StateVector,
        theta: ThetaLike = 0.0,
        omega_grid: Optional[Sequence[float]] = None,
        horizon: Optional[float] = None
    ) -> SpectrumResult:
        """
        Propagate dU/dtau = L U from the equal-time covariances and Fourier-integrate
        2 cos(omega tau) [exp(2i theta) U_5 + U_6] over tau >= 0 with the trapezoidal
        rule plus its first endpoint correction h^2/12 f'(0).
        """
        theta = _as_phase(theta)
        omegas = self.default_grid(sys) if omega_grid is None else np.asarray(omega_grid, dtype=float)
        cov = self.equal_time_covariances(psi_ss)

        dtau = self.config['oracle_dtau']
        horizon = horizon if horizon is not None else self.correlation_horizon(sys)
        steps = int(np.ceil(horizon / dtau))
        self.logger.debug(f"Oracle horizon {horizon:.2f} in {steps} steps")

        trace, tail = self._propagate(sys, cov.u, theta, dtau, steps)
        if np.linalg.norm(tail) > self.config['decay_tol']:
            raise HorizonTooShort(
                f"correlations still {np.linalg.norm(tail):.2e} at tau = {steps * dtau:.2f}"
            )

        taus = dtau * np.arange(steps + 1)
        weights = np.full(steps + 1, dtau)
        weights[0] = weights[-1] = dtau / 2
        weighted = weights * trace

        derivative = sys.L @ cov.u
        correction = dtau ** 2 / 12 * 2 * (
            theta.factor * derivative[ANOMALOUS_ROW] + derivative[NORMAL_ROW]
        )

        chunk = self.config['oracle_chunk']
        out = np.empty(len(omegas), dtype=complex)
        for start in range(0, len(omegas), chunk):
            block = omegas[start:start + chunk]
            kernel = 2 * np.cos(np.outer(block, taus))
            out[start:start + chunk] = kernel @ weighted + correction

        residue = float(np.max(np.abs(out.imag))) if len(out) else 0.0
        return SpectrumResult(theta, omegas, out.real.copy(), residue, 'time_domain')

    def _propagate(
        self,
        sys: LiouvilleSystem,
        u0: np.ndarray,
        theta: QuadraturePhase,
        dtau: float,
        steps: int
    ):
        """Sample exp(2i theta) U_5(tau) + U_6(tau) on tau = n dtau, n = 0..steps"""
        block = self.config['oracle_block']
        step = linalg.expm(sys.L * dtau)
        powers = np.empty((block, 8, 8), dtype=complex)
        powers[0] = np.eye(8)
        for k in range(1, block):
            powers[k] = step @ powers[k - 1]
        jump = step @ powers[-1]

        trace = np.empty(steps + 1, dtype=complex)
        u = u0.astype(complex)
        for start in range(0, steps + 1, block):
            count = min(block, steps + 1 - start)
            samples = powers[:count] @ u
            trace[start:start + count] = (
                theta.factor * samples[:, ANOMALOUS_ROW] + samples[:, NORMAL_ROW]
            )
            last = samples[count - 1]
            u = jump @ u
        return trace, last

    def integrated_spectrum(
        self,
        sys: LiouvilleSystem,
        psi_ss: StateVector,
        theta: ThetaLike = 0.0
    ) -> float:
        """
        Integral of S over the real line. S decays as K / omega^2 with
        K = Re[-2 (exp(2i theta) (L U)_5 + (L U)_6)], which closes the tails analytically.
        With S in units of |mu13|^2 f(r)^2 / (pi gamma2) the integral equals pi times the
        normally ordered variance.
        """
        theta = _as_phase(theta)
        cov = self.equal_time_covariances(psi_ss)
        half_width = self.config['sum_rule_span'] * max(sys.spectral_radius, 1.0)
        spacing = min(self.config['sum_rule_step'], sys.slowest_rate / 4)
        points = 2 * int(np.ceil(half_width / spacing)) + 1
        omegas = np.linspace(-half_width, half_width, points)
        self.logger.debug(f"Sum rule over {points} points, half width {half_width:.1f}")

        values = self._assembled(sys, cov, theta, omegas).real
        body = integrate.trapezoid(values, omegas)

        derivative = sys.L @ cov.u
        asymptote = np.real(-2 * (theta.factor * derivative[ANOMALOUS_ROW] + derivative[NORMAL_ROW]))
        return float(body + 2 * asymptote / half_width)


_default_analyzer = SpectrumAnalyzer()


def equal_time_covariances(psi_ss: StateVector) -> CovarianceVector:
    return _default_analyzer.equal_time_covariances(psi_ss)


def resolvent(sys: LiouvilleSystem, omega: float) -> np.ndarray:
    return _default_analyzer.resolvent(sys, omega)


def squeezing_spectrum(
    sys: LiouvilleSystem,
    psi_ss: StateVector,
    theta: ThetaLike = 0.0,
    omega_grid: Optional[Sequence[float]] = None
) -> SpectrumResult:
    return _default_analyzer.squeezing_spectrum(sys, psi_ss, theta, omega_grid)


def time_domain_spectrum_oracle(
    sys: LiouvilleSystem,
    psi_ss: StateVector,
    theta: ThetaLike = 0.0,
    omega_grid: Optional[Sequence[float]] = None
) -> SpectrumResult:
    return _default_analyzer.time_domain_spectrum_oracle(sys, psi_ss, theta, omega_grid)


def integrated_spectrum(sys: LiouvilleSystem, psi_ss: StateVector, theta: ThetaLike = 0.0) -> float:
    return _default_analyzer.integrated_spectrum(sys, psi_ss, theta)


def spectral_extrema(result: SpectrumResult) -> Dict[str, np.ndarray]:
    """Peak and dip frequencies of S, plus the peaks of |S| used to locate sidebands"""
    return {
        'maxima': result.local_maxima(),
        'minima': result.local_minima(),
        'magnitude_maxima': result.local_maxima(magnitude=True)
    }


def default_grid(sys: LiouvilleSystem) -> np.ndarray:
    return _default_analyzer.default_grid(sys)
