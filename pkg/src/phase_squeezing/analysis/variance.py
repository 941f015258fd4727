from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
from scipy import optimize

from phase_squeezing.core.liouville import LiouvilleSolver, RHO31, StateVector
from phase_squeezing.core.params import QuadraturePhase, SystemParams
from phase_squeezing.errors import OutsideAnalyticRegime
from phase_squeezing.experiments.sweep import GridRunner


@dataclass(frozen=True)
class SqueezingReport:
    """
    Phase-optimized normally ordered variance F in units of |mu13|^2 f(r)^2.
    F < 0 means the fluorescence is squeezed in total variance.
    """
    f_numeric: float
    theta_opt: float
    rho11: float
    rho13_abs: float
    phi31: float
    f_analytic: Optional[float] = None

    @property
    def squeezed(self) -> bool:
        return self.f_numeric < 0


class VarianceAnalyzer:
    """Steady-state squeezing parameter F, its closed form, and scans over omega3 and phi"""

    def __init__(self, config: Optional[Dict] = None, solver: Optional[LiouvilleSolver] = None):
        self.config = config or self.default_config()
        self.solver = solver or LiouvilleSolver()
        self.logger = logging.getLogger(__name__)

    def default_config(self) -> Dict:
        return {
            'grid_step': 0.05,
            'refine_tol': 1e-6,
            'regime_tol': 1e-12
        }

    def steady_state(self, params: SystemParams) -> StateVector:
        """Steady state of the Liouvillian built from params"""
        return self.solver.steady_state(self.solver.build_liouvillian(params))

    def quadrature_variance(self, psi_ss: StateVector, theta: float) -> float:
        """2 rho11 - 4 |rho13|^2 cos^2(theta - phi31) at the steady state"""
        phi31 = float(np.angle(psi_ss[RHO31]))
        theta = QuadraturePhase(theta).theta
        return 2 * psi_ss.rho11 - 4 * abs(psi_ss.rho13) ** 2 * math.cos(theta - phi31) ** 2

    def squeezing_parameter(
        self,
        psi_ss: StateVector,
        params: Optional[SystemParams] = None
    ) -> SqueezingReport:
        """
        F = 2 rho11 - 4 |rho13|^2, the variance at the optimal quadrature theta = phi31 mod pi.
        When params are given and lie in the resonant regime, the closed form is attached too.
        """
        rho13_abs = abs(psi_ss.rho13)
        phi31 = float(np.angle(psi_ss[RHO31]))
        f_analytic = None
        if params is not None and self.in_analytic_regime(params):
            f_analytic = self.squeezing_parameter_analytic(params)

        return SqueezingReport(
            f_numeric=2 * psi_ss.rho11 - 4 * rho13_abs ** 2,
            theta_opt=phi31 % math.pi,
            rho11=psi_ss.rho11,
            rho13_abs=rho13_abs,
            phi31=phi31,
            f_analytic=f_analytic
        )

    def in_analytic_regime(self, params: SystemParams) -> bool:
        """delta1 = delta2 = 0 and omega1 = omega2, within regime_tol"""
        tol = self.config['regime_tol']
        scale = max(1.0, params.omega1, params.omega2)
        return (
            abs(params.delta1) <= tol
            and abs(params.delta2) <= tol
            and abs(params.omega1 - params.omega2) <= tol * scale
        )

    def squeezing_parameter_analytic(self, params: SystemParams) -> float:
        """Closed form of F for resonant fields with Omega1 = Omega2"""
        if not self.in_analytic_regime(params):
            raise OutsideAnalyticRegime(
                "closed form needs delta1 = delta2 = 0 and omega1 = omega2, got "
                f"delta1={params.delta1:g}, delta2={params.delta2:g}, "
                f"omega1={params.omega1:g}, omega2={params.omega2:g}"
            )

        w2 = params.omega1 ** 2
        w3 = params.omega3
        s = math.sin(params.phi)
        c2 = math.cos(2 * params.phi)
        g1, gt = params.gamma1, params.total_decay
        gd = params.gamma1 - params.gamma2

        prefactor = 4 * w2 * w3 ** 2 * s ** 2
        if prefactor == 0:
            return 0.0

        G = w2 ** 2 + w3 ** 4 + w3 ** 2 * (gt ** 2 + w2)
        H = 2 * w3 * s * (gt * w3 ** 2 - 2 * g1 * w2) + 3 * w2 * w3 ** 2 * c2
        M = (
            2 * w2 ** 2 - w2 * w3 ** 2 + 2 * w3 ** 2 * (gt ** 2 + w3 ** 2)
            + w2 * w3 * (2 * gd * s - 3 * w3 * c2)
        )
        if M == 0:
            raise OutsideAnalyticRegime("denominator of the closed form vanishes")
        return prefactor * (G - H) / M ** 2

    def variance_regime_warning(self, params: SystemParams) -> bool:
        """Total-variance squeezing needs the detected transition to decay faster"""
        if params.gamma1 <= params.gamma2:
            self.logger.warning(
                f"gamma1 = {params.gamma1:g} <= gamma2 = {params.gamma2:g}: "
                "no total-variance squeezing expected"
            )
            return True
        return False

    def f_at(self, params: SystemParams) -> float:
        return self.squeezing_parameter(self.steady_state(params)).f_numeric

    def minimize_over_omega3(
        self,
        params: SystemParams,
        omega3_range: Tuple[float, float]
    ) -> Tuple[float, float, Dict[str, float]]:
        """
        Grid scan then bounded refinement of F(omega3) at fixed phase.
        The refinement is confined to the two grid cells around the best grid point.
        Returns (omega3_star, F_min, diagnostics at omega3_star).
        """
        low, high = float(omega3_range[0]), float(omega3_range[1])
        if low < 0 or high <= low:
            raise ValueError(f"omega3 range must be non-negative and increasing, got {omega3_range}")
        self.variance_regime_warning(params)

        points = int(math.ceil((high - low) / self.config['grid_step'])) + 1
        grid = np.linspace(low, high, points)

        def objective(omega3: float) -> float:
            return self.f_at(params.with_(omega3=float(omega3)))

        values = np.array([objective(w) for w in grid])
        best = int(np.argmin(values))
        omega3_star, f_min = float(grid[best]), float(values[best])

        interior = 0 < best < points - 1
        if interior and values[best] < values[best - 1] and values[best] < values[best + 1]:
            refined = optimize.minimize_scalar(
                objective,
                bounds=(grid[best - 1], grid[best + 1]),
                method='bounded',
                options={'xatol': self.config['refine_tol']}
            )
            if refined.fun <= f_min:
                omega3_star, f_min = float(refined.x), float(refined.fun)
        elif not interior:
            self.logger.warning(f"F has no interior minimum on [{low:g}, {high:g}]; returning boundary point")

        psi = self.steady_state(params.with_(omega3=omega3_star))
        diagnostics = {
            'rho11': psi.rho11,
            'rho22': psi.rho22,
            'abs_rho12': abs(psi.rho12),
            'abs_rho13': abs(psi.rho13)
        }
        return omega3_star, f_min, diagnostics

    def sweep_phase(
        self,
        params: SystemParams,
        phi_grid: Sequence[float],
        runner: Optional[GridRunner] = None
    ) -> List[Tuple[float, float]]:
        """(phi, F) over a phase grid in (-pi, pi]; failed points are left out"""
        phis = [float(phi) for phi in phi_grid]
        outside = [phi for phi in phis if not -math.pi - 1e-12 < phi <= math.pi + 1e-12]
        if outside:
            raise ValueError(f"phase grid must lie in (-pi, pi], got {outside[0]}")
        runner = runner or GridRunner()

        outcome = runner.run(lambda phi: self.f_at(params.with_(phi=phi)), phis)
        if outcome.failures:
            self.logger.warning(f"Phase sweep dropped {len(outcome.failures)} of {len(phis)} points")
        return outcome.completed(phis)

    def sweep_omega3(
        self,
        params: SystemParams,
        omega3_grid: Sequence[float],
        runner: Optional[GridRunner] = None
    ) -> List[Dict[str, float]]:
        """F with the populations and coherences behind it at each omega3"""
        runner = runner or GridRunner()

        def row(omega3: float) -> Dict[str, float]:
            psi = self.steady_state(params.with_(omega3=float(omega3)))
            return {
                'omega3': float(omega3),
                'F': self.squeezing_parameter(psi).f_numeric,
                'rho11': psi.rho11,
                'rho22': psi.rho22,
                'abs_rho12': abs(psi.rho12),
                'abs_rho13': abs(psi.rho13)
            }

        grid = list(omega3_grid)
        outcome = runner.run(row, grid)
        if outcome.failures:
            self.logger.warning(f"omega3 sweep dropped {len(outcome.failures)} of {len(grid)} points")
        return [result for _, result in outcome.completed(grid)]


_default_analyzer = VarianceAnalyzer()


def quadrature_variance(psi_ss: StateVector, theta: float) -> float:
    return _default_analyzer.quadrature_variance(psi_ss, theta)


normally_ordered_variance = quadrature_variance


def squeezing_parameter(psi_ss: StateVector, params: Optional[SystemParams] = None) -> SqueezingReport:
    return _default_analyzer.squeezing_parameter(psi_ss, params)


def squeezing_parameter_analytic(params: SystemParams) -> float:
    return _default_analyzer.squeezing_parameter_analytic(params)


def minimize_over_omega3(
    params: SystemParams,
    omega3_range: Tuple[float, float]
) -> Tuple[float, float, Dict[str, float]]:
    return _default_analyzer.minimize_over_omega3(params, omega3_range)


def sweep_phase(params: SystemParams, phi_grid: Sequence[float]) -> List[Tuple[float, float]]:
    return _default_analyzer.sweep_phase(params, phi_grid)


def sweep_omega3(params: SystemParams, omega3_grid: Sequence[float]) -> List[Dict[str, float]]:
    return _default_analyzer.sweep_omega3(params, omega3_grid)


def variance_regime_warning(params: SystemParams) -> bool:
    return _default_analyzer.variance_regime_warning(params)
