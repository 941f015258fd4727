from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple
import logging

import numpy as np
from scipy import linalg

from phase_squeezing.core.params import SystemParams
from phase_squeezing.errors import (
    NotHermitian,
    SingularLiouvillian,
    StepSizeTooLarge
)

# Component order of the state vector: (rho11, rho22, rho12, rho21, rho13, rho31, rho23, rho32)
RHO11, RHO22, RHO12, RHO21, RHO13, RHO31, RHO23, RHO32 = range(8)
ELEMENTS: Tuple[Tuple[int, int], ...] = (
    (0, 0), (1, 1), (0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)
)
CONJUGATE_PAIRS = ((RHO12, RHO21), (RHO13, RHO31), (RHO23, RHO32))


def hamiltonian(params: SystemParams) -> np.ndarray:
    """Rotating-frame Hamiltonian (hbar = 1) in the bare basis |1>, |2>, |3>"""
    coupling = params.ground_coupling
    return -np.array([
        [params.delta1, params.omega2, params.omega1],
        [params.omega2, params.delta1 - params.delta2, coupling],
        [params.omega1, np.conj(coupling), 0.0]
    ], dtype=complex)


def lindblad_rhs(params: SystemParams, rho: np.ndarray) -> np.ndarray:
    """
    Master-equation right-hand side -i[H, rho] + D[rho] evaluated on a full 3x3 matrix.
    Decay channels |1> -> |3> at 2*gamma1 and |1> -> |2> at 2*gamma2.
    """
    H = hamiltonian(params)
    rho = np.asarray(rho, dtype=complex)
    rho_dot = -1j * (H @ rho - rho @ H)

    excited = rho[0, 0]
    rho_dot[0, 0] -= 2 * params.total_decay * excited
    rho_dot[2, 2] += 2 * params.gamma1 * excited
    rho_dot[1, 1] += 2 * params.gamma2 * excited
    for j in (1, 2):
        rho_dot[0, j] -= params.total_decay * rho[0, j]
        rho_dot[j, 0] -= params.total_decay * rho[j, 0]
    return rho_dot


@dataclass(frozen=True, eq=False)
class StateVector:
    """The eight independent density-matrix elements; rho33 follows from the trace"""
    psi: np.ndarray

    def __post_init__(self):
        psi = np.array(self.psi, dtype=complex).reshape(-1)
        if psi.shape != (8,):
            raise ValueError(f"state vector needs 8 components, got {psi.shape}")
        psi.setflags(write=False)
        object.__setattr__(self, 'psi', psi)

    def __getitem__(self, index: int) -> complex:
        return self.psi[index]

    @property
    def rho11(self) -> float:
        return float(self.psi[RHO11].real)

    @property
    def rho22(self) -> float:
        return float(self.psi[RHO22].real)

    @property
    def rho33(self) -> float:
        return 1.0 - self.rho11 - self.rho22

    @property
    def rho12(self) -> complex:
        return complex(self.psi[RHO12])

    @property
    def rho13(self) -> complex:
        return complex(self.psi[RHO13])

    @property
    def rho23(self) -> complex:
        return complex(self.psi[RHO23])

    def pairing_error(self) -> float:
        """Largest violation of the conjugate pairing and real populations"""
        errors = [abs(self.psi[a] - np.conj(self.psi[b])) for a, b in CONJUGATE_PAIRS]
        errors += [abs(self.psi[RHO11].imag), abs(self.psi[RHO22].imag)]
        return float(max(errors))

    def close_to(self, other: 'StateVector', tol: float) -> bool:
        """Elementwise agreement within tol"""
        return bool(np.max(np.abs(self.psi - other.psi)) <= tol)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Full 3x3 density matrix rebuilt from a StateVector"""
    rho: np.ndarray

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.rho))

    def eigenvalues(self) -> np.ndarray:
        """Real eigenvalues in ascending order"""
        return np.linalg.eigvalsh(self.rho)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    def is_physical(self, tol: float = 1e-10) -> bool:
        """Hermitian, unit trace and positive semidefinite"""
        return (
            self.hermiticity_error() <= tol
            and abs(self.trace - 1.0) <= 1e-12
            and bool(np.min(self.eigenvalues()) >= -tol)
        )


@dataclass(frozen=True, eq=False)
class LiouvilleSystem:
    """dPsi/dt = L Psi + I for fixed parameters"""
    L: np.ndarray
    I: np.ndarray
    params: SystemParams
    _eigenvalues: Optional[np.ndarray] = field(default=None, repr=False)

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of L, computed once per system"""
        if self._eigenvalues is None:
            object.__setattr__(self, '_eigenvalues', np.linalg.eigvals(self.L))
        return self._eigenvalues

    @property
    def spectral_radius(self) -> float:
        """Largest |eigenvalue| of L, which limits the explicit step size"""
        return float(np.max(np.abs(self.eigenvalues())))

    @property
    def slowest_rate(self) -> float:
        """Smallest |Re| over the eigenvalues of L"""
        return float(np.min(np.abs(self.eigenvalues().real)))

    def is_stable(self, margin: float = 0.0) -> bool:
        """Every mode of L decays faster than margin"""
        return bool(np.max(self.eigenvalues().real) < -margin)

    def rhs(self, psi: np.ndarray) -> np.ndarray:
        return self.L @ psi + self.I

    def residual(self, state: StateVector) -> float:
        return float(np.linalg.norm(self.rhs(state.psi)))


class LiouvilleSolver:
    """
    Builds the 8x8 Liouvillian, solves for its steady state and integrates transients.
    Singular or ill-conditioned systems raise SingularLiouvillian rather than
    returning an unreliable state.
    """

    def __init__(self, config: Optional[Dict] = None):
        self.config = config or self.default_config()
        self.logger = logging.getLogger(__name__)

    def default_config(self) -> Dict:
        return {
            'condition_cap': 1e12,
            'dt': 1e-3,
            # RK4 stability region reaches about 2.78 along the negative real axis
            # and 2.83 along the imaginary axis
            'rk4_stability_bound': 2.78,
            'hermitian_tol': 1e-8
        }

    def build_liouvillian(self, params: SystemParams) -> LiouvilleSystem:
        """Transcribe the density-matrix equations with rho33 = 1 - rho11 - rho22 eliminated"""
        g2 = params.gamma2
        gt = params.total_decay
        d1, d2, d3 = params.delta1, params.delta2, params.delta3
        o1, o2 = params.omega1, params.omega2
        e = params.ground_coupling
        ec = np.conj(e)
        i = 1j

        L = np.array([
            # rho11
            [-2 * gt, 0, -i * o2, i * o2, -i * o1, i * o1, 0, 0],
            # rho22
            [2 * g2, 0, i * o2, -i * o2, 0, 0, -i * ec, i * e],
            # rho12
            [-i * o2, i * o2, -(gt - i * d2), 0, -i * ec, 0, 0, i * o1],
            # rho21
            [i * o2, -i * o2, 0, -(gt + i * d2), 0, i * e, -i * o1, 0],
            # rho13
            [-2 * i * o1, -i * o1, -i * e, 0, -(gt - i * d1), 0, i * o2, 0],
            # rho31
            [2 * i * o1, i * o1, 0, i * ec, 0, -(gt + i * d1), 0, -i * o2],
            # rho23
            [-i * e, -2 * i * e, 0, -i * o1, i * o2, 0, i * d3, 0],
            # rho32
            [i * ec, 2 * i * ec, i * o1, 0, 0, -i * o2, 0, -i * d3],
        ], dtype=complex)

        I = np.zeros(8, dtype=complex)
        I[RHO13] = i * o1
        I[RHO31] = -i * o1
        I[RHO23] = i * e
        I[RHO32] = -i * ec
        return LiouvilleSystem(L=L, I=I, params=params)

    def steady_state(self, sys: LiouvilleSystem) -> StateVector:
        """Psi(inf) = -L^-1 I via LU with partial pivoting"""
        condition = np.linalg.cond(sys.L)
        self.logger.debug(f"Liouvillian condition number {condition:.3e}")
        if not np.isfinite(condition) or condition > self.config['condition_cap']:
            raise SingularLiouvillian(
                f"condition number {condition:.3e} exceeds {self.config['condition_cap']:.1e}; "
                "the steady state is not unique"
            )

        lu, piv = linalg.lu_factor(sys.L)
        psi = -linalg.lu_solve((lu, piv), sys.I)
        return StateVector(psi)

    def evolve(
        self,
        sys: LiouvilleSystem,
        psi0: StateVector,
        t_final: float,
        dt: Optional[float] = None,
        method: str = 'rk4'
    ) -> StateVector:
        """
        Transient solution of dPsi/dt = L Psi + I at t_final.
        'rk4' applies the classical fixed-step Runge-Kutta map; for a linear autonomous
        system one step is the matrix polynomial P = sum_k (hA)^k / k!, so the n steps
        are taken as P^n. 'expm' propagates exactly with the matrix exponential.
        """
        if t_final < 0:
            raise ValueError(f"t_final must be non-negative, got {t_final}")
        if t_final == 0:
            return StateVector(psi0.psi.copy())

        # Augmented generator carries the inhomogeneous term as a constant component
        A = np.zeros((9, 9), dtype=complex)
        A[:8, :8] = sys.L
        A[:8, 8] = sys.I
        y0 = np.append(psi0.psi, 1.0)

        if method == 'expm':
            return StateVector((linalg.expm(A * t_final) @ y0)[:8])
        if method != 'rk4':
            raise ValueError(f"unknown integration method {method!r}")

        dt = dt or self.config['dt']
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")
        if dt * sys.spectral_radius > self.config['rk4_stability_bound']:
            raise StepSizeTooLarge(
                f"dt * spectral radius = {dt * sys.spectral_radius:.3f} exceeds "
                f"{self.config['rk4_stability_bound']}"
            )

        steps = int(np.floor(t_final / dt))
        remainder = t_final - steps * dt
        y = np.linalg.matrix_power(self._rk4_step(A, dt), steps) @ y0
        if remainder > 1e-15 * max(1.0, t_final):
            y = self._rk4_step(A, remainder) @ y
        return StateVector(y[:8])

    def _rk4_step(self, A: np.ndarray, h: float) -> np.ndarray:
        """One classical Runge-Kutta step of dy/dt = A y as a matrix"""
        hA = h * A
        step = np.eye(A.shape[0], dtype=complex)
        term = np.eye(A.shape[0], dtype=complex)
        for k in range(1, 5):
            term = term @ hA / k
            step = step + term
        return step

    def to_density_matrix(self, state: StateVector) -> DensityMatrix:
        """
        Rebuild rho from the eight independent elements.
        Off-diagonal pairs are averaged with their conjugates; a pairing error above
        hermitian_tol raises NotHermitian.
        """
        error = state.pairing_error()
        if error > self.config['hermitian_tol']:
            raise NotHermitian(f"conjugate pairing violated by {error:.3e}")

        psi = state.psi
        rho = np.zeros((3, 3), dtype=complex)
        rho[0, 0] = psi[RHO11].real
        rho[1, 1] = psi[RHO22].real
        rho[2, 2] = 1.0 - rho[0, 0].real - rho[1, 1].real
        for a, b in CONJUGATE_PAIRS:
            i, j = ELEMENTS[a]
            value = 0.5 * (psi[a] + np.conj(psi[b]))
            rho[i, j] = value
            rho[j, i] = np.conj(value)
        return DensityMatrix(rho)


def from_density_matrix(rho: np.ndarray) -> StateVector:
    """Pick the eight independent elements out of a 3x3 density matrix"""
    rho = np.asarray(rho, dtype=complex)
    return StateVector([rho[i, j] for i, j in ELEMENTS])


_default_solver = LiouvilleSolver()


def build_liouvillian(params: SystemParams) -> LiouvilleSystem:
    return _default_solver.build_liouvillian(params)


def steady_state(sys: LiouvilleSystem) -> StateVector:
    return _default_solver.steady_state(sys)


def evolve(
    sys: LiouvilleSystem,
    psi0: StateVector,
    t_final: float,
    dt: Optional[float] = None,
    method: str = 'rk4'
) -> StateVector:
    return _default_solver.evolve(sys, psi0, t_final, dt, method)


def to_density_matrix(state: StateVector) -> DensityMatrix:
    return _default_solver.to_density_matrix(state)


def residual(sys: LiouvilleSystem, state: StateVector) -> float:
    """||L Psi + I||, zero at the steady state"""
    return sys.residual(state)


def relaxation_rates(sys: LiouvilleSystem) -> Dict[str, float]:
    """Slowest and fastest decay rates and the spectral radius of L"""
    eigenvalues = sys.eigenvalues()
    return {
        'slowest': sys.slowest_rate,
        'fastest': float(np.max(np.abs(eigenvalues.real))),
        'spectral_radius': sys.spectral_radius
    }
