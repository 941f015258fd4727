from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np

from phase_squeezing.analysis.dressed import LABELS, DressedStateAnalyzer
from phase_squeezing.analysis.spectrum import SpectrumAnalyzer
from phase_squeezing.analysis.variance import VarianceAnalyzer
from phase_squeezing.core.liouville import LiouvilleSolver
from phase_squeezing.core.params import SystemParams, make_params
from phase_squeezing.experiments.sweep import GridRunner

GridSpec = Tuple[float, float, int]

FIG2_PARAMS = {
    'gamma1': 0.1, 'gamma2': 1.0,
    'delta1': 15.0, 'delta2': -15.0,
    'omega1': 30.0, 'omega2': 30.0
}
FIG3_PARAMS = {
    'gamma1': 20.0, 'gamma2': 1.0,
    'delta1': 0.0, 'delta2': 0.0,
    'omega1': 8.0, 'omega2': 8.0
}


@dataclass(frozen=True)
class Preset:
    """Parameter set and grid behind one figure"""
    name: str
    kind: str
    description: str
    params: Dict[str, float]
    grid: GridSpec
    series: Tuple[Tuple[str, Dict[str, float]], ...] = ()

    def system_params(self, **changes) -> SystemParams:
        """Validated parameters with the given fields overridden"""
        values = dict(self.params)
        values.update(changes)
        return make_params(**values)

    def grid_points(self) -> np.ndarray:
        low, high, points = self.grid
        return np.linspace(low, high, int(points))


PRESETS: Dict[str, Preset] = {
    'fig2a': Preset(
        name='fig2a',
        kind='spectrum',
        description='Squeezing spectrum at theta = 0, Phi = 0, with and without the ground-state field',
        params={**FIG2_PARAMS, 'phi': 0.0},
        grid=(-120.0, 120.0, 2001),
        series=(('S_omega3_10', {'omega3': 10.0}), ('S_omega3_0', {'omega3': 0.0}))
    ),
    'fig2b': Preset(
        name='fig2b',
        kind='spectrum',
        description='Squeezing spectrum at theta = 0, Phi = pi, with and without the ground-state field',
        params={**FIG2_PARAMS, 'phi': math.pi},
        grid=(-120.0, 120.0, 2001),
        series=(('S_omega3_10', {'omega3': 10.0}), ('S_omega3_0', {'omega3': 0.0}))
    ),
    'fig3': Preset(
        name='fig3',
        kind='omega3_phases',
        description='Squeezing parameter F versus omega3 for Phi = -pi/2 and Phi = pi/2',
        params={**FIG3_PARAMS},
        grid=(0.0, 10.0, 201),
        series=(('-pi/2', {'phi': -math.pi / 2}), ('pi/2', {'phi': math.pi / 2}))
    ),
    'fig4': Preset(
        name='fig4',
        kind='populations',
        description='Steady-state populations and coherences versus omega3 at Phi = -pi/2',
        params={**FIG3_PARAMS, 'phi': -math.pi / 2},
        grid=(0.0, 10.0, 201)
    ),
    'fig5': Preset(
        name='fig5',
        kind='phase',
        description='Squeezing parameter F versus the relative phase at omega3 = 3',
        params={**FIG3_PARAMS, 'omega3': 3.0},
        # Phi = -pi + k pi / 180 for k = 1..360
        grid=(-math.pi + math.pi / 180, math.pi, 360)
    )
}


@dataclass
class Table:
    """Rows destined for one CSV file"""
    header: Tuple[str, ...]
    rows: List[Sequence]
    text_columns: int = 0
    suffix: str = ''

    def column(self, name: str) -> np.ndarray:
        index = self.header.index(name)
        return np.array([row[index] for row in self.rows], dtype=float)


@dataclass
class ExperimentResult:
    tables: List[Table]
    params: Optional[SystemParams] = None
    extra_params: List[SystemParams] = field(default_factory=list)


class ExperimentRunner:
    """Turns a run mode plus parameters into tables, one per output file"""

    def __init__(self, config: Optional[Dict] = None):
        self.config = config or self.default_config()
        self.logger = logging.getLogger(__name__)
        self.solver = LiouvilleSolver()
        self.spectra = SpectrumAnalyzer()
        self.dressed = DressedStateAnalyzer()
        self.variance = VarianceAnalyzer(solver=self.solver)
        self.runner = GridRunner({'workers': self.config['workers'], 'fail_fast': True})

    def default_config(self) -> Dict:
        return {
            'workers': 1
        }

    def _omega_grid(self, grid: Optional[GridSpec], params: SystemParams) -> np.ndarray:
        if grid is None:
            return self.spectra.default_grid(self.solver.build_liouvillian(params))
        return np.linspace(grid[0], grid[1], int(grid[2]))

    def spectrum(
        self,
        params: SystemParams,
        theta: float,
        grid: Optional[GridSpec],
        oracle: bool = False
    ) -> ExperimentResult:
        """S(omega) at quadrature theta, from the resolvent or the time-domain oracle"""
        sys = self.solver.build_liouvillian(params)
        psi = self.solver.steady_state(sys)
        omegas = self._omega_grid(grid, params)
        if oracle:
            result = self.spectra.time_domain_spectrum_oracle(sys, psi, theta, omegas)
        else:
            result = self.spectra.squeezing_spectrum(sys, psi, theta, omegas)
        rows = [list(pair) for pair in zip(result.omegas, result.values)]
        return ExperimentResult([Table(('omega', 'S'), rows)], params)

    def dressed_states(self, params: SystemParams) -> ExperimentResult:
        """
        Two tables: each dressed state with its coefficients and population, and each
        pair with its transition frequency, analytic width and the nearest Liouvillian decay rate.
        """
        sys = self.solver.build_liouvillian(params)
        rho = self.solver.to_density_matrix(self.solver.steady_state(sys))
        basis = self.dressed.diagonalize(params)
        populations = self.dressed.dressed_populations(basis, rho)
        if not self.dressed.high_field(params):
            self.logger.warning("Dressed-state sidebands are not resolved at these Rabi frequencies")

        states = []
        for i, label in enumerate(LABELS):
            a = basis.column(i)
            states.append([
                label, basis.lambdas[i],
                a[0].real, a[0].imag, a[1].real, a[1].imag, a[2].real, a[2].imag,
                populations[i]
            ])
        state_table = Table(
            ('state', 'lambda', 're_a1', 'im_a1', 're_a2', 'im_a2', 're_a3', 'im_a3', 'population'),
            states,
            text_columns=1
        )

        widths = self.dressed.sideband_widths(sys, basis)
        pairs = []
        for (i, j), omega in self.dressed.transition_frequencies(basis).items():
            pairs.append([f"{LABELS[i]}-{LABELS[j]}", omega, basis.gammas[i, j], widths[(i, j)]])
        pair_table = Table(('pair', 'omega_ij', 'gamma_ij', 'width_numeric'), pairs, 1, '_pairs')
        return ExperimentResult([state_table, pair_table], params)

    def squeezing(self, params: SystemParams) -> ExperimentResult:
        """Single-row table of F, its closed form (nan outside the resonant regime) and the optimal quadrature"""
        self.variance.variance_regime_warning(params)
        psi = self.variance.steady_state(params)
        report = self.variance.squeezing_parameter(psi, params)
        analytic = report.f_analytic if report.f_analytic is not None else float('nan')
        row = [report.f_numeric, analytic, report.theta_opt, report.rho11, report.rho13_abs, report.phi31]
        header = ('F', 'F_analytic', 'theta_opt', 'rho11', 'rho13_abs', 'phi31')
        return ExperimentResult([Table(header, [row])], params)

    def omega3_sweep(self, params: SystemParams, grid: GridSpec) -> ExperimentResult:
        omega3s = np.linspace(grid[0], grid[1], int(grid[2]))
        header = ('omega3', 'F', 'rho11', 'rho22', 'abs_rho12', 'abs_rho13')
        records = self.variance.sweep_omega3(params, omega3s, self.runner)
        rows = [[record[key] for key in header] for record in records]
        return ExperimentResult([Table(header, rows)], params)

    def phi_sweep(self, params: SystemParams, grid: GridSpec) -> ExperimentResult:
        phis = np.linspace(grid[0], grid[1], int(grid[2]))
        rows = [list(pair) for pair in self.variance.sweep_phase(params, phis, self.runner)]
        return ExperimentResult([Table(('phi', 'F'), rows)], params)

    def preset(self, name: str) -> ExperimentResult:
        """Reproduce the table behind one named figure"""
        preset = PRESETS[name]
        self.logger.info(f"Running preset {name}: {preset.description}")
        grid = preset.grid_points()

        if preset.kind == 'spectrum':
            columns, used = [grid], []
            for _, changes in preset.series:
                params = preset.system_params(**changes)
                sys = self.solver.build_liouvillian(params)
                psi = self.solver.steady_state(sys)
                columns.append(self.spectra.squeezing_spectrum(sys, psi, 0.0, grid).values)
                used.append(params)
            header = ('omega',) + tuple(label for label, _ in preset.series)
            rows = [list(row) for row in zip(*columns)]
            return ExperimentResult([Table(header, rows)], used[0], used[1:])

        if preset.kind == 'omega3_phases':
            rows, used = [], []
            for _, changes in preset.series:
                params = preset.system_params(**changes)
                for record in self.variance.sweep_omega3(params, grid, self.runner):
                    rows.append([params.phi, record['omega3'], record['F']])
                used.append(params)
            return ExperimentResult([Table(('phi', 'omega3', 'F'), rows)], used[0], used[1:])

        if preset.kind == 'populations':
            params = preset.system_params()
            header = ('omega3', 'rho11', 'rho22', 'abs_rho12', 'abs_rho13')
            records = self.variance.sweep_omega3(params, grid, self.runner)
            rows = [[record[key] for key in header] for record in records]
            return ExperimentResult([Table(header, rows)], params)

        params = preset.system_params()
        rows = [list(pair) for pair in self.variance.sweep_phase(params, grid, self.runner)]
        return ExperimentResult([Table(('phi', 'F'), rows)], params)
