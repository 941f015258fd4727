# tests/test_liouville.py

import math
import unittest

import numpy as np

from phase_squeezing.core.liouville import (
    ELEMENTS,
    RHO11,
    RHO13,
    RHO23,
    RHO31,
    RHO32,
    LiouvilleSolver,
    StateVector,
    from_density_matrix,
    lindblad_rhs,
    relaxation_rates,
    residual
)
from phase_squeezing.core.params import make_params
from phase_squeezing.errors import NotHermitian, SingularLiouvillian, StepSizeTooLarge
from phase_squeezing.experiments.presets import FIG2_PARAMS, FIG3_PARAMS


def random_params(rng: np.random.Generator):
    return make_params(
        gamma1=rng.uniform(0.1, 20.0),
        delta1=rng.uniform(-20.0, 20.0),
        delta2=rng.uniform(-20.0, 20.0),
        omega1=rng.uniform(0.5, 30.0),
        omega2=rng.uniform(0.5, 30.0),
        omega3=rng.uniform(0.5, 15.0),
        phi=rng.uniform(-math.pi, math.pi)
    )


def random_density_matrix(rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


class TestBuildLiouvillian(unittest.TestCase):
    def setUp(self):
        self.solver = LiouvilleSolver()
        self.params = make_params(**FIG2_PARAMS, omega3=10.0, phi=0.3)
        self.sys = self.solver.build_liouvillian(self.params)

    def test_excited_population_decay(self):
        self.assertEqual(self.sys.L[0, 0], -2 * (self.params.gamma1 + self.params.gamma2))

    def test_drive_vector(self):
        I = self.sys.I
        self.assertEqual(I[0], 0)
        self.assertEqual(I[3], 0)
        self.assertAlmostEqual(I[RHO13], 1j * self.params.omega1)
        self.assertAlmostEqual(I[RHO31], -1j * self.params.omega1)
        self.assertAlmostEqual(I[RHO23], 1j * 10.0 * np.exp(0.3j))
        self.assertAlmostEqual(I[RHO32], -1j * 10.0 * np.exp(-0.3j))

    def test_undriven_atom_decouples(self):
        sys = self.solver.build_liouvillian(make_params(gamma1=2.0, delta1=1.0))
        np.testing.assert_array_equal(sys.I, np.zeros(8))
        np.testing.assert_array_equal(sys.L[:2, 2:], np.zeros((2, 6)))
        np.testing.assert_array_equal(sys.L[2:, :2], np.zeros((6, 2)))

    def test_equation_fidelity(self):
        """L psi + I reproduces the master equation element by element"""
        rng = np.random.default_rng(7)
        for _ in range(100):
            params = random_params(rng)
            sys = self.solver.build_liouvillian(params)
            rho = random_density_matrix(rng)
            psi = from_density_matrix(rho)
            expected = lindblad_rhs(params, rho)
            derivative = sys.rhs(psi.psi)
            for index, (i, j) in enumerate(ELEMENTS):
                self.assertAlmostEqual(derivative[index], expected[i, j], delta=1e-11)

    def test_trace_conservation(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            params = random_params(rng)
            sys = self.solver.build_liouvillian(params)
            rho = random_density_matrix(rng)
            rho_dot = lindblad_rhs(params, rho)
            self.assertAlmostEqual(np.trace(rho_dot), 0.0, delta=1e-11)
            derivative = sys.rhs(from_density_matrix(rho).psi)
            implied_rho33 = -(derivative[0] + derivative[1])
            self.assertAlmostEqual(implied_rho33, rho_dot[2, 2], delta=1e-11)

    def test_conjugate_pairing_preserved(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            sys = self.solver.build_liouvillian(random_params(rng))
            psi = from_density_matrix(random_density_matrix(rng))
            image = StateVector(sys.rhs(psi.psi))
            self.assertLess(image.pairing_error(), 1e-11)


class TestSteadyState(unittest.TestCase):
    def setUp(self):
        self.solver = LiouvilleSolver()

    def test_dark_state(self):
        params = make_params(gamma1=20.0, omega1=8.0, omega2=8.0)
        psi = self.solver.steady_state(self.solver.build_liouvillian(params))
        rho = self.solver.to_density_matrix(psi).rho
        expected = np.array([[0, 0, 0], [0, 0.5, -0.5], [0, -0.5, 0.5]])
        np.testing.assert_allclose(rho, expected, atol=1e-10)

    def test_undriven_atom_is_singular(self):
        sys = self.solver.build_liouvillian(make_params(gamma1=1.0))
        with self.assertRaises(SingularLiouvillian) as ctx:
            self.solver.steady_state(sys)
        self.assertEqual(ctx.exception.operation, 'steady_state')

    def test_physical_over_random_parameters(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            sys = self.solver.build_liouvillian(random_params(rng))
            psi = self.solver.steady_state(sys)
            self.assertLessEqual(residual(sys, psi), 1e-10 * np.linalg.norm(sys.I))
            rho = self.solver.to_density_matrix(psi)
            self.assertTrue(rho.is_physical())
            self.assertLess(psi.pairing_error(), 1e-10)

    def test_phase_irrelevant_without_ground_field(self):
        states = [
            self.solver.steady_state(self.solver.build_liouvillian(make_params(**FIG2_PARAMS, phi=phi)))
            for phi in (0.0, 1.0, math.pi)
        ]
        self.assertTrue(states[0].close_to(states[1], 1e-12))
        self.assertTrue(states[0].close_to(states[2], 1e-12))

    def test_fig3_two_level_reduction(self):
        """Near the best squeezing, |2> empties and rho12 nearly vanishes"""
        params = make_params(**FIG3_PARAMS, omega3=3.0, phi=-math.pi / 2)
        psi = self.solver.steady_state(self.solver.build_liouvillian(params))
        self.assertLess(psi.rho22, 0.06)
        self.assertLess(abs(psi.rho12), 0.03)
        self.assertGreater(psi.rho11, 0.05)

    def test_relaxation_rates(self):
        sys = self.solver.build_liouvillian(make_params(**FIG2_PARAMS, omega3=10.0))
        rates = relaxation_rates(sys)
        self.assertTrue(sys.is_stable())
        self.assertGreater(rates['slowest'], 0)
        self.assertLessEqual(rates['slowest'], rates['fastest'])
        self.assertLessEqual(rates['fastest'], rates['spectral_radius'])


class TestEvolve(unittest.TestCase):
    def setUp(self):
        self.solver = LiouvilleSolver()
        self.params = make_params(**FIG3_PARAMS, omega3=3.0, phi=-math.pi / 2)
        self.sys = self.solver.build_liouvillian(self.params)
        self.steady = self.solver.steady_state(self.sys)

    def test_zero_time_is_identity(self):
        psi0 = StateVector(np.arange(8) * (1 + 1j))
        evolved = self.solver.evolve(self.sys, psi0, 0.0)
        np.testing.assert_array_equal(evolved.psi, psi0.psi)

    def test_steady_state_is_fixed_point(self):
        evolved = self.solver.evolve(self.sys, self.steady, 1.0)
        self.assertTrue(evolved.close_to(self.steady, 1e-9))

    def test_long_time_limit(self):
        t_final = max(50.0, 30.0 / self.sys.slowest_rate)
        evolved = self.solver.evolve(self.sys, StateVector(np.zeros(8)), t_final)
        self.assertTrue(evolved.close_to(self.steady, 1e-6))

    def test_long_time_limit_for_spectrum_parameters(self):
        for phi in (0.0, math.pi):
            for omega3 in (10.0, 0.0):
                sys = self.solver.build_liouvillian(make_params(**FIG2_PARAMS, omega3=omega3, phi=phi))
                steady = self.solver.steady_state(sys)
                evolved = self.solver.evolve(
                    sys, StateVector(np.zeros(8)), 30.0 / sys.slowest_rate, method='expm'
                )
                self.assertTrue(evolved.close_to(steady, 1e-6))

    def test_rk4_long_time_limit_for_spectrum_parameters(self):
        for phi in (0.0, math.pi):
            for omega3 in (10.0, 0.0):
                sys = self.solver.build_liouvillian(make_params(**FIG2_PARAMS, omega3=omega3, phi=phi))
                steady = self.solver.steady_state(sys)
                self.assertLess(self.solver.config['dt'] * sys.spectral_radius, 2.78)
                evolved = self.solver.evolve(sys, StateVector(np.zeros(8)), 30.0 / sys.slowest_rate)
                self.assertTrue(evolved.close_to(steady, 1e-6))

    def test_rk4_matches_exponential(self):
        psi0 = StateVector(np.zeros(8))
        rk4 = self.solver.evolve(self.sys, psi0, 1.0, dt=1e-3)
        exact = self.solver.evolve(self.sys, psi0, 1.0, method='expm')
        self.assertTrue(rk4.close_to(exact, 1e-5))

    def test_step_size_guard(self):
        with self.assertRaises(StepSizeTooLarge):
            self.solver.evolve(self.sys, self.steady, 1.0, dt=1.0)

    def test_invalid_arguments(self):
        with self.assertRaises(ValueError):
            self.solver.evolve(self.sys, self.steady, -1.0)
        with self.assertRaises(ValueError):
            self.solver.evolve(self.sys, self.steady, 1.0, method='euler')


class TestDensityMatrix(unittest.TestCase):
    def setUp(self):
        self.solver = LiouvilleSolver()

    def test_zero_vector_is_ground_state(self):
        rho = self.solver.to_density_matrix(StateVector(np.zeros(8))).rho
        np.testing.assert_array_equal(rho, np.diag([0, 0, 1]).astype(complex))

    def test_dark_state_vector(self):
        psi = StateVector([0, 0.5, 0, 0, 0, 0, -0.5, -0.5])
        rho = self.solver.to_density_matrix(psi)
        self.assertAlmostEqual(rho.rho[1, 2], -0.5)
        self.assertAlmostEqual(rho.rho[2, 1], -0.5)
        self.assertAlmostEqual(rho.rho[2, 2], 0.5)
        self.assertTrue(rho.is_physical())

    def test_random_states_are_hermitian(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            original = random_density_matrix(rng)
            rho = self.solver.to_density_matrix(from_density_matrix(original))
            self.assertLess(rho.hermiticity_error(), 1e-15)
            self.assertAlmostEqual(rho.trace, 1.0, delta=1e-12)
            np.testing.assert_allclose(rho.rho, original, atol=1e-12)

    def test_broken_pairing(self):
        psi = np.zeros(8, dtype=complex)
        psi[2], psi[3] = 0.1, 0.3
        with self.assertRaises(NotHermitian):
            self.solver.to_density_matrix(StateVector(psi))

    def test_state_vector_shape(self):
        with self.assertRaises(ValueError):
            StateVector(np.zeros(9))
        state = StateVector(np.zeros(8))
        with self.assertRaises(ValueError):
            state.psi[RHO11] = 1.0


if __name__ == '__main__':
    unittest.main()
