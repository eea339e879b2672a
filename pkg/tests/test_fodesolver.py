import numpy as np
import pytest
from scipy.special import erfcx

from fracdmd import DivergenceError, FodeProblem, caputo_derivative, SampledSignal, solve
from fracdmd.fodesolver import make_vector_field

# E_q(-1) computed by 40-digit series summation
E_Q_AT_MINUS_ONE = {0.3: 0.45659440832969066901,
                    0.5: 0.42758357615580700441,
                    0.8: 0.38694857861897685146}


def linear_problem(q, dt, x0=1.0, horizon=1.0):
    return FodeProblem(order=q, field_name="linear1d", params={"lam": -1.0},
                       x0=[x0], horizon=horizon, dt=dt)


class TestRegistry:
    def test_unknown_field(self):
        with pytest.raises(ValueError):
            make_vector_field("vanderpol", {})

    def test_linear_nd(self):
        rhs = make_vector_field("linearnd", {"matrix": [[0.0, 1.0], [-1.0, 0.0]]})
        np.testing.assert_allclose(rhs(np.array([1.0, 2.0])), [2.0, -1.0])

    def test_logistic(self):
        rhs = make_vector_field("logistic", {"r": 2.0, "k_cap": 4.0})
        assert rhs(np.array([2.0]))[0] == pytest.approx(2.0)

    def test_duffing(self):
        rhs = make_vector_field("duffing", {"alpha": 1.0, "beta": 0.5, "delta": 0.2})
        np.testing.assert_allclose(rhs(np.array([2.0, 3.0])), [3.0, -0.2 * 3 - 2 - 0.5 * 8])


class TestProblemValidation:
    def test_order_range(self):
        with pytest.raises(ValueError):
            linear_problem(1.2, 1e-2)

    def test_minimum_steps(self):
        with pytest.raises(ValueError):
            FodeProblem(order=0.5, field_name="zero", x0=[1.0], horizon=1.0, dt=0.5)


class TestSolve:
    def test_classical_exponential_decay(self):
        trajectory = solve(linear_problem(1.0, 1e-3))
        assert trajectory.states[-1, 0] == pytest.approx(np.exp(-1.0), abs=1e-4)

    def test_zero_field_is_constant(self):
        problem = FodeProblem(order=0.4, field_name="zero", x0=[2.0, -1.0],
                              horizon=1.0, dt=1e-2)
        trajectory = solve(problem)
        np.testing.assert_array_equal(trajectory.states, np.tile([2.0, -1.0], (101, 1)))

    def test_fractional_linear_terminal_value(self):
        trajectory = solve(linear_problem(0.5, 1e-3))
        assert trajectory.states[-1, 0] == pytest.approx(
            E_Q_AT_MINUS_ONE[0.5], abs=1e-3
        )

    def test_solution_matches_closed_form_along_grid(self):
        trajectory = solve(linear_problem(0.5, 1e-3, x0=2.0, horizon=2.0))
        exact = 2.0 * erfcx(np.sqrt(trajectory.times))
        rel = np.linalg.norm(trajectory.states[:, 0] - exact) / np.linalg.norm(exact)
        assert rel < 1e-4

    @pytest.mark.parametrize("q", [0.3, 0.5, 0.8])
    def test_near_second_order_convergence(self, q):
        exact = E_Q_AT_MINUS_ONE[q]
        errors = [abs(solve(linear_problem(q, dt)).states[-1, 0] - exact)
                  for dt in (2e-3, 1e-3)]
        assert errors[1] < 1e-3
        assert errors[0] / errors[1] >= 1.8

    def test_consistency_with_caputo_derivative(self):
        trajectory = solve(linear_problem(0.5, 1e-3, x0=1.0, horizon=1.0))
        signal = SampledSignal(t0=0.0, dt=trajectory.dt, values=trajectory.states[:, 0])
        for t in (0.4, 0.7, 1.0):
            x_t = trajectory.states[int(round(t / trajectory.dt)), 0]
            assert caputo_derivative(signal, 0.5, t) == pytest.approx(-x_t, abs=5e-3)

    def test_divergence_reports_last_valid_time(self):
        # strongly unstable cubic growth blows up inside the horizon
        problem = FodeProblem(order=1.0, field_name="duffing",
                              params={"alpha": -800.0, "beta": -800.0, "delta": -80.0},
                              x0=[3.0, 3.0], horizon=8.0, dt=0.05)
        with pytest.raises(DivergenceError) as excinfo:
            solve(problem)
        assert 0.0 <= excinfo.value.last_valid_time < 8.0

    def test_corrector_sweeps_validation(self):
        with pytest.raises(ValueError):
            solve(linear_problem(0.5, 1e-2), corrector_sweeps=9)

    def test_multidimensional_rotation(self):
        # q=1 rotation preserves the norm; checks vector handling end to end
        problem = FodeProblem(order=1.0, field_name="linearnd",
                              params={"matrix": [[0.0, 1.0], [-1.0, 0.0]]},
                              x0=[1.0, 0.0], horizon=2.0, dt=1e-3)
        trajectory = solve(problem)
        norms = np.linalg.norm(trajectory.states, axis=1)
        np.testing.assert_allclose(norms, 1.0, atol=1e-5)
