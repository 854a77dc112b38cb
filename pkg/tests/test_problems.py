import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from agma.exceptions import ConstantsUnavailableError, DimensionError
from agma.problems import (
    Family,
    NodeDataset,
    ProblemInstance,
    compute_constants,
    global_gradient,
    global_objective,
    largest_eigenvalue,
    local_gradient,
    local_gradients,
    local_objective,
    local_objectives,
)

from conftest import central_difference


def _random_problem(family, seed, N=3, m=7, d=4, l2=0.1):
    r = np.random.default_rng(seed)
    nodes = []
    for _ in range(N):
        X = r.standard_normal((m, d))
        y = r.choice([-1.0, 1.0], m) if family is Family.LOGISTIC else r.standard_normal(m)
        nodes.append(NodeDataset(X, y))
    return ProblemInstance(nodes, family, l2=l2 if family is Family.LOGISTIC else 0.0)


class TestNodeDataset:
    def test_row_count_must_match_labels(self):
        with pytest.raises(DimensionError):
            NodeDataset(np.zeros((3, 2)), np.zeros(2))

    def test_needs_a_sample(self):
        with pytest.raises(DimensionError):
            NodeDataset(np.zeros((0, 2)), np.zeros(0))


class TestProblemInstance:
    def test_nodes_share_dimension(self):
        with pytest.raises(DimensionError):
            ProblemInstance([NodeDataset(np.eye(2), np.zeros(2)), NodeDataset(np.eye(3), np.zeros(3))])

    def test_needs_a_node(self):
        with pytest.raises(DimensionError):
            ProblemInstance([])

    def test_logistic_needs_positive_l2(self):
        with pytest.raises(ValueError):
            ProblemInstance([NodeDataset(np.eye(2), [1.0, -1.0])], Family.LOGISTIC, l2=0.0)

    def test_logistic_labels_are_signs(self):
        with pytest.raises(ValueError):
            ProblemInstance([NodeDataset(np.eye(2), [1.0, 0.0])], Family.LOGISTIC, l2=0.1)

    def test_sizes(self, small_logistic):
        assert small_logistic.n_nodes == 6
        assert small_logistic.dimension == 4
        assert small_logistic.n_samples == 30


class TestLocalGradient:
    def test_identity_least_squares_is_sample_averaged(self):
        problem = ProblemInstance([NodeDataset(np.eye(2), np.zeros(2))])
        # X^T (X theta - y) / |D_n| with X = I_2 halves theta
        np.testing.assert_allclose(local_gradient(problem, 0, [1.0, 1.0]), [0.5, 0.5])

    def test_identity_least_squares_sum_convention(self):
        # with X^T X / |D_n| = I the gradient of (1/2)|theta|^2 is theta
        problem = ProblemInstance([NodeDataset(np.sqrt(2.0) * np.eye(2), np.zeros(2))])
        np.testing.assert_allclose(local_gradient(problem, 0, [1.0, 1.0]), [1.0, 1.0])

    def test_logistic_zero_input_leaves_ridge_term(self):
        problem = ProblemInstance([NodeDataset(np.zeros((1, 1)), [1.0])], Family.LOGISTIC, l2=0.1)
        # the data term at x = 0 is -y * sigmoid(0) * x = 0
        np.testing.assert_allclose(local_gradient(problem, 0, [3.0]), [0.3])

    def test_least_squares_matches_finite_differences(self):
        r = np.random.default_rng(0)
        problem = ProblemInstance([NodeDataset(r.standard_normal((5, 3)), r.standard_normal(5))])
        theta = r.standard_normal(3)
        fd = central_difference(lambda t: local_objective(problem, 0, t), theta)
        np.testing.assert_allclose(local_gradient(problem, 0, theta), fd, rtol=1e-6)

    def test_node_out_of_range(self, small_quadratic):
        with pytest.raises(IndexError):
            local_gradient(small_quadratic, small_quadratic.n_nodes, np.zeros(5))

    def test_dimension_mismatch(self, small_quadratic):
        with pytest.raises(DimensionError):
            local_gradient(small_quadratic, 0, np.zeros(4))

    @pytest.mark.parametrize("family", list(Family))
    def test_batched_gradients_match_per_node(self, family):
        problem = _random_problem(family, 1)
        theta = np.random.default_rng(2).standard_normal(4)
        batched = local_gradients(problem, theta)
        for n in range(problem.n_nodes):
            np.testing.assert_allclose(batched[n], local_gradient(problem, n, theta), rtol=1e-13, atol=1e-15)

    @pytest.mark.parametrize("family", list(Family))
    @given(seed=st.integers(0, 2**32 - 1))
    def test_gradient_matches_finite_differences(self, family, seed):
        problem = _random_problem(family, seed)
        theta = 2.0 * np.random.default_rng(seed + 1).standard_normal(4)
        fd = central_difference(lambda t: global_objective(problem, t), theta)
        g = global_gradient(problem, theta)
        assert np.linalg.norm(g - fd) <= 1e-6 * max(np.linalg.norm(fd), 1e-3)


class TestGlobalObjective:
    def test_zero_at_origin(self):
        problem = ProblemInstance([NodeDataset(np.eye(2), np.zeros(2))])
        assert global_objective(problem, [0.0, 0.0]) == 0.0

    def test_duplicated_nodes_equal_single_node(self):
        r = np.random.default_rng(5)
        node = NodeDataset(r.standard_normal((4, 3)), r.standard_normal(4))
        theta = r.standard_normal(3)
        one = ProblemInstance([node])
        two = ProblemInstance([node, node])
        assert global_objective(two, theta) == pytest.approx(global_objective(one, theta), rel=1e-15)

    @pytest.mark.parametrize("family", list(Family))
    def test_average_of_local_objectives(self, family):
        problem = _random_problem(family, 3, N=5)
        theta = np.random.default_rng(4).standard_normal(4)
        direct = sum(local_objective(problem, n, theta) for n in range(5)) / 5
        assert global_objective(problem, theta) == pytest.approx(direct, rel=1e-14)
        np.testing.assert_allclose(
            local_objectives(problem, theta), [local_objective(problem, n, theta) for n in range(5)], rtol=1e-14
        )

    def test_logistic_optimum_is_below_random_points(self, small_logistic):
        c = small_logistic.constants
        r = np.random.default_rng(8)
        for _ in range(200):
            theta = c.theta_star + r.standard_normal(4) * r.uniform(1e-4, 3)
            assert global_objective(small_logistic, theta) >= c.F_star

    def test_logistic_optimum_against_scipy(self, small_logistic):
        from scipy.optimize import minimize

        res = minimize(
            lambda t: global_objective(small_logistic, t), np.zeros(4),
            jac=lambda t: global_gradient(small_logistic, t), method="BFGS", options={"gtol": 1e-11},
        )
        np.testing.assert_allclose(small_logistic.constants.theta_star, res.x, atol=1e-7)
        assert small_logistic.constants.F_star <= res.fun + 1e-14


class TestConstants:
    def test_identity_gram(self):
        problem = ProblemInstance([NodeDataset(np.eye(2) * np.sqrt(2.0), [3.0, -1.0])]).with_constants()
        assert problem.constants.L == pytest.approx(1.0, rel=1e-12)
        assert problem.constants.mu == pytest.approx(1.0, rel=1e-12)

    def test_logistic_closed_form(self):
        # every input has squared norm 4
        X = np.array([[2.0, 0.0], [0.0, 2.0], [-2.0, 0.0]])
        problem = ProblemInstance([NodeDataset(X, [1.0, -1.0, 1.0])], Family.LOGISTIC, l2=0.1)
        c = compute_constants(problem)
        assert c.mu == pytest.approx(0.1)
        assert c.L == pytest.approx(1.1)

    def test_power_iteration_matches_dense_eigensolver(self):
        r = np.random.default_rng(11)
        X = r.standard_normal((20, 5))
        H = X.T @ X / 20
        assert largest_eigenvalue(H) == pytest.approx(np.linalg.eigvalsh(H)[-1], rel=1e-8)
        problem = ProblemInstance([NodeDataset(X, r.standard_normal(20))]).with_constants()
        assert problem.constants.L == pytest.approx(np.linalg.eigvalsh(H)[-1], rel=1e-8)

    def test_power_iteration_degenerate_top(self):
        A = np.diag([2.0, 2.0, 1.0])
        assert largest_eigenvalue(A) == pytest.approx(2.0, rel=1e-10)
        assert largest_eigenvalue(np.zeros((3, 3))) == 0.0

    def test_averages_node_constants(self, random_least_squares):
        Ls, mus = [], []
        for node in random_least_squares.nodes:
            eig = np.linalg.eigvalsh(node.inputs.T @ node.inputs / node.n_samples)
            Ls.append(eig[-1])
            mus.append(eig[0])
        c = random_least_squares.constants
        assert c.L == pytest.approx(np.mean(Ls), rel=1e-8)
        assert c.mu == pytest.approx(np.mean(mus), rel=1e-8)

    def test_least_squares_optimum(self, random_least_squares):
        c = random_least_squares.constants
        np.testing.assert_allclose(global_gradient(random_least_squares, c.theta_star), 0.0, atol=1e-12)
        assert c.F_star == pytest.approx(global_objective(random_least_squares, c.theta_star))

    def test_singular_least_squares_minimum_norm(self):
        r = np.random.default_rng(2)
        X = r.standard_normal((6, 2)) @ np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
        problem = ProblemInstance([NodeDataset(X, r.standard_normal(6))]).with_constants()
        c = problem.constants
        assert c.mu == 0.0
        np.testing.assert_allclose(c.theta_star, np.linalg.pinv(X) @ problem.nodes[0].labels, atol=1e-6)

    def test_log_loss_has_no_constants(self):
        problem = _random_problem(Family.LOG_LOSS, 0)
        with pytest.raises(ConstantsUnavailableError):
            compute_constants(problem)
        with pytest.raises(ConstantsUnavailableError):
            problem.require_constants()

    def test_G_dominates_gradient_power_on_segment(self, small_logistic):
        c = small_logistic.constants
        for t in np.linspace(0, 1, 37):
            theta = t * c.theta_star
            assert np.max(np.sum(local_gradients(small_logistic, theta) ** 2, axis=1)) <= c.G

    @pytest.mark.parametrize("family", [Family.LEAST_SQUARES, Family.LOGISTIC])
    def test_mu_at_most_L(self, family):
        for seed in range(5):
            c = compute_constants(_random_problem(family, seed))
            assert 0.0 <= c.mu <= c.L


class TestCurvatureInequalities:
    @pytest.mark.parametrize("fixture", ["small_quadratic", "small_logistic", "random_least_squares"])
    def test_strong_convexity_and_lipschitz(self, fixture, request):
        problem = request.getfixturevalue(fixture)
        c = problem.constants
        r = np.random.default_rng(99)
        d = problem.dimension
        F = lambda t: global_objective(problem, t)
        dF = lambda t: global_gradient(problem, t)
        for _ in range(1000):
            x = c.theta_star + r.standard_normal(d) * 2.0
            y = c.theta_star + r.standard_normal(d) * 2.0
            gap = F(y) - F(x) - dF(x) @ (y - x)
            slack = 1e-10 * (1.0 + abs(F(x)) + abs(F(y)))
            dist_sq = (x - y) @ (x - y)
            assert gap >= 0.5 * c.mu * dist_sq - slack
            assert gap <= 0.5 * c.L * dist_sq + slack
            gdiff = dF(x) - dF(y)
            assert gdiff @ gdiff / (2.0 * c.L) <= gap + slack
