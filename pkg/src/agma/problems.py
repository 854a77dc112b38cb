"""Loss families, node-partitioned objectives and their analytic constants.

A :class:`ProblemInstance` holds one dataset per node. The global objective is
the plain average of the local objectives,

    F(theta) = (1/N) * sum_n f_n(theta),

where every ``f_n`` is itself an average over the node's samples.
"""

from __future__ import annotations

import dataclasses
import enum
import warnings

import numpy as np
from scipy.special import expit

from .exceptions import ConstantsUnavailableError, DimensionError

__all__ = [
    "Family",
    "NodeDataset",
    "ProblemConstants",
    "ProblemInstance",
    "local_objective",
    "local_gradient",
    "local_gradients",
    "global_objective",
    "global_gradient",
    "compute_constants",
    "largest_eigenvalue",
]


class Family(str, enum.Enum):
    LEAST_SQUARES = "least_squares"
    LOGISTIC = "logistic"
    LOG_LOSS = "log_loss"


@dataclasses.dataclass(frozen=True)
class NodeDataset:
    """Samples held by a single node."""

    inputs: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        y = np.asarray(self.labels, dtype=float).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise DimensionError(
                f"{X.shape[0]} input rows but {y.shape[0]} labels"
            )
        if X.shape[0] < 1:
            raise DimensionError("a node needs at least one sample")
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "labels", y)

    @property
    def n_samples(self):
        return self.inputs.shape[0]


@dataclasses.dataclass(frozen=True)
class ProblemConstants:
    """Lipschitz / strong-convexity constants and the reference optimum.

    Attributes
    ----------
    L : float
        Lipschitz constant of the gradient of F.
    mu : float
        Strong-convexity constant of F (0 for merely convex problems).
    G : float
        Bound on the squared local gradient norms along the segment from
        ``theta0`` to ``theta_star`` (inflated by 10%).
    theta_star : ndarray
        Minimiser of F.
    F_star : float
        ``F(theta_star)``.
    """

    L: float
    mu: float
    G: float
    theta_star: np.ndarray
    F_star: float

    @property
    def strongly_convex(self):
        return self.mu > 0.0


@dataclasses.dataclass(frozen=True)
class ProblemInstance:
    """A node-partitioned learning problem.

    ``l2`` is the ridge weight of the regularised logistic family and must be
    positive for it. ``constants`` is attached by :func:`with_constants` or by
    the data builders.
    """

    nodes: tuple
    family: Family = Family.LEAST_SQUARES
    l2: float = 0.0
    constants: ProblemConstants | None = None

    def __post_init__(self):
        nodes = tuple(self.nodes)
        if not nodes:
            raise DimensionError("a problem needs at least one node")
        dims = {node.inputs.shape[1] for node in nodes}
        if len(dims) != 1:
            raise DimensionError(f"nodes disagree on dimension: {sorted(dims)}")
        family = Family(self.family)
        if family is Family.LOGISTIC:
            if not self.l2 > 0:
                raise ValueError("regularised logistic loss needs l2 > 0")
            for node in nodes:
                if not np.all(np.isin(node.labels, (-1.0, 1.0))):
                    raise ValueError("logistic labels must be in {-1, +1}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "family", family)

        # stacked copy of all samples, used by the batched gradient
        sizes = np.array([node.n_samples for node in nodes])
        object.__setattr__(self, "_X", np.vstack([node.inputs for node in nodes]))
        object.__setattr__(self, "_y", np.concatenate([node.labels for node in nodes]))
        object.__setattr__(self, "_sizes", sizes)
        object.__setattr__(self, "_offsets", np.concatenate([[0], np.cumsum(sizes)[:-1]]))

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def dimension(self):
        return self.nodes[0].inputs.shape[1]

    @property
    def n_samples(self):
        return int(self._sizes.sum())

    def with_constants(self, theta0=None):
        """Return a copy with :func:`compute_constants` attached."""
        return dataclasses.replace(self, constants=compute_constants(self, theta0))

    def require_constants(self):
        if self.constants is None:
            raise ConstantsUnavailableError(
                "problem has no constants attached; call with_constants() first"
            )
        return self.constants


def _check_theta(problem, theta):
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (problem.dimension,):
        raise DimensionError(
            f"theta has shape {theta.shape}, expected ({problem.dimension},)"
        )
    return theta


def _check_node(problem, node):
    if not 0 <= node < problem.n_nodes:
        raise IndexError(f"node {node} out of range for N={problem.n_nodes}")


def _sample_losses(family, X, y, theta):
    r = X @ theta
    if family is Family.LEAST_SQUARES:
        return 0.5 * (r - y) ** 2
    if family is Family.LOGISTIC:
        return np.logaddexp(0.0, -y * r)
    return 0.5 * np.log1p((r - y) ** 2)


def _sample_weights(family, X, y, theta):
    # per-sample derivative of the loss w.r.t. the linear score x^T theta
    r = X @ theta
    if family is Family.LEAST_SQUARES:
        return r - y
    if family is Family.LOGISTIC:
        return -y * expit(-y * r)
    e = r - y
    return e / (e * e + 1.0)


def local_objective(problem, node, theta):
    """Value of ``f_n`` at ``theta``."""
    _check_node(problem, node)
    theta = _check_theta(problem, theta)
    data = problem.nodes[node]
    value = _sample_losses(problem.family, data.inputs, data.labels, theta).mean()
    if problem.family is Family.LOGISTIC:
        value += 0.5 * problem.l2 * theta @ theta
    return float(value)


def local_gradient(problem, node, theta):
    """Gradient of ``f_n`` at ``theta``.

    For least squares this is ``X^T (X theta - y) / |D_n|``.
    """
    _check_node(problem, node)
    theta = _check_theta(problem, theta)
    data = problem.nodes[node]
    w = _sample_weights(problem.family, data.inputs, data.labels, theta)
    grad = data.inputs.T @ w / data.n_samples
    if problem.family is Family.LOGISTIC:
        grad = grad + problem.l2 * theta
    return grad


def local_gradients(problem, theta):
    """All local gradients at ``theta`` as an ``(N, d)`` array."""
    theta = _check_theta(problem, theta)
    w = _sample_weights(problem.family, problem._X, problem._y, theta)
    sums = np.add.reduceat(problem._X * w[:, None], problem._offsets, axis=0)
    grads = sums / problem._sizes[:, None]
    if problem.family is Family.LOGISTIC:
        grads += problem.l2 * theta
    return grads


def local_objectives(problem, theta):
    theta = _check_theta(problem, theta)
    losses = _sample_losses(problem.family, problem._X, problem._y, theta)
    values = np.add.reduceat(losses, problem._offsets) / problem._sizes
    if problem.family is Family.LOGISTIC:
        values = values + 0.5 * problem.l2 * theta @ theta
    return values


def global_objective(problem, theta):
    """``F(theta) = (1/N) sum_n f_n(theta)``."""
    return float(local_objectives(problem, theta).mean())


def global_gradient(problem, theta):
    return local_gradients(problem, theta).mean(axis=0)


def largest_eigenvalue(A, tol=1e-15, max_iter=20_000, seed=0):
    """Largest eigenvalue of a symmetric PSD matrix by power iteration.

    Falls back to a dense eigensolver when the iteration stalls (tiny
    spectral gap).
    """
    A = np.asarray(A, dtype=float)
    d = A.shape[0]
    v = np.random.default_rng(seed).standard_normal(d)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = A @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v_next = w / norm
        lam_next = float(v_next @ A @ v_next)
        if abs(lam_next - lam) <= tol * abs(lam_next) and np.linalg.norm(v_next - v) < 1e-10:
            return lam_next
        v, lam = v_next, lam_next
    return float(np.linalg.eigvalsh(A)[-1])


def _node_spectrum(node):
    H = node.inputs.T @ node.inputs / node.n_samples
    L_n = largest_eigenvalue(H)
    mu_n = float(np.linalg.eigvalsh(H)[0])
    # eigenvalues at rounding level are structural zeros
    if mu_n <= 1e-10 * max(L_n, 1.0):
        mu_n = 0.0
    return L_n, mu_n


def _least_squares_optimum(problem):
    d = problem.dimension
    H = np.zeros((d, d))
    b = np.zeros(d)
    for node in problem.nodes:
        H += node.inputs.T @ node.inputs / node.n_samples
        b += node.inputs.T @ node.labels / node.n_samples
    H /= problem.n_nodes
    b /= problem.n_nodes
    eigs = np.linalg.eigvalsh(H)
    if eigs[0] > 1e-10 * max(eigs[-1], 1.0):
        return np.linalg.solve(H, b)
    # singular normal equations: minimum-norm solution. A tiny ridge would
    # amplify rounding noise in the null-space component of b.
    return np.linalg.lstsq(H, b, rcond=1e-10)[0]


def _nesterov_minimize(problem, L, mu, theta0, tol=1e-12, max_iter=1_000_000):
    # constant-momentum scheme for L-smooth, mu-strongly convex objectives
    rate = np.sqrt(mu / L)
    momentum = (1.0 - rate) / (1.0 + rate)
    x = y = np.array(theta0, dtype=float)
    for _ in range(max_iter):
        g = global_gradient(problem, y)
        x_next = y - g / L
        y = x_next + momentum * (x_next - x)
        x = x_next
        if np.linalg.norm(global_gradient(problem, x)) <= tol:
            return x
    raise RuntimeError(
        f"centralized solver did not reach gradient norm {tol} in {max_iter} iterations"
    )


def _gradient_power_bound(problem, theta0, theta_star):
    # max over nodes of ||grad f_n||^2 on the segment theta0 -> theta_star
    ts = np.linspace(0.0, 1.0, 102)
    worst = 0.0
    for t in ts:
        theta = (1.0 - t) * theta0 + t * theta_star
        worst = max(worst, float(np.max(np.sum(local_gradients(problem, theta) ** 2, axis=1))))
    return 1.1 * worst


def compute_constants(problem, theta0=None):
    """Analytic constants ``(L, mu, G, theta_star, F_star)`` of a problem.

    Parameters
    ----------
    problem : ProblemInstance
    theta0 : array_like, optional
        Starting point used for the gradient-power bound ``G``. Defaults to
        the zero vector.

    Raises
    ------
    ConstantsUnavailableError
        For the non-convex log-loss family.
    """
    if problem.family is Family.LOG_LOSS:
        raise ConstantsUnavailableError("log-loss family is non-convex; constants undefined")
    d = problem.dimension
    theta0 = np.zeros(d) if theta0 is None else _check_theta(problem, theta0)

    if problem.family is Family.LEAST_SQUARES:
        spectra = np.array([_node_spectrum(node) for node in problem.nodes])
        L = float(spectra[:, 0].mean())
        mu = float(spectra[:, 1].mean())
        theta_star = _least_squares_optimum(problem)
    else:
        mu = float(problem.l2)
        max_sq_norm = max(float(np.max(np.sum(node.inputs**2, axis=1))) for node in problem.nodes)
        L = mu + max_sq_norm / 4.0
        theta_star = _nesterov_minimize(problem, L, mu, theta0)

    if mu > L:
        warnings.warn(f"computed mu={mu} exceeds L={L}; clipping mu to L")
        mu = L
    G = _gradient_power_bound(problem, theta0, theta_star)
    F_star = global_objective(problem, theta_star)
    return ProblemConstants(L=L, mu=mu, G=G, theta_star=theta_star, F_star=F_star)
