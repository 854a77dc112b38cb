"""Iterate loops: AGMA, GBMA, the two FDM baselines and a noiseless reference.

Every MAC/FDM algorithm shares one step:

    z_k      = theta_k + eta_{k-1} (theta_k - theta_{k-1})      (z_0 = theta_0)
    v_k      = aggregate(grad f_1(z_k), ..., grad f_N(z_k))
    theta_k+1 = z_k - beta v_k

GBMA and FDM-GD keep ``eta = 0``; AGMA and FDM-AGD take ``eta_k`` from a
:class:`~agma.momentum.MomentumSchedule`.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import enum
import math
import os
import time
from typing import NamedTuple

import numpy as np

from .channel import fdm_aggregate, mac_aggregate, sample_realization
from .exceptions import AGMAError, DivergenceError, StepsizeRangeError
from .momentum import default_alpha0, gamma0, l_beta_tilde, schedule_for
from .problems import Family, global_gradient, global_objective, local_gradients

__all__ = [
    "Algorithm",
    "AlgorithmConfig",
    "IterateState",
    "RunTrace",
    "MonteCarloTrace",
    "agma_step",
    "build_schedule",
    "initial_state",
    "run",
    "monte_carlo",
    "central_nesterov_iterates",
]


class Algorithm(str, enum.Enum):
    AGMA = "AGMA"
    GBMA = "GBMA"
    FDM_GD = "FDM_GD"
    FDM_AGD = "FDM_AGD"
    CENTRAL_NESTEROV = "CentralNesterov"

    @property
    def uses_momentum(self):
        return self in (Algorithm.AGMA, Algorithm.FDM_AGD, Algorithm.CENTRAL_NESTEROV)

    @property
    def topology(self):
        if self in (Algorithm.FDM_GD, Algorithm.FDM_AGD):
            return "fdm"
        if self is Algorithm.CENTRAL_NESTEROV:
            return "exact"
        return "mac"


@dataclasses.dataclass(frozen=True)
class AlgorithmConfig:
    """Settings for a single run.

    ``beta=None`` resolves to ``1 / (mu_h L)`` (``1 / L`` for the centralized
    reference) and ``alpha0=None`` to :func:`~agma.momentum.default_alpha0`.
    ``allow_unstable_step`` lets a stepsize outside the convergence range run
    anyway; its momentum schedule is then built as if ``L_tilde = L``.
    """

    algorithm: Algorithm = Algorithm.AGMA
    beta: float | None = None
    alpha0: float | None = None
    max_iters: int = 100
    restart_k0: int | None = None
    seed: int = 0
    theta0: tuple | None = None
    early_stop_tol: float | None = None
    allow_unstable_step: bool = False

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")
        if self.restart_k0 is not None and self.restart_k0 < 1:
            raise ValueError("restart_k0 must be >= 1")
        if self.theta0 is not None:
            object.__setattr__(self, "theta0", tuple(float(t) for t in self.theta0))

    def to_dict(self):
        out = dataclasses.asdict(self)
        out["algorithm"] = self.algorithm.value
        return out


class IterateState(NamedTuple):
    """``theta_k``, ``theta_{k-1}`` and the extrapolated point ``z_k``."""

    theta_curr: np.ndarray
    theta_prev: np.ndarray
    z: np.ndarray
    k: int


@dataclasses.dataclass
class RunTrace:
    """Per-iteration record of one seeded run (``max_iters + 1`` rows)."""

    k: np.ndarray
    excess_risk: np.ndarray
    distance: np.ndarray
    wall_time: np.ndarray
    config: AlgorithmConfig
    seed: int
    beta: float
    theta_final: np.ndarray

    def __len__(self):
        return len(self.k)


@dataclasses.dataclass
class MonteCarloTrace:
    """Mean excess risk over replications with 95% normal-approximation CIs."""

    k: np.ndarray
    mean: np.ndarray
    ci_halfwidth: np.ndarray
    std: np.ndarray
    seeds: list
    config: AlgorithmConfig
    beta: float

    @property
    def upper(self):
        return self.mean + self.ci_halfwidth

    @property
    def replications(self):
        return len(self.seeds)


def _mean_gain(algorithm, channel):
    return 1.0 if algorithm is Algorithm.CENTRAL_NESTEROV else channel.mu_h


def resolve_beta(config, problem, channel):
    """Stepsize for ``config``, validated against ``(0, 2 / (mu_h L))``."""
    algorithm = config.algorithm
    mu_h = _mean_gain(algorithm, channel)
    if problem.constants is None:
        if config.beta is None:
            raise StepsizeRangeError("problem has no constants; beta must be given explicitly")
        return float(config.beta)
    L = problem.constants.L
    beta = 1.0 / (mu_h * L) if config.beta is None else float(config.beta)
    upper = 2.0 / (mu_h * L)
    if not 0.0 < beta < upper and not config.allow_unstable_step:
        raise StepsizeRangeError(
            f"stepsize out of convergence range: beta={beta} not in (0, {upper})"
        )
    return beta


def build_schedule(config, problem, channel, beta):
    """Momentum schedule for a run, or ``None`` for memoryless algorithms."""
    algorithm = config.algorithm
    if not algorithm.uses_momentum:
        return None
    if problem.constants is None:
        mu, L_tilde, L = 0.0, None, None
    else:
        L, mu = problem.constants.L, problem.constants.mu
        # FDM-AGD builds its schedule as if the gain mean were 1
        mu_h = 1.0 if algorithm in (Algorithm.FDM_AGD, Algorithm.CENTRAL_NESTEROV) else channel.mu_h
        try:
            L_tilde = l_beta_tilde(beta, mu_h, L)
        except StepsizeRangeError:
            if not config.allow_unstable_step:
                raise
            L_tilde = L
    alpha0 = config.alpha0
    if alpha0 is None:
        alpha0 = default_alpha0(mu, L) if L is not None else 0.5
    q = mu / L_tilde if L_tilde else 0.0
    g0 = gamma0(alpha0, L, mu) if L is not None else 1.0
    return schedule_for(float(alpha0), float(q), float(mu), float(g0))


def initial_state(theta0):
    theta0 = np.array(theta0, dtype=float)
    return IterateState(theta0, theta0.copy(), theta0.copy(), 0)


def agma_step(state, schedule, channel, problem, rng, beta, restart_k0=None, topology="mac"):
    """Advance one iteration from ``state`` (holding ``z_k``) to ``k + 1``.

    ``schedule=None`` disables momentum (GBMA / FDM-GD). With ``restart_k0``
    set, ``eta_k = 0`` for every ``k > restart_k0``.
    """
    k = state.k
    grads = local_gradients(problem, state.z)
    if topology == "mac":
        realization = sample_realization(channel, problem.n_nodes, problem.dimension, rng)
        v = mac_aggregate(grads, realization)
    elif topology == "fdm":
        v = fdm_aggregate(grads, channel, rng)
    else:
        raise ValueError(f"unknown topology {topology!r}")
    theta_next = state.z - beta * v
    if not np.all(np.isfinite(theta_next)):
        raise DivergenceError(k + 1)
    if schedule is None or (restart_k0 is not None and k > restart_k0):
        z_next = theta_next.copy()
    else:
        z_next = theta_next + schedule.eta(k) * (theta_next - state.theta_curr)
    return IterateState(theta_next, state.theta_curr, z_next, k + 1)


def central_nesterov_iterates(problem, beta, alpha0, max_iters, theta0=None):
    """Noiseless accelerated descent written in estimate-sequence form.

    Keeps the auxiliary centre ``p_k`` and curvature ``gamma_k`` explicitly
    and solves ``alpha_k^2 / beta = (1 - alpha_k) gamma_k + alpha_k mu`` each
    step. Yields ``theta_0, ..., theta_max_iters``.
    """
    constants = problem.require_constants()
    mu = constants.mu
    L_ref = 1.0 / beta
    theta = np.zeros(problem.dimension) if theta0 is None else np.array(theta0, dtype=float)
    p = theta.copy()
    gamma = gamma0(alpha0, L_ref, mu)
    yield theta.copy()
    for k in range(max_iters):
        # L_ref a^2 + (gamma - mu) a - gamma = 0, positive root
        b = gamma - mu
        alpha = 2.0 * gamma / (b + math.sqrt(b * b + 4.0 * L_ref * gamma))
        gamma_next = (1.0 - alpha) * gamma + alpha * mu
        y = (alpha * gamma * p + gamma_next * theta) / (gamma + alpha * mu)
        g = global_gradient(problem, y)
        theta = y - beta * g
        if not np.all(np.isfinite(theta)):
            raise DivergenceError(k + 1)
        p = ((1.0 - alpha) * gamma * p + alpha * mu * y - alpha * g) / gamma_next
        gamma = gamma_next
        yield theta.copy()


def _reference_point(problem):
    if problem.constants is not None:
        return problem.constants.F_star, problem.constants.theta_star
    if problem.family is Family.LOG_LOSS:
        # the log-loss is non-negative, so 0 is a valid floor
        return 0.0, None
    problem.require_constants()


def run(config, problem, channel):
    """Execute ``config.max_iters`` iterations and record the excess risk.

    Deterministic given ``config.seed``; wall-clock times are recorded but are
    not part of the reproducibility contract.
    """
    beta = resolve_beta(config, problem, channel)
    schedule = build_schedule(config, problem, channel, beta)
    F_star, theta_star = _reference_point(problem)
    d = problem.dimension
    theta0 = np.zeros(d) if config.theta0 is None else np.asarray(config.theta0, dtype=float)
    if theta0.shape != (d,):
        raise ValueError(f"theta0 has shape {theta0.shape}, expected ({d},)")

    ks, risks, dists, times = [], [], [], []
    start = time.perf_counter()

    def record(k, theta):
        ks.append(k)
        risks.append(global_objective(problem, theta) - F_star)
        dists.append(np.linalg.norm(theta - theta_star) if theta_star is not None else math.nan)
        times.append(time.perf_counter() - start)
        return config.early_stop_tol is not None and risks[-1] < config.early_stop_tol

    algorithm = config.algorithm
    # overflow on the way to a non-finite iterate is reported as DivergenceError
    with np.errstate(over="ignore", invalid="ignore"):
        if algorithm is Algorithm.CENTRAL_NESTEROV:
            theta = theta0
            for k, theta in enumerate(
                central_nesterov_iterates(problem, beta, schedule.alpha0, config.max_iters, theta0)
            ):
                if record(k, theta):
                    break
        else:
            rng = np.random.default_rng(config.seed)
            state = initial_state(theta0)
            stop = record(0, state.theta_curr)
            while state.k < config.max_iters and not stop:
                state = agma_step(
                    state, schedule, channel, problem, rng, beta,
                    restart_k0=config.restart_k0, topology=algorithm.topology,
                )
                stop = record(state.k, state.theta_curr)
            theta = state.theta_curr

    return RunTrace(
        k=np.asarray(ks),
        excess_risk=np.asarray(risks),
        distance=np.asarray(dists),
        wall_time=np.asarray(times),
        config=config,
        seed=config.seed,
        beta=beta,
        theta_final=np.asarray(theta),
    )


def _run_replication(args):
    config, problem, channel, i = args
    try:
        return run(config, problem, channel).excess_risk
    except AGMAError as exc:
        exc.replication = i
        raise


def _default_workers():
    return max(1, int(os.environ.get("AGMA_WORKERS", "1")))


def monte_carlo(config, problem, channel, replications, workers=None):
    """Average ``replications`` independent runs seeded ``seed + i``.

    Errors from a replication propagate with a ``replication`` attribute set
    to its index. ``workers`` (default: ``$AGMA_WORKERS`` or 1) > 1 runs
    replications in a process pool.
    """
    if replications < 1:
        raise ValueError("replications must be >= 1")
    if config.early_stop_tol is not None:
        raise ValueError("early stopping is not supported inside monte_carlo")
    beta = resolve_beta(config, problem, channel)
    seeds = [config.seed + i for i in range(replications)]
    jobs = [(dataclasses.replace(config, seed=s), problem, channel, i) for i, s in enumerate(seeds)]
    workers = _default_workers() if workers is None else workers
    if workers > 1 and replications > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(_run_replication, jobs))
    else:
        traces = [_run_replication(job) for job in jobs]

    risks = np.vstack(traces)
    mean = risks.mean(axis=0)
    if replications > 1:
        std = risks.std(axis=0, ddof=1)
        std[np.ptp(risks, axis=0) == 0] = 0.0
        half = 1.959963984540054 * std / math.sqrt(replications)
    else:
        std = np.zeros_like(mean)
        half = np.full_like(mean, math.nan)
    return MonteCarloTrace(
        k=np.arange(risks.shape[1]),
        mean=mean,
        ci_halfwidth=half,
        std=std,
        seeds=seeds,
        config=config,
        beta=beta,
    )
