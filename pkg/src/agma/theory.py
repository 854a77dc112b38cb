"""Closed-form error bounds for accelerated descent over a fading MAC.

Two regimes are covered:

* strongly convex (``mu > 0``): a geometric transient plus a constant
  noise/distortion floor;
* convex (``mu = 0``): an ``O(1/k^2)`` transient valid for
  ``k <= k0 = floor(N^(1 - epsilon))`` plus a floor that vanishes as ``N``
  grows.
"""

from __future__ import annotations

import dataclasses
import math
from typing import NamedTuple

from .exceptions import BoundNotValidError, ScheduleRangeError
from .momentum import gamma0 as _gamma0
from .momentum import l_beta_tilde

__all__ = [
    "BoundInputs",
    "NoiseTerms",
    "delta_N",
    "initial_divergence",
    "theorem1_bound",
    "theorem1_transient",
    "theorem2_bound",
    "theorem2_transient",
    "k0_for",
    "bound_minimizing_k0",
    "decomposition_terms",
    "power_scaling_recommendation",
]


@dataclasses.dataclass(frozen=True)
class BoundInputs:
    """Everything the bounds depend on.

    ``F0_gap`` is ``F(theta_0) - F*`` and ``dist0_sq`` is
    ``||theta_0 - theta*||^2``. ``epsilon`` is the exponent of the convex
    bound, ``k0 = floor(N^(1 - epsilon))``.
    """

    L: float
    mu: float
    mu_h: float
    sigma_h_sq: float
    sigma_w_sq: float
    G: float
    d: int
    N: int
    E_N: float
    beta: float
    alpha0: float
    F0_gap: float
    dist0_sq: float
    epsilon: float = 0.5

    def __post_init__(self):
        for name in ("L", "mu", "mu_h", "sigma_h_sq", "sigma_w_sq", "G", "E_N",
                     "beta", "F0_gap", "dist0_sq"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        # raises StepsizeRangeError outside (0, 2 / (mu_h L))
        l_beta_tilde(self.beta, self.mu_h, self.L)

    @property
    def L_tilde(self):
        return l_beta_tilde(self.beta, self.mu_h, self.L)

    @property
    def gamma0(self):
        return _gamma0(self.alpha0, self.L, self.mu)

    @property
    def k0(self):
        return k0_for(self.N, self.epsilon)

    @classmethod
    def from_problem(cls, problem, channel, beta, alpha0, theta0=None, epsilon=0.5):
        """Collect inputs from a problem with constants and a channel model."""
        import numpy as np

        from .problems import global_objective

        c = problem.require_constants()
        theta0 = np.zeros(problem.dimension) if theta0 is None else np.asarray(theta0, dtype=float)
        return cls(
            L=c.L, mu=c.mu, mu_h=channel.mu_h, sigma_h_sq=channel.sigma_h_sq,
            sigma_w_sq=channel.sigma_w_sq, G=c.G, d=problem.dimension,
            N=problem.n_nodes, E_N=channel.E_N, beta=beta, alpha0=alpha0,
            F0_gap=max(global_objective(problem, theta0) - c.F_star, 0.0),
            dist0_sq=float(np.sum((theta0 - c.theta_star) ** 2)),
            epsilon=epsilon,
        )


def delta_N(inputs):
    """Per-iteration noise/distortion increment
    ``(beta/mu_h) (sigma_h^2 G / N + d sigma_w^2 / (E_N N^2))``."""
    x = inputs
    return x.beta / x.mu_h * (x.sigma_h_sq * x.G / x.N + x.d * x.sigma_w_sq / (x.E_N * x.N**2))


def initial_divergence(inputs):
    """``F(theta_0) - F* + (gamma_0 / 2) ||theta_0 - theta*||^2``."""
    return inputs.F0_gap + 0.5 * inputs.gamma0 * inputs.dist0_sq


def _check_strongly_convex(inputs):
    if inputs.mu <= 0:
        raise BoundNotValidError("mu = 0: the problem is not strongly convex, use theorem2_bound")
    if not math.sqrt(inputs.mu / inputs.L) < inputs.alpha0 < 1.0:
        raise ScheduleRangeError(
            f"alpha0={inputs.alpha0} not in (sqrt(mu/L), 1) = ({math.sqrt(inputs.mu / inputs.L)}, 1)"
        )


def theorem1_transient(inputs, k):
    _check_strongly_convex(inputs)
    rate = 1.0 - math.sqrt(inputs.mu / inputs.L_tilde)
    return rate**k * initial_divergence(inputs)


def theorem1_bound(inputs, k):
    """Strongly convex bound on ``E[F(theta_k)] - F*``.

    ``(1 - sqrt(mu/L_tilde))^k * initial_divergence + sqrt(L_tilde/mu) * delta_N``.
    """
    floor = math.sqrt(inputs.L_tilde / inputs.mu) * delta_N(inputs) if inputs.mu > 0 else 0.0
    return theorem1_transient(inputs, k) + floor


def k0_for(N, epsilon):
    """``floor(N^(1 - epsilon))``, guarded against rounding just below an integer."""
    raw = N ** (1.0 - epsilon)
    return int(math.floor(raw + 1e-9 * max(raw, 1.0)))


def _check_convex(inputs):
    if not 0.0 < inputs.alpha0 < 1.0:
        raise ScheduleRangeError(f"alpha0={inputs.alpha0} not in (0, 1)")


def _convex_gamma0(inputs):
    return inputs.alpha0**2 * inputs.L / (1.0 - inputs.alpha0)


def theorem2_transient(inputs, k):
    _check_convex(inputs)
    Lt = inputs.L_tilde
    g0 = _convex_gamma0(inputs)
    lam = 4.0 * Lt / (2.0 * math.sqrt(Lt) + k * math.sqrt(g0)) ** 2
    return lam * (inputs.F0_gap + 0.5 * g0 * inputs.dist0_sq)


def _convex_floor(inputs):
    x = inputs
    eps = x.epsilon
    return x.beta / x.mu_h * (
        x.sigma_h_sq * x.G / x.N**eps + x.d * x.sigma_w_sq / (x.E_N * x.N ** (1.0 + eps))
    )


def theorem2_bound(inputs, k):
    """Convex bound on ``E[F(theta_k)] - F*`` for ``0 <= k <= k0``.

    ``4 L_tilde / (2 sqrt(L_tilde) + k sqrt(gamma0))^2 * initial_divergence
    + (beta/mu_h) (sigma_h^2 G / N^eps + d sigma_w^2 / (E_N N^(1+eps)))``,
    with ``gamma0 = alpha0^2 L / (1 - alpha0)``.

    Raises
    ------
    BoundNotValidError
        If ``k > k0``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > inputs.k0:
        raise BoundNotValidError(f"bound not valid beyond k0={inputs.k0} (k={k})")
    return theorem2_transient(inputs, k) + _convex_floor(inputs)


def bound_minimizing_k0(inputs, max_k):
    """``k0`` in ``[1, max_k]`` minimising ``transient(k0) + k0 * delta_N``.

    This is the convex bound evaluated at ``k = k0`` with ``epsilon`` chosen so
    that ``N^(1 - epsilon) = k0``.
    """
    dn = delta_N(inputs)
    best_k, best = 1, math.inf
    for k in range(1, max(1, max_k) + 1):
        value = theorem2_transient(inputs, k) + k * dn
        if value < best:
            best_k, best = k, value
    return best_k


class NoiseTerms(NamedTuple):
    """Distortion term ``t2``, noise term ``t3``, ``CV_h`` and ``SNR_N``.

    ``snr_n`` is ``inf`` (and ``noise_free`` True) when ``sigma_w^2 = 0``.
    """

    t2: float
    t3: float
    cv_h: float
    snr_n: float
    noise_free: bool


def decomposition_terms(inputs, strongly_convex=None):
    """Split the bound floor into fading distortion and receiver noise."""
    x = inputs
    if strongly_convex is None:
        strongly_convex = x.mu > 0
    if strongly_convex:
        if x.mu <= 0:
            raise BoundNotValidError("strongly convex terms need mu > 0")
        factor = math.sqrt(x.L_tilde / x.mu) * x.beta / x.mu_h
        t2 = factor * x.sigma_h_sq * x.G / x.N
        t3 = factor * x.d * x.sigma_w_sq / (x.E_N * x.N**2)
    else:
        factor = x.beta / x.mu_h
        t2 = factor * x.sigma_h_sq * x.G / x.N**x.epsilon
        t3 = factor * x.d * x.sigma_w_sq / (x.E_N * x.N ** (1.0 + x.epsilon))
    cv_h = math.sqrt(x.sigma_h_sq) / x.mu_h
    noise_free = x.sigma_w_sq == 0
    snr = math.inf if noise_free else x.E_N / x.sigma_w_sq
    return NoiseTerms(t2, t3, cv_h, snr, noise_free)


def power_scaling_recommendation(N, epsilon, regime="strongly_convex"):
    """Power coefficient pivot: ``N^(eps - 2)`` (strongly convex) or
    ``N^(-1 - eps)`` (convex), with unit constant."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if regime in ("strongly_convex", "strong"):
        return float(N) ** (epsilon - 2.0)
    if regime == "convex":
        return float(N) ** (-1.0 - epsilon)
    raise ValueError(f"unknown regime {regime!r}")
