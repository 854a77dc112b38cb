"""Block-fading gains, receiver noise and the two aggregation topologies.

Phases are never simulated: each node pre-rotates its transmission by the
conjugate channel phase, so only the non-negative gain survives at the
receiver.
"""

from __future__ import annotations

import dataclasses
import math
from typing import NamedTuple

import numpy as np

from .exceptions import DimensionError
from .problems import global_gradient, local_gradients

__all__ = [
    "Rayleigh",
    "Uniform",
    "Constant",
    "ChannelModel",
    "ChannelRealization",
    "MomentCheck",
    "sample_realization",
    "mac_aggregate",
    "fdm_aggregate",
    "moment_check",
]

_RAYLEIGH_CV_SQ = (4.0 - math.pi) / math.pi


@dataclasses.dataclass(frozen=True)
class Rayleigh:
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("Rayleigh scale must be positive")

    @property
    def mean(self):
        return self.scale * math.sqrt(math.pi / 2.0)

    @property
    def variance(self):
        return (4.0 - math.pi) / 2.0 * self.scale**2

    def sample(self, rng, size):
        return rng.rayleigh(self.scale, size)


@dataclasses.dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo < 0 or not self.hi > self.lo:
            raise ValueError("Uniform gains need 0 <= lo < hi")

    @property
    def mean(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def variance(self):
        return (self.hi - self.lo) ** 2 / 12.0

    def sample(self, rng, size):
        return rng.uniform(self.lo, self.hi, size)


@dataclasses.dataclass(frozen=True)
class Constant:
    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("constant gain must be positive")

    @property
    def mean(self):
        return float(self.value)

    @property
    def variance(self):
        return 0.0

    def sample(self, rng, size):
        # consume the stream like the random families so seeds stay aligned
        rng.random(size)
        return np.full(size, float(self.value))


@dataclasses.dataclass(frozen=True)
class ChannelModel:
    """Gain law, receiver noise variance and transmit power coefficient.

    ``mu_h`` and ``sigma_h_sq`` must be the exact moments of ``gain`` (checked
    to 1e-12). Prefer the ``rayleigh``/``uniform``/``constant`` constructors,
    which fill them in.
    """

    gain: Rayleigh | Uniform | Constant
    mu_h: float
    sigma_h_sq: float
    sigma_w_sq: float = 1.0
    E_N: float = 1.0

    def __post_init__(self):
        if not self.mu_h > 0:
            raise ValueError("mu_h must be positive")
        if self.sigma_h_sq < 0 or self.sigma_w_sq < 0:
            raise ValueError("variances must be non-negative")
        if not self.E_N > 0:
            raise ValueError("E_N must be positive")
        tol = 1e-12 * max(1.0, abs(self.gain.mean))
        if abs(self.gain.mean - self.mu_h) > tol:
            raise ValueError(f"mu_h={self.mu_h} does not match gain mean {self.gain.mean}")
        tol = 1e-12 * max(1.0, self.gain.variance)
        if abs(self.gain.variance - self.sigma_h_sq) > tol:
            raise ValueError(
                f"sigma_h_sq={self.sigma_h_sq} does not match gain variance {self.gain.variance}"
            )

    @classmethod
    def rayleigh(cls, mu_h=1.0, sigma_w_sq=1.0, E_N=1.0, sigma_h_sq=None):
        """Rayleigh gains scaled to mean ``mu_h``.

        Rayleigh has a fixed coefficient of variation, so an explicit
        ``sigma_h_sq`` is only accepted when it agrees with it.
        """
        gain = Rayleigh(mu_h / math.sqrt(math.pi / 2.0))
        if sigma_h_sq is not None and not math.isclose(
            sigma_h_sq, gain.variance, rel_tol=1e-9, abs_tol=1e-12
        ):
            raise ValueError(
                f"Rayleigh gains with mean {mu_h} have variance {gain.variance:.6g}, "
                f"not {sigma_h_sq}; use a uniform gain law for free (mu_h, sigma_h_sq)"
            )
        return cls(gain, gain.mean, gain.variance, sigma_w_sq, E_N)

    @classmethod
    def uniform(cls, mu_h, sigma_h_sq, sigma_w_sq=1.0, E_N=1.0):
        """Uniform gains with the requested mean and variance."""
        half = math.sqrt(3.0 * sigma_h_sq)
        if sigma_h_sq == 0:
            return cls.constant(mu_h, sigma_w_sq, E_N)
        if mu_h - half < 0:
            raise ValueError(
                f"uniform gains with mean {mu_h} cannot reach variance {sigma_h_sq} "
                f"without negative values (need mu_h >= {half:.6g})"
            )
        gain = Uniform(mu_h - half, mu_h + half)
        return cls(gain, gain.mean, gain.variance, sigma_w_sq, E_N)

    @classmethod
    def constant(cls, value=1.0, sigma_w_sq=0.0, E_N=1.0):
        gain = Constant(value)
        return cls(gain, gain.mean, 0.0, sigma_w_sq, E_N)

    def replace(self, **changes):
        """Copy with ``sigma_w_sq`` / ``E_N`` (or gain fields) changed."""
        return dataclasses.replace(self, **changes)

    @property
    def cv_h(self):
        return math.sqrt(self.sigma_h_sq) / self.mu_h


class ChannelRealization(NamedTuple):
    gains: np.ndarray
    noise: np.ndarray


def sample_realization(model, N, d, rng):
    """Draw one slot's gains (length N) and receiver noise (length d).

    The noise is i.i.d. Gaussian with per-coordinate variance
    ``sigma_w^2 / (N^2 E_N)``.
    """
    if N < 1 or d < 1:
        raise ValueError("N and d must be positive")
    gains = model.gain.sample(rng, N)
    std = math.sqrt(model.sigma_w_sq / (N * N * model.E_N))
    noise = std * rng.standard_normal(d)
    return ChannelRealization(gains, noise)


def _as_grad_matrix(local_grads):
    grads = np.asarray(local_grads, dtype=float)
    if grads.ndim != 2:
        raise DimensionError("local gradients must form an (N, d) array")
    return grads


def mac_aggregate(local_grads, realization):
    """Over-the-air sum: ``(1/N) sum_n h_n g_n + w``."""
    grads = _as_grad_matrix(local_grads)
    N, d = grads.shape
    if realization.gains.shape != (N,):
        raise DimensionError(f"{realization.gains.shape[0]} gains for {N} gradients")
    if realization.noise.shape != (d,):
        raise DimensionError(f"noise length {realization.noise.shape[0]} != d={d}")
    return realization.gains @ grads / N + realization.noise


def fdm_aggregate(local_grads, model, rng):
    """Orthogonal-channel baseline: every node has its own fading and noise.

    Each received copy carries noise of variance ``sigma_w^2 / E_N`` per
    coordinate; the server averages the N copies.
    """
    grads = _as_grad_matrix(local_grads)
    N, d = grads.shape
    gains = model.gain.sample(rng, N)
    std = math.sqrt(model.sigma_w_sq / model.E_N)
    noise = std * rng.standard_normal((N, d))
    return (gains[:, None] * grads + noise).mean(axis=0)


class MomentCheck(NamedTuple):
    """Monte Carlo vs closed-form moments of the aggregated vector.

    ``*_error`` are relative deviations (absolute when the analytic value is
    zero up to rounding); ``*_z`` are deviations measured in Monte Carlo standard errors.
    """

    mean_error: float
    second_moment_error: float
    mean_z: float
    second_moment_z: float
    replications: int


def moment_check(model, problem, z, replications, rng=None, chunk=10_000):
    """Compare Monte Carlo moments of ``v`` at fixed ``z`` with closed forms.

    The analytic moments are ``E[v] = mu_h grad F(z)`` and
    ``E||v||^2 = mu_h^2 ||grad F||^2 + (sigma_h^2/N^2) sum_n ||grad f_n||^2
    + d sigma_w^2 / (E_N N^2)``.
    """
    if replications < 1000:
        raise ValueError("moment_check needs at least 1000 replications")
    rng = np.random.default_rng(rng)
    grads = local_gradients(problem, z)
    N, d = grads.shape
    grad_F = global_gradient(problem, z)
    mean_exact = model.mu_h * grad_F
    second_exact = (
        model.mu_h**2 * grad_F @ grad_F
        + model.sigma_h_sq / N**2 * float(np.sum(grads**2))
        + d * model.sigma_w_sq / (model.E_N * N**2)
    )

    std = math.sqrt(model.sigma_w_sq / (N * N * model.E_N))
    s1 = np.zeros(d)
    s2 = np.zeros(d)
    q1 = q2 = 0.0
    done = 0
    while done < replications:
        m = min(chunk, replications - done)
        gains = model.gain.sample(rng, (m, N))
        v = gains @ grads / N + std * rng.standard_normal((m, d))
        sq = np.sum(v * v, axis=1)
        s1 += v.sum(axis=0)
        s2 += (v * v).sum(axis=0)
        q1 += sq.sum()
        q2 += sq @ sq
        done += m

    R = replications
    mean_mc = s1 / R
    second_mc = q1 / R
    coord_var = np.maximum(s2 / R - mean_mc**2, 0.0) * R / (R - 1)
    sq_var = max(q2 / R - second_mc**2, 0.0) * R / (R - 1)

    mean_dev = mean_mc - mean_exact
    scale = np.linalg.norm(mean_exact)
    # an analytic mean at rounding level of the node gradients counts as zero
    rounding = 1e-10 * model.mu_h * float(np.max(np.linalg.norm(grads, axis=1)))
    if scale > rounding:
        mean_error = float(np.linalg.norm(mean_dev) / scale)
    else:
        mean_error = float(np.linalg.norm(mean_dev))
    second_dev = second_mc - second_exact
    second_error = float(abs(second_dev) / second_exact) if second_exact > 0 else float(abs(second_dev))

    se = np.sqrt(coord_var / R)
    with np.errstate(divide="ignore", invalid="ignore"):
        z_coords = np.where(se > 0, np.abs(mean_dev) / se, np.where(np.abs(mean_dev) > 1e-12 * max(scale, 1.0), np.inf, 0.0))
    se_sq = math.sqrt(sq_var / R)
    if se_sq > 0:
        second_z = abs(second_dev) / se_sq
    else:
        second_z = 0.0 if abs(second_dev) <= 1e-12 * max(second_exact, 1.0) else math.inf
    return MomentCheck(mean_error, second_error, float(np.max(z_coords)), float(second_z), R)
