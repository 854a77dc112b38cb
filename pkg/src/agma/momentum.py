"""Momentum control sequences and the effective smoothness constant.

The schedule is driven by the recursion

    alpha_{k+1}^2 = (1 - alpha_{k+1}) alpha_k^2 + q alpha_{k+1},   q = mu / L_tilde,

from which the extrapolation weights
``eta_k = alpha_k (1 - alpha_k) / (alpha_{k+1} + alpha_k^2)`` follow.
``q = 0`` gives the merely convex schedule.
"""

from __future__ import annotations

import functools
import math

from .exceptions import ScheduleRangeError, StepsizeRangeError

__all__ = [
    "l_beta_tilde",
    "gamma0",
    "next_alpha",
    "next_alpha_gap",
    "eta_k",
    "lambda_bound",
    "default_alpha0",
    "MomentumSchedule",
    "schedule_for",
]


def l_beta_tilde(beta, mu_h, L):
    """Effective Lipschitz constant ``1 / (beta (2/mu_h - beta L) mu_h^2)``.

    Minimised (and equal to ``L``) at ``beta = 1 / (mu_h L)``.

    Raises
    ------
    StepsizeRangeError
        If ``beta`` is outside ``(0, 2 / (mu_h L))``.
    """
    upper = 2.0 / (mu_h * L)
    if not 0.0 < beta < upper:
        raise StepsizeRangeError(
            f"stepsize out of convergence range: beta={beta} not in (0, {upper})"
        )
    return 1.0 / (beta * (2.0 / mu_h - beta * L) * mu_h**2)


def gamma0(alpha0, L, mu=0.0):
    """Initial estimate-sequence curvature ``alpha0 (alpha0 L - mu) / (1 - alpha0)``.

    In the strongly convex case ``alpha0`` must exceed ``sqrt(mu / L)``, which
    makes the result strictly larger than ``mu``.
    """
    if not 0.0 < alpha0 < 1.0:
        raise ScheduleRangeError(f"alpha0={alpha0} not in (0, 1)")
    if mu > 0 and not alpha0 > math.sqrt(mu / L):
        raise ScheduleRangeError(
            f"alpha0={alpha0} must exceed sqrt(mu/L)={math.sqrt(mu / L)}"
        )
    return alpha0 * (alpha0 * L - mu) / (1.0 - alpha0)


def next_alpha(alpha_k, q):
    """Unique root in (0, 1) of ``a^2 + (alpha_k^2 - q) a - alpha_k^2 = 0``."""
    if not 0.0 < alpha_k <= 1.0:
        raise ScheduleRangeError(f"alpha_k={alpha_k} not in (0, 1]")
    if not 0.0 <= q < 1.0:
        raise ScheduleRangeError(f"q={q} not in [0, 1)")
    a2 = alpha_k * alpha_k
    b = a2 - q
    disc = math.sqrt(b * b + 4.0 * a2)
    # pick the cancellation-free form of the positive root
    root = (disc - b) / 2.0 if b <= 0 else 2.0 * a2 / (b + disc)
    if root <= 0.0:
        root = math.ulp(0.0)
    elif root >= 1.0:
        root = math.nextafter(1.0, 0.0)
    return root


def next_alpha_gap(gap_k, sqrt_q):
    """Advance the gap ``alpha_k - sqrt(q)`` without forming ``alpha_k``.

    Writing ``alpha = s + delta`` with ``s = sqrt(q)`` turns the recursion into
    ``delta^2 + b delta - c = 0`` with ``b = 2s + e(2s + e)`` and
    ``c = (1 - s) e (2s + e)``, where ``e`` is the previous gap. Keeping the gap
    explicit preserves ``alpha_k > sqrt(q)`` after ``alpha_k`` itself has
    rounded onto ``sqrt(q)``.
    """
    if gap_k < 0.0:
        raise ScheduleRangeError(f"gap={gap_k} must be non-negative")
    if gap_k == 0.0:
        # underflowed (or started) at the fixed point alpha = sqrt(q)
        return 0.0
    if not 0.0 < sqrt_q < 1.0:
        raise ScheduleRangeError(f"sqrt_q={sqrt_q} not in (0, 1)")
    e, s = gap_k, sqrt_q
    t = e * (2.0 * s + e)
    b = 2.0 * s + t
    c = (1.0 - s) * t
    return 2.0 * c / (b + math.sqrt(b * b + 4.0 * c))


def eta_k(alpha_k, alpha_next):
    """Extrapolation weight ``alpha_k (1 - alpha_k) / (alpha_next + alpha_k^2)``."""
    if not (0.0 < alpha_k < 1.0 and 0.0 < alpha_next < 1.0):
        raise ScheduleRangeError(f"alphas ({alpha_k}, {alpha_next}) not in (0, 1)")
    return alpha_k * (1.0 - alpha_k) / (alpha_next + alpha_k * alpha_k)


def lambda_bound(k, q, gamma0, L_tilde, strongly_convex):
    """Closed-form upper bound on ``lambda_k = prod_{i<k} (1 - alpha_i)``.

    ``(1 - sqrt(q))^k`` in the strongly convex regime and
    ``4 L_tilde / (2 sqrt(L_tilde) + k sqrt(gamma0))^2`` otherwise.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if strongly_convex:
        return (1.0 - math.sqrt(q)) ** k
    return 4.0 * L_tilde / (2.0 * math.sqrt(L_tilde) + k * math.sqrt(gamma0)) ** 2


def default_alpha0(mu, L):
    """Midpoint of ``(sqrt(mu/L), 1)``; 0.5 when ``mu = 0``."""
    if mu <= 0:
        return 0.5
    return 0.5 * (math.sqrt(mu / L) + 1.0)


class MomentumSchedule:
    """Lazily extended sequences ``alpha_k``, ``lambda_k``, ``gamma_k``, ``eta_k``.

    Parameters
    ----------
    alpha0 : float
        Starting value in (0, 1).
    q : float
        ``mu / L_tilde`` in [0, 1).
    mu : float, optional
        Strong-convexity constant; only enters the ``gamma`` recursion.
    gamma0 : float, optional
        Initial ``gamma``; only used by :meth:`gamma`.
    """

    def __init__(self, alpha0, q, mu=0.0, gamma0=1.0):
        if not 0.0 < alpha0 < 1.0:
            raise ScheduleRangeError(f"alpha0={alpha0} not in (0, 1)")
        if not 0.0 <= q < 1.0:
            raise ScheduleRangeError(f"q={q} not in [0, 1)")
        if q > 0 and not alpha0 > math.sqrt(q):
            raise ScheduleRangeError(f"alpha0={alpha0} must exceed sqrt(q)={math.sqrt(q)}")
        self.alpha0 = alpha0
        self.mu_over_L_tilde = q
        self.mu = mu
        self.sqrt_q = math.sqrt(q)
        # alpha_k - sqrt(q), tracked separately in the strongly convex regime
        self.gaps = [alpha0 - self.sqrt_q] if q > 0 else None
        self.alphas = [alpha0]
        self.lambdas = [1.0]
        self.gammas = [gamma0]
        self._excess = [gamma0 - mu]

    @property
    def q(self):
        return self.mu_over_L_tilde

    @property
    def strongly_convex(self):
        return self.q > 0

    def _extend(self, k):
        while len(self.alphas) <= k:
            a = self.alphas[-1]
            self.lambdas.append((1.0 - a) * self.lambdas[-1])
            # (1 - a) gamma + a mu, written via the excess over mu so gamma never rounds below mu
            self._excess.append((1.0 - a) * self._excess[-1])
            self.gammas.append(self.mu + self._excess[-1])
            if self.gaps is None:
                self.alphas.append(next_alpha(a, self.q))
            else:
                self.gaps.append(next_alpha_gap(self.gaps[-1], self.sqrt_q))
                self.alphas.append(self.sqrt_q + self.gaps[-1])

    def alpha(self, k):
        self._extend(k)
        return self.alphas[k]

    def gap(self, k):
        """``alpha_k - sqrt(q)`` (strongly convex schedules only)."""
        if self.gaps is None:
            raise ScheduleRangeError("gap is only defined for q > 0")
        self._extend(k)
        return self.gaps[k]

    def lam(self, k):
        self._extend(k)
        return self.lambdas[k]

    def gamma(self, k):
        self._extend(k)
        return self.gammas[k]

    def eta(self, k):
        self._extend(k + 1)
        return eta_k(self.alphas[k], self.alphas[k + 1])


@functools.lru_cache(maxsize=256)
def schedule_for(alpha0, q, mu=0.0, gamma0=1.0):
    """Shared, memoised schedule for ``(alpha0, q)``."""
    return MomentumSchedule(alpha0, q, mu, gamma0)
