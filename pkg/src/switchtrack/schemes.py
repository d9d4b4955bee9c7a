"""Mixing schemes over past posteriors.

A scheme assigns, on trial ``t``, a distribution ``gamma_0 .. gamma_t`` over
the posteriors seen so far (index 0 being the uniform vector).  All three
kinds here put ``1 - alpha`` on the current posterior.
"""
from dataclasses import dataclass

import numpy as np

KINDS = ("uniform", "power_decay", "geometric")

# running powers are re-anchored with an exact pow() this often
_POWER_REFRESH = 64


@dataclass(frozen=True)
class MixingScheme:
    kind: str
    alpha: float
    theta: float = 0.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown mixing scheme {self.kind!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")
        if self.exponent < 0:
            raise ValueError("decay exponent must be non-negative")

    @classmethod
    def uniform(cls, alpha):
        return cls("uniform", alpha)

    @classmethod
    def power_decay(cls, alpha, exponent=1.0):
        return cls("power_decay", alpha, exponent=exponent)

    @classmethod
    def geometric(cls, alpha, theta):
        return cls("geometric", alpha, theta=theta)


def _decay_powers(base, count):
    """base**0 .. base**(count-1) by running products, re-anchored periodically."""
    out = np.empty(count)
    acc = 1.0
    for j in range(count):
        if j % _POWER_REFRESH == 0:
            acc = base ** j
        out[j] = acc
        acc *= base
    return out


def scheme_weights(scheme, t):
    """Return ``(gamma_0, ..., gamma_t)`` for trial ``t >= 1``."""
    t = int(t)
    if t < 1:
        raise ValueError("mixing weights are defined for t >= 1")
    a = scheme.alpha
    g = np.empty(t + 1)
    g[t] = 1.0 - a
    if scheme.kind == "uniform":
        g[:t] = a / t
    elif scheme.kind == "power_decay":
        dist = np.arange(t, 0, -1, dtype=np.float64)  # t - q for q = 0..t-1
        decay = dist ** (-scheme.exponent)
        g[:t] = a * decay / decay.sum()
    else:
        th = scheme.theta
        # (1-theta)^(t-q-1) for q = 0..t-1, i.e. reversed powers 0..t-1
        powers = _decay_powers(1.0 - th, t)[::-1]
        g[1:t] = th * powers[1:] * a
        g[0] = powers[0] * a
    return g


def beta_from_scheme(history, scheme):
    """Componentwise ``max_q gamma_q * w_hat_q`` over the stored posteriors.

    ``history`` holds ``w_hat_0 .. w_hat_t`` with ``t >= 1``; the result is
    the lower-bound vector of the projection form of mixing past posteriors.
    """
    H = np.asarray(history, dtype=np.float64)
    if H.ndim != 2 or H.shape[0] < 2:
        raise ValueError("history must hold at least w_hat_0 and w_hat_1")
    g = scheme_weights(scheme, H.shape[0] - 1)
    return (g[:, None] * H).max(axis=0)
