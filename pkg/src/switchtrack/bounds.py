"""Closed-form regret bounds for tracking experts, with and without memory.

All bounds are in units of the realizability constant ``c`` and use natural
logarithms.  ``n`` experts, horizon ``T``, ``k`` switches and a pool of
``m`` distinct comparator experts.
"""
import math
from dataclasses import dataclass

from .simplex import binary_entropy as H

COLUMNS = ("m", "fixed_share", "mpp_decay", "mpp_uniform", "specialists", "pods")


@dataclass(frozen=True)
class BoundInputs:
    n: int
    T: int
    k: int
    m: int
    c: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two experts")
        if self.T < 2:
            raise ValueError("horizon T must be at least 2")
        if not 0 <= self.k <= self.T - 1:
            raise ValueError("switch count k must lie in [0, T-1]")
        if not 1 <= self.m <= min(self.n, self.k + 1):
            raise ValueError("pool size m must lie in [1, min(n, k+1)]")
        if self.k > 0 and self.m < 2:
            raise ValueError("a sequence with switches visits at least 2 experts")
        if not self.c > 0:
            raise ValueError("c must be positive")


def _xH(x, y):
    """x * H(y / x) with the 0 * H(.) = 0 convention."""
    return 0.0 if x == 0 else x * H(y / x)


def _xlog(x, y):
    """x * ln(y) with 0 * ln(.) = 0."""
    return 0.0 if x == 0 else x * math.log(y)


def _log_binom(a, b):
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def fixed_share_bound(inp):
    n, T, k = inp.n, inp.T, inp.k
    return inp.c * ((k + 1) * math.log(n) + _xH(T - 1, k))


def fixed_share_bound_simplified(inp):
    n, T, k = inp.n, inp.T, inp.k
    return inp.c * ((k + 1) * math.log(n) + _xlog(k, (T - 1) / max(k, 1)) + k)


def ideal_bound(inp):
    """Exact counting bound ``c ln(C(n,m) C(T-1,k) m (m-1)^k)``."""
    n, T, k, m = inp.n, inp.T, inp.k, inp.m
    total = (_log_binom(n, m) + _log_binom(T - 1, k) + math.log(m)
             + _xlog(k, max(m - 1, 1)))
    return inp.c * total


def ideal_bound_upper(inp):
    n, T, k, m = inp.n, inp.T, inp.k, inp.m
    return inp.c * (m * math.log(n) + _xlog(k, (T - 1) / max(k, 1))
                    + (k - m + 1) * math.log(m) + k + m)


def mpp_decay_bound(inp):
    """Power-decay mixing scheme (exponent 1, alpha = k/(T-1)).

    Entropy form; :func:`mpp_decay_bound_simplified` applies
    ``ln(1+x) <= x`` to the no-switch term.
    """
    n, T, k, m = inp.n, inp.T, inp.k, inp.m
    if k == 0:
        return inp.c * m * math.log(n)
    return inp.c * (m * math.log(n) + k * math.log((T - 1) / k) + _xH(T - 1, k)
                    + k * math.log(m - 1) + k * math.log(math.log(math.e * T)))


def mpp_decay_bound_simplified(inp):
    n, T, k, m = inp.n, inp.T, inp.k, inp.m
    if k == 0:
        return inp.c * m * math.log(n)
    return inp.c * (m * math.log(n) + 2 * k * math.log((T - 1) / k)
                    + k * math.log(m - 1) + k + k * math.log(math.log(math.e * T)))


def mpp_uniform_bound(inp):
    """Uniform mixing scheme: each remembered switch pays ``ln(T-1)`` extra."""
    n, T, k, m = inp.n, inp.T, inp.k, inp.m
    return inp.c * (m * math.log(n) + _xH(T - 1, k) + _xlog(k, T - 1))


def specialists_bound(inp):
    """Partition specialists with the Markov prior (entropy form)."""
    n, T, k, m = inp.n, inp.T, inp.k, inp.m
    return inp.c * (m * math.log(n / m) + m * H(1 / m) + _xH(T - 1, k)
                    + _xH((m - 1) * (T - 1), k))


def specialists_bound_simplified(inp):
    n, T, k, m = inp.n, inp.T, inp.k, inp.m
    return inp.c * (m * math.log(n) + 2 * _xlog(k, (T - 1) / max(k, 1))
                    + (k - m + 1) * math.log(m) + 2 * (k + 1))


def pods_bound(inp):
    """Bound shared by PoDS-theta and Share-theta under optimal tuning."""
    n, T, k, m = inp.n, inp.T, inp.k, inp.m
    return inp.c * (m * math.log(n) + _xH(T - 1, k)
                    + _xH((m - 1) * (T - 2), k - m + 1))


def pods_bound_simplified(inp):
    n, T, k, m = inp.n, inp.T, inp.k, inp.m
    r = k - m + 1
    return inp.c * (m * math.log(n) + _xlog(k, (T - 1) / max(k, 1))
                    + _xlog(r, (T - 2) / max(r, 1)) + _xlog(r, max(m - 1, 1))
                    + 2 * k - m + 1)


def optimal_tuning(inp):
    """Return ``(alpha, theta)`` that the PoDS/Share bound assumes."""
    T, k, m = inp.T, inp.k, inp.m
    alpha = k / (T - 1)
    if m < 2 or T <= 2:
        return alpha, 0.0
    return alpha, (k - m + 1) / ((m - 1) * (T - 2))


def figure1_table(n, k, T, c=1.0, m_range=None):
    """Rows of every bound for each pool size ``m`` (default 2..k+1)."""
    if m_range is None:
        m_range = range(min(2, k + 1), k + 2)
    rows = []
    for m in m_range:
        inp = BoundInputs(n=n, T=T, k=k, m=m, c=c)
        rows.append({
            "m": m,
            "fixed_share": fixed_share_bound(inp),
            "mpp_decay": mpp_decay_bound(inp),
            "mpp_uniform": mpp_uniform_bound(inp),
            "specialists": specialists_bound(inp),
            "pods": pods_bound(inp),
        })
    return rows
