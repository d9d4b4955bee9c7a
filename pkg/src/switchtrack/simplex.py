"""Probability-simplex helpers and information-theoretic primitives.

Vectors are plain float64 numpy arrays; the ``as_*`` functions validate
and return a read-only copy so downstream code can rely on the invariants.
All logarithms are natural.
"""
import math

import numpy as np

SUM_TOL = 1e-9
RENORM_TOL = 1e-6


class SimplexError(ValueError):
    """Raised when a vector violates a simplex / lower-bound invariant."""


def _as_float_array(values, name="vector"):
    x = np.array(values, dtype=np.float64)
    if x.ndim != 1:
        raise SimplexError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(x)):
        raise SimplexError(f"{name} contains NaN or Inf")
    return x


def _frozen(x):
    x.setflags(write=False)
    return x


def as_simplex(values, name="w"):
    """Validate ``values`` as a point of the probability simplex.

    Sums within ``SUM_TOL`` of one are accepted as they are, sums within
    ``RENORM_TOL`` are renormalized and anything further off is rejected.
    """
    x = _as_float_array(values, name)
    if x.size < 2:
        raise SimplexError(f"{name} needs at least 2 components")
    if np.any(x < 0):
        raise SimplexError(f"{name} has negative components")
    s = x.sum()
    if abs(s - 1.0) > RENORM_TOL:
        raise SimplexError(f"{name} sums to {s!r}, not 1")
    if abs(s - 1.0) > SUM_TOL:
        x = x / s
    return _frozen(x)


def as_interior(values, name="w"):
    x = as_simplex(values, name)
    if np.any(x <= 0):
        raise SimplexError(f"{name} must be strictly positive")
    return x


def as_lower_bounds(values, name="beta", total=None):
    """Validate a lower-bound vector with entries in (0, 1) and sum <= 1.

    With ``total`` given the sum must also match it within ``SUM_TOL``.
    """
    b = _as_float_array(values, name)
    if b.size < 2:
        raise SimplexError(f"{name} needs at least 2 components")
    if np.any(b <= 0) or np.any(b >= 1):
        raise SimplexError(f"{name} entries must lie in (0, 1)")
    s = b.sum()
    if s > 1.0 + 1e-12:
        raise SimplexError(f"infeasible: sum({name})>1")
    if total is not None and abs(s - total) > SUM_TOL:
        raise SimplexError(f"sum({name})={s!r} differs from {total!r}")
    return _frozen(b)


def uniform(n):
    return _frozen(np.full(n, 1.0 / n))


def normalize(values):
    """Scale a non-negative vector so it sums to one."""
    x = _as_float_array(values, "values")
    if np.any(x < 0):
        raise SimplexError("values must be non-negative")
    s = x.sum()
    if not s > 0:
        raise SimplexError("degenerate: all-zero input cannot be normalized")
    return _frozen(x / s)


def xlogy(x, y):
    """Elementwise ``x * ln(y)`` with the 0 * ln(.) = 0 convention."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    out = np.zeros(np.broadcast(x, y).shape)
    nz = np.broadcast_to(x != 0, out.shape)
    with np.errstate(divide="ignore"):
        out[nz] = (np.broadcast_to(x, out.shape)[nz]
                   * np.log(np.broadcast_to(y, out.shape)[nz]))
    return out


def kl_divergence(u, w):
    """Relative entropy D(u || w) in nats, for interior ``w``."""
    u = as_simplex(u, "u")
    w = as_interior(w, "w")
    if u.shape != w.shape:
        raise SimplexError("dimension mismatch")
    mask = u > 0
    d = float(np.sum(u[mask] * (np.log(u[mask]) - np.log(w[mask]))))
    return max(d, 0.0)


def binary_entropy(p):
    """H(p) = -p ln p - (1-p) ln(1-p); zero at both endpoints."""
    p = float(p)
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"binary entropy needs p in [0, 1], got {p!r}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log1p(-p)


def l1_distance(a, b):
    return float(np.abs(np.asarray(a) - np.asarray(b)).sum())
