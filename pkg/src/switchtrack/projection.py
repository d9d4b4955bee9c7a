"""Relative entropy projection onto the simplex with lower box constraints.

Given an interior point ``w`` and lower bounds ``beta`` (sum <= 1), the
projection ``p`` has the form ``p_i = max(beta_i, lam * w_i)``: the indices
with the smallest ratios ``w_i / beta_i`` are clamped to their bounds and
the rest are rescaled by a single factor ``lam <= 1``.  :func:`project`
locates the clamping threshold with a median search in worst-case O(n);
:func:`project_oracle` sorts the ratios instead and serves as a check.
"""
from dataclasses import dataclass

import numpy as np

from .selection import Counter, median
from .simplex import SimplexError, as_interior, as_lower_bounds

__all__ = [
    "ProjectionResult", "Counter", "project", "project_oracle",
    "verify_kkt_form", "candidate_from_bound_set",
]

_DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class ProjectionResult:
    p: np.ndarray
    bound_set: frozenset
    lam: float
    threshold: float

    def to_dict(self):
        return {
            "p": [float(v) for v in self.p],
            "bound_set": sorted(int(i) for i in self.bound_set),
            "lambda": float(self.lam),
            "threshold": float(self.threshold),
        }


def _validate(w, beta):
    w = as_interior(w, "w")
    beta = as_lower_bounds(beta, "beta")
    if w.shape != beta.shape:
        raise SimplexError("dimension mismatch between w and beta")
    return w, beta


def _degenerate(beta):
    # sum(beta) == 1: the feasible set is the single point beta
    p = beta.copy()
    p.setflags(write=False)
    return ProjectionResult(p, frozenset(range(beta.size)), 1.0, np.inf)


def _assemble(w, beta, bound_mask, threshold):
    s_beta = float(beta[bound_mask].sum())
    s_w = float(w[bound_mask].sum())
    lam = (1.0 - s_beta) / (1.0 - s_w)
    p = np.where(bound_mask, beta, lam * w)
    p.setflags(write=False)
    bound = frozenset(np.flatnonzero(bound_mask).tolist())
    return ProjectionResult(p, bound, lam, float(threshold))


def project(w, beta, counter=None):
    """Project ``w`` onto ``{x in simplex : x >= beta}`` in O(n) time.

    ``counter`` (a :class:`Counter`) accumulates the element comparisons
    made by the threshold search, including the median selections.
    """
    w, beta = _validate(w, beta)
    if beta.sum() >= 1.0 - _DEGENERATE_TOL:
        return _degenerate(beta)
    r = w / beta
    n = r.size
    idx = np.arange(n)
    s_w = 0.0
    s_beta = 0.0
    phi = np.inf
    while idx.size:
        rw = r[idx]
        phi = median(rw, counter)
        lo = rw < phi
        eq = rw == phi
        hi = rw > phi
        if counter is not None:
            counter.add(3 * idx.size)
        l_beta = float(beta[idx[lo]].sum())
        l_w = float(w[idx[lo]].sum())
        lam = (1.0 - s_beta - l_beta) / (1.0 - s_w - l_w)
        if phi * lam < 1.0:
            if not hi.any():
                larger = r[r > phi]
                if counter is not None:
                    counter.add(n)
                if larger.size == 0:
                    # Only reachable through rounding: keep the tied block
                    # unclamped so the normalizer stays well defined.
                    s_w += l_w
                    s_beta += l_beta
                    break
                phi = float(larger.min())
            s_w += l_w + float(w[idx[eq]].sum())
            s_beta += l_beta + float(beta[idx[eq]].sum())
            idx = idx[hi]
        else:
            idx = idx[lo]
    return _assemble(w, beta, r < phi, phi)


def project_oracle(w, beta):
    """Sort-based O(n log n) projection used to cross-check :func:`project`.

    Ratios are sorted ascending and the clamped set grows one prefix at a
    time until the rescaled remainder respects every bound.
    """
    w, beta = _validate(w, beta)
    if beta.sum() >= 1.0 - _DEGENERATE_TOL:
        return _degenerate(beta)
    r = w / beta
    order = np.argsort(r, kind="stable")
    rs = r[order]
    cw = np.concatenate(([0.0], np.cumsum(w[order])))
    cb = np.concatenate(([0.0], np.cumsum(beta[order])))
    n = r.size
    for k in range(n):
        lam = (1.0 - cb[k]) / (1.0 - cw[k])
        # the smallest unclamped ratio is rs[k]; it must clear its bound
        if lam * rs[k] >= 1.0:
            mask = np.zeros(n, dtype=bool)
            mask[order[:k]] = True
            return _assemble(w, beta, mask, rs[k])
    raise AssertionError("no feasible bound set; inputs violate sum(beta) < 1")


def candidate_from_bound_set(w, beta, bound_set):
    """The vector obtained by clamping ``bound_set`` and rescaling the rest.

    Returns ``None`` when every index is clamped or the scale is not
    positive.
    """
    w = np.asarray(w, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    mask = np.zeros(w.size, dtype=bool)
    mask[list(bound_set)] = True
    rest = 1.0 - w[mask].sum()
    if mask.all() or rest <= 0:
        return None
    lam = (1.0 - beta[mask].sum()) / rest
    if lam <= 0:
        return None
    return np.where(mask, beta, lam * w)


def verify_kkt_form(w, beta, p, tol=1e-9):
    """Check that ``p`` is the projection of ``w`` via the optimality form.

    True iff ``p`` is feasible, sums to one and equals
    ``max(beta_i, lam * w_i)`` for one common ``lam <= 1``.
    """
    try:
        w = np.asarray(w, dtype=np.float64)
        beta = np.asarray(beta, dtype=np.float64)
        p = np.asarray(p, dtype=np.float64)
        if not (w.shape == beta.shape == p.shape) or w.ndim != 1:
            return False
        if not (np.all(np.isfinite(p)) and np.all(w > 0)):
            return False
    except (TypeError, ValueError):
        return False
    if abs(p.sum() - 1.0) > tol or np.any(p < beta - tol):
        return False
    free = p > beta + tol
    if not free.any():
        return True
    ratios = p[free] / w[free]
    lam = float(ratios.mean())
    if np.max(np.abs(ratios - lam)) > tol * max(1.0, lam):
        return False
    if lam > 1.0 + tol:
        return False
    # clamped coordinates must not want to sit above their bound
    return bool(np.all(lam * w[~free] <= beta[~free] + tol))
