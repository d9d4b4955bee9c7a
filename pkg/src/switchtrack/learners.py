"""Per-trial updates for the expert-tracking learners.

Every learner state is an immutable value; a ``*_step`` function consumes
a state together with the expert losses of one trial and returns the next
state.  The loss update is carried out in log space so that large
``eta * loss`` values do not underflow.
"""
from dataclasses import dataclass, field, replace

import numpy as np

from .projection import project
from .schemes import MixingScheme, scheme_weights
from .simplex import SimplexError, as_simplex, uniform


class NumericalError(ArithmeticError):
    """A learner update produced non-finite or fully underflowed weights."""


def _frozen(x):
    x = np.asarray(x, dtype=np.float64)
    x.setflags(write=False)
    return x


def _check_unit(name, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


def _losses(losses, n):
    ell = np.asarray(losses, dtype=np.float64)
    if ell.shape != (n,):
        raise ValueError(f"expected {n} losses, got shape {ell.shape}")
    if not np.all(np.isfinite(ell)):
        raise ValueError("losses must be finite")
    return ell


def loss_update(w, losses, eta):
    """Exponential-weights posterior ``w_i exp(-eta l_i) / Z``."""
    w = np.asarray(w, dtype=np.float64)
    ell = _losses(losses, w.size)
    if eta < 0:
        raise ValueError("eta must be non-negative")
    with np.errstate(divide="ignore"):
        logw = np.log(w) - eta * ell
    top = logw.max()
    if not np.isfinite(top):
        raise NumericalError("all expert weights underflowed to zero")
    v = np.exp(logw - top)
    return _frozen(v / v.sum())


def fixed_share_update(w_hat, alpha):
    """Mix ``alpha`` of the mass back towards the uniform vector."""
    _check_unit("alpha", alpha)
    w_hat = np.asarray(w_hat, dtype=np.float64)
    return _frozen((1.0 - alpha) * w_hat + alpha / w_hat.size)


def predict(w, expert_predictions):
    """Weighted-average prediction ``w . x``."""
    w = np.asarray(w, dtype=np.float64)
    x = np.asarray(expert_predictions, dtype=np.float64)
    if w.shape != x.shape:
        raise ValueError("dimension mismatch between weights and predictions")
    return float(w @ x)


# -- states ------------------------------------------------------------------

@dataclass(frozen=True)
class EwState:
    w: np.ndarray

    @classmethod
    def initial(cls, n):
        return cls(uniform(n))


@dataclass(frozen=True)
class FixedShareState:
    w: np.ndarray
    alpha: float

    @classmethod
    def initial(cls, n, alpha):
        _check_unit("alpha", alpha)
        return cls(uniform(n), alpha)


@dataclass(frozen=True)
class PodsState:
    w: np.ndarray
    beta: np.ndarray
    alpha: float
    theta: float

    @classmethod
    def initial(cls, n, alpha, theta):
        _check_unit("alpha", alpha)
        _check_unit("theta", theta)
        return cls(uniform(n), _frozen(np.full(n, alpha / n)), alpha, theta)


@dataclass(frozen=True)
class ShareState:
    w: np.ndarray
    v: np.ndarray
    alpha: float
    theta: float

    @classmethod
    def initial(cls, n, alpha, theta):
        _check_unit("alpha", alpha)
        _check_unit("theta", theta)
        return cls(uniform(n), uniform(n), alpha, theta)


@dataclass(frozen=True)
class SpecialistState:
    """Awake (``a``) and asleep (``s``) mass per expert under a Markov prior."""

    a: np.ndarray
    s: np.ndarray
    p_ws: float
    p_sw: float
    pi_w: float

    @property
    def p_ww(self):
        return 1.0 - self.p_ws

    @property
    def p_ss(self):
        return 1.0 - self.p_sw

    @property
    def pi_s(self):
        return 1.0 - self.pi_w

    @property
    def w(self):
        return _frozen(self.a / self.a.sum())

    @classmethod
    def initial(cls, n, p_ws, p_sw, pi_w):
        for name, val in (("p_ws", p_ws), ("p_sw", p_sw)):
            _check_unit(name, val)
        if not 0.0 < pi_w < 1.0:
            raise ValueError("pi_w must lie in (0, 1)")
        return cls(_frozen(np.full(n, pi_w / n)),
                   _frozen(np.full(n, (1.0 - pi_w) / n)), p_ws, p_sw, pi_w)

    @classmethod
    def from_share_params(cls, n, alpha, theta):
        """Markov prior that reproduces Share-theta(alpha, theta)."""
        if not (0.0 < alpha < 1.0 and 0.0 < theta < 1.0):
            raise ValueError("the Share-theta mapping needs 0 < alpha, theta < 1")
        return cls.initial(n, p_ws=alpha, p_sw=theta,
                           pi_w=theta / (alpha + theta))


@dataclass(frozen=True)
class MppState:
    """Explicit mixture over every stored posterior (O(n t) memory)."""

    w: np.ndarray
    scheme: MixingScheme
    history: tuple = field(default=())

    @classmethod
    def initial(cls, n, scheme):
        u = uniform(n)
        return cls(u, scheme, (u,))


# -- steps --------------------------------------------------------------------

def ew_step(state, losses, eta):
    return EwState(loss_update(state.w, losses, eta))


def fixed_share_step(state, losses, eta):
    w_hat = loss_update(state.w, losses, eta)
    return replace(state, w=fixed_share_update(w_hat, state.alpha))


def pods_step(state, losses, eta):
    w_hat = loss_update(state.w, losses, eta)
    # alpha = 0 leaves no constraint: the step is plain exponential weights
    w_next = project(w_hat, state.beta).p if state.alpha > 0 else w_hat
    beta = (1.0 - state.theta) * state.beta + state.theta * state.alpha * w_hat
    return replace(state, w=w_next, beta=_frozen(beta))


def share_step(state, losses, eta):
    w_hat = loss_update(state.w, losses, eta)
    a, th = state.alpha, state.theta
    w_next = (1.0 - a) * w_hat + a * state.v
    # v mixes in the pre-share posterior, not w_next
    v_next = (1.0 - th) * state.v + th * w_hat
    return replace(state, w=_frozen(w_next), v=_frozen(v_next))


def specialists_step(state, losses, eta):
    awake = state.a.sum()
    moved = awake * loss_update(state.a / awake, losses, eta)
    a = state.p_ww * moved + state.p_sw * state.s
    s = state.p_ws * moved + state.p_ss * state.s
    return replace(state, a=_frozen(a), s=_frozen(s))


def mpp_step(state, losses, eta):
    w_hat = loss_update(state.w, losses, eta)
    history = state.history + (w_hat,)
    g = scheme_weights(state.scheme, len(history) - 1)
    if abs(g.sum() - 1.0) > 1e-9:
        raise ValueError("mixing weights do not sum to one")
    w_next = g @ np.vstack(history)
    return replace(state, w=_frozen(w_next), history=history)


_STEPS = {
    EwState: ew_step,
    FixedShareState: fixed_share_step,
    PodsState: pods_step,
    ShareState: share_step,
    SpecialistState: specialists_step,
    MppState: mpp_step,
}


def step(state, losses, eta):
    """Advance any learner state by one trial."""
    return _STEPS[type(state)](state, losses, eta)


def posterior(state, losses, eta):
    """The loss-updated weights of a trial, before sharing or projection."""
    return loss_update(state.w, losses, eta)


def check_state(state, tol=1e-9):
    """Raise :class:`SimplexError` if the state drifted off its invariants."""
    if isinstance(state, SpecialistState):
        if abs(state.a.sum() - state.pi_w) > tol or abs(state.s.sum() - state.pi_s) > tol:
            raise SimplexError("specialist masses are no longer conserved")
        return
    if abs(state.w.sum() - 1.0) > tol or np.any(state.w < 0):
        raise SimplexError("weights left the simplex")
    as_simplex(state.w)
    if isinstance(state, PodsState) and abs(state.beta.sum() - state.alpha) > tol:
        raise SimplexError("PoDS lower bounds no longer sum to alpha")
