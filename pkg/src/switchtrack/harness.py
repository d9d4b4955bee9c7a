"""Synthetic switching sequences, experiment runner and metrics."""
import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import learners as L
from .bounds import BoundInputs, optimal_tuning, pods_bound
from .projection import project
from .schemes import MixingScheme
from .simplex import as_interior, l1_distance

log = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy.random.Generator(PCG64)"
CLIP = 1e-3
LEARNERS = ("ew", "fixed_share", "share", "pods", "specialists", "mpp")


@dataclass(frozen=True)
class ComparatorSequence:
    ids: np.ndarray
    n: int
    k: int
    m: int

    @property
    def T(self):
        return int(self.ids.size)


def count_switches(ids):
    ids = np.asarray(ids)
    return int(np.count_nonzero(ids[1:] != ids[:-1]))


def generate_comparator(n, T, k, m, seed):
    """Random comparator with exactly ``k`` switches over ``m`` experts.

    Switch positions are drawn without replacement from ``1..T-1``.  The
    first ``m - 1`` switches introduce the remaining pool members; each
    later switch revisits a pool member other than the current one,
    uniformly at random.
    """
    if T < 1 or not 0 <= k <= T - 1:
        raise ValueError(f"infeasible switch count k={k} for T={T}")
    if not 1 <= m <= min(n, k + 1):
        raise ValueError(f"infeasible pool size m={m} for n={n}, k={k}")
    if k > 0 and m < 2:
        raise ValueError("switches need a pool of at least two experts")
    rng = np.random.default_rng(seed)
    pool = [int(e) for e in rng.choice(n, size=m, replace=False)]
    switch_at = np.sort(rng.choice(np.arange(1, T), size=k, replace=False)).tolist() if k else []
    segment_experts = pool[:1]
    for j in range(1, k + 1):
        if j < m:
            segment_experts.append(pool[j])
        else:
            others = [e for e in pool if e != segment_experts[-1]]
            segment_experts.append(others[int(rng.integers(len(others)))])
    ids = np.empty(T, dtype=np.int64)
    bounds = [0, *switch_at, T]
    for j, e in enumerate(segment_experts):
        ids[bounds[j]:bounds[j + 1]] = e
    ids.setflags(write=False)
    return ComparatorSequence(ids, n, k, m)


# -- loss models --------------------------------------------------------------

@dataclass(frozen=True)
class LossModel:
    kind: str

    def __post_init__(self):
        if self.kind not in ("log_loss", "square_loss", "mix_loss"):
            raise ValueError(f"unknown loss model {self.kind!r}")

    @property
    def c(self):
        return 0.5 if self.kind == "square_loss" else 1.0

    @property
    def eta(self):
        return 1.0 / self.c

    def loss(self, prediction, y):
        if self.kind == "log_loss":
            return -math.log(prediction if y == 1 else 1.0 - prediction)
        if self.kind == "square_loss":
            return (prediction - y) ** 2
        raise ValueError("mix loss has no prediction; use mix_loss()")

    def expert_losses(self, predictions, y):
        x = np.asarray(predictions, dtype=np.float64)
        if self.kind == "log_loss":
            return -np.log(np.where(y == 1, x, 1.0 - x))
        return (x - y) ** 2

    def learner_prediction(self, w, x):
        if self.kind == "square_loss":
            return square_substitution(w, x, self.eta)
        return L.predict(w, x)


def square_loss(prediction, y):
    return (prediction - y) ** 2


def mix_loss(w, losses):
    """``-ln sum_i w_i exp(-l_i)``, computed stably."""
    w = np.asarray(w, dtype=np.float64)
    ell = np.asarray(losses, dtype=np.float64)
    lo = ell.min()
    return float(lo - np.log(np.sum(w * np.exp(-(ell - lo)))))


def square_substitution(w, x, eta=2.0):
    """Prediction in [0, 1] that makes the square loss (1/2, 2)-realizable.

    The weighted average is only exp-concave for eta <= 1/2, so the
    generalized prediction is built from the two mixability levels
    ``g(y) = -(1/eta) ln sum_i w_i exp(-eta (x_i - y)^2)``.
    """
    x = np.asarray(x, dtype=np.float64)
    g0 = mix_loss(w, eta * x ** 2) / eta
    g1 = mix_loss(w, eta * (1.0 - x) ** 2) / eta
    return float(np.clip(0.5 + (g0 - g1) / 2.0, 0.0, 1.0))


@dataclass(frozen=True)
class LossStream:
    """Per-trial expert losses, plus predictions/outcomes when they exist."""

    losses: np.ndarray
    predictions: np.ndarray = None
    outcomes: np.ndarray = None


def generate_losses(comparator, n, loss_model, noise, seed):
    """Stochastic stream in which the comparator expert is right more often.

    On every trial the comparator expert is correct with probability
    ``1 - noise`` and every other expert with probability 1/2.  Binary
    predictions are clipped to ``[CLIP, 1 - CLIP]``; the mix loss uses 0/1
    losses directly.
    """
    if not 0.0 <= noise < 0.5:
        raise ValueError("noise must lie in [0, 0.5)")
    rng = np.random.default_rng(seed)
    T = comparator.T
    correct = rng.random((T, n)) < 0.5
    rows = np.arange(T)
    correct[rows, comparator.ids] = rng.random(T) >= noise
    if loss_model.kind == "mix_loss":
        return LossStream(np.where(correct, 0.0, 1.0))
    y = rng.integers(0, 2, size=T)
    guess = np.where(correct, y[:, None], 1 - y[:, None]).astype(np.float64)
    x = np.clip(guess, CLIP, 1.0 - CLIP)
    losses = np.vstack([loss_model.expert_losses(x[t], y[t]) for t in range(T)])
    return LossStream(losses, x, y)


# -- experiments --------------------------------------------------------------

@dataclass(frozen=True)
class LearnerSpec:
    kind: str
    alpha: float = 0.0
    theta: float = 0.0
    scheme: str = "geometric"
    exponent: float = 1.0

    def __post_init__(self):
        if self.kind not in LEARNERS:
            raise ValueError(f"unknown learner {self.kind!r}")

    def initial_state(self, n):
        if self.kind == "ew":
            return L.EwState.initial(n)
        if self.kind == "fixed_share":
            return L.FixedShareState.initial(n, self.alpha)
        if self.kind == "share":
            return L.ShareState.initial(n, self.alpha, self.theta)
        if self.kind == "pods":
            return L.PodsState.initial(n, self.alpha, self.theta)
        if self.kind == "specialists":
            return L.SpecialistState.from_share_params(n, self.alpha, self.theta)
        scheme = MixingScheme(self.scheme, self.alpha, theta=self.theta,
                              exponent=self.exponent)
        return L.MppState.initial(n, scheme)


@dataclass
class ExperimentResult:
    learner_loss: np.ndarray
    comparator_loss: np.ndarray
    l1_update_cost: np.ndarray
    regret: float
    bound: float
    params: dict = field(default_factory=dict)

    def summary(self, full=False):
        out = {"params": self.params, "regret": self.regret, "bound": self.bound,
               "ok": bool(self.regret <= self.bound)}
        if full:
            out["per_trial"] = [
                {"learner_loss": a, "comparator_loss": b, "l1_update_cost": c}
                for a, b, c in zip(self.learner_loss.tolist(),
                                   self.comparator_loss.tolist(),
                                   self.l1_update_cost.tolist())
            ]
        return out


def run_experiment(spec, stream, comparator, loss_model, check_realizable=True):
    """Play the learner through ``stream`` and measure regret and update cost.

    ``l1_update_cost`` on trial t is ``||w_{t+1} - w_hat_t||_1``, the mass
    moved by sharing or projection after the loss update.
    """
    losses = np.asarray(stream.losses, dtype=np.float64)
    T, n = losses.shape
    if comparator.T != T or comparator.n != n:
        raise ValueError("comparator and loss stream disagree on shape")
    eta, c = loss_model.eta, loss_model.c
    state = spec.initial_state(n)
    learner_loss = np.empty(T)
    cost = np.empty(T)
    for t in range(T):
        w = state.w
        ell = losses[t]
        if loss_model.kind == "mix_loss":
            lt = mix_loss(w, ell)
        else:
            pred = loss_model.learner_prediction(w, stream.predictions[t])
            lt = loss_model.loss(pred, stream.outcomes[t])
            if check_realizable:
                mixed = c * mix_loss(w, eta * ell)
                assert lt <= mixed + 1e-9, f"realizability violated on trial {t}"
        learner_loss[t] = lt
        w_hat = L.posterior(state, ell, eta)
        state = L.step(state, ell, eta)
        cost[t] = l1_distance(state.w, w_hat)
    comp_loss = losses[np.arange(T), comparator.ids]
    regret = float(np.sum(learner_loss - comp_loss))
    bound = pods_bound(BoundInputs(n=n, T=max(T, 2), k=comparator.k,
                                   m=comparator.m, c=c))
    params = {"learner": asdict(spec), "n": n, "T": T, "k": comparator.k,
              "m": comparator.m, "loss_model": loss_model.kind, "c": c, "eta": eta}
    return ExperimentResult(learner_loss, comp_loss, cost, regret, bound, params)


def tuned_spec(kind, n, T, k, m, **overrides):
    """Learner spec with the PoDS/Share optimal (alpha, theta) for (T, k, m)."""
    alpha, theta = optimal_tuning(BoundInputs(n=n, T=T, k=k, m=m))
    params = {"alpha": alpha, "theta": theta}
    params.update(overrides)
    return LearnerSpec(kind, **params)


# -- projection vs sharing -----------------------------------------------------

def matched_state_cost_compare(w_hat, v, alpha):
    """L1 distance moved by projecting onto C(alpha v) versus sharing with v."""
    w_hat = as_interior(w_hat, "w_hat")
    v = as_interior(v, "v")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    p = project(w_hat, alpha * v).p
    shared = (1.0 - alpha) * w_hat + alpha * v
    return l1_distance(p, w_hat), l1_distance(shared, w_hat)


def matched_state_costs(losses, alpha, theta, eta=1.0):
    """Per-trial (projection, sharing) costs along one Share-theta run.

    Both updates start from the same posterior and use ``beta = alpha v``.
    """
    losses = np.asarray(losses, dtype=np.float64)
    state = L.ShareState.initial(losses.shape[1], alpha, theta)
    out = np.empty((losses.shape[0], 2))
    for t, ell in enumerate(losses):
        w_hat = L.loss_update(state.w, ell, eta)
        out[t] = matched_state_cost_compare(w_hat, state.v, alpha)
        state = L.share_step(state, ell, eta)
    return out


# -- equivalences -------------------------------------------------------------

def equivalence_deviations(seed, T, n, alpha=None, theta=None):
    """Max deviations for Share-theta vs geometric MPP and vs specialists."""
    rng = np.random.default_rng(seed)
    if alpha is None:
        alpha = float(rng.uniform(0.05, 0.95))
    if theta is None:
        theta = float(rng.uniform(0.05, 0.95))
    if not (0.0 < alpha < 1.0 and 0.0 < theta < 1.0):
        raise ValueError("alpha and theta must lie in (0, 1)")
    losses = rng.exponential(1.0, size=(T, n))
    share = L.ShareState.initial(n, alpha, theta)
    mpp = L.MppState.initial(n, MixingScheme.geometric(alpha, theta))
    spec = L.SpecialistState.from_share_params(n, alpha, theta)
    dev = {"share_vs_mpp": 0.0, "specialists_awake": 0.0,
           "specialists_asleep": 0.0}
    for ell in losses:
        share = L.share_step(share, ell, 1.0)
        mpp = L.mpp_step(mpp, ell, 1.0)
        spec = L.specialists_step(spec, ell, 1.0)
        dev["share_vs_mpp"] = max(dev["share_vs_mpp"], float(np.abs(share.w - mpp.w).max()))
        dev["specialists_awake"] = max(dev["specialists_awake"],
                                       float(np.abs(spec.a / spec.a.sum() - share.w).max()))
        dev["specialists_asleep"] = max(dev["specialists_asleep"],
                                        float(np.abs(spec.s / spec.pi_s - share.v).max()))
    return {"seed": seed, "T": T, "n": n, "alpha": alpha, "theta": theta,
            "deviations": dev}


# -- IO -----------------------------------------------------------------------

def write_loss_csv(path, losses):
    losses = np.asarray(losses)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow([f"loss_{i + 1}" for i in range(losses.shape[1])])
        for row in losses:
            wr.writerow([repr(float(v)) for v in row])


def read_loss_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header != [f"loss_{i + 1}" for i in range(len(header))]:
        raise ValueError("loss CSV header must be loss_1..loss_n")
    data = np.array([[float(v) for v in r] for r in body], dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ValueError("ragged loss CSV")
    return data


def write_result_csv(path, result):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["t", "learner_loss", "comparator_loss", "l1_update_cost"])
        for t, (a, b, c) in enumerate(zip(result.learner_loss, result.comparator_loss,
                                          result.l1_update_cost), start=1):
            wr.writerow([t, f"{a:.6g}", f"{b:.6g}", f"{c:.6g}"])


def round_floats(obj, digits=12):
    if isinstance(obj, float):
        return float(f"{obj:.{digits}g}") if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, digits) for v in obj]
    return obj


def dump_json(obj, fh):
    json.dump(round_floats(obj), fh, indent=2, sort_keys=True)
    fh.write("\n")
