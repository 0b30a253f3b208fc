"""Node-level Monte Carlo simulator of the dual pull/push MAC.

Runs the protocol frame by frame over a population of nodes and estimates
every quantity the analytical engine predicts: per-frame success fractions,
energy by node case, and the alarm population. Serves as the independent
oracle for the closed-form model.

Two interchangeable backends execute the trial batches: a Cython kernel
(compiled at install time) and a pure-Python fallback. They implement the
same draw-by-draw algorithm on the same splitmix64 stream and return
byte-identical results; selection happens at import, overridable with the
WURMAC_SIM_BACKEND environment variable ("compiled" or "python") or per call.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from math import sqrt

import numpy as np

from ..core import FrameConfig, HorizonConfig, PowerProfile, TrafficConfig
from ..energy import MrConfig
from . import _pykernel
from ._params import KernelParams, mr_params, wur_params
from ._rng import SplitMix64, mix64, scenario_seed, trial_seed

try:
    from . import _ckernel

    _HAS_COMPILED = True
except ImportError:  # built without Cython; pure Python only
    _ckernel = None
    _HAS_COMPILED = False

_ENV_BACKEND = os.environ.get("WURMAC_SIM_BACKEND")
if _ENV_BACKEND not in (None, "", "compiled", "python"):
    raise RuntimeError(f"WURMAC_SIM_BACKEND must be 'compiled' or 'python', got {_ENV_BACKEND!r}")
if _ENV_BACKEND == "compiled" and not _HAS_COMPILED:
    raise RuntimeError("WURMAC_SIM_BACKEND=compiled but the compiled kernel is not available")

DEFAULT_BACKEND = _ENV_BACKEND or ("compiled" if _HAS_COMPILED else "python")

COLUMNS = _pykernel.COLUMNS

_MASK64 = (1 << 64) - 1


@dataclass
class NodeState:
    """One node: identifier, alarm flag, and accumulated energy in joules."""

    id: int
    alarmed: bool = False
    energy_j: float = 0.0


@dataclass(frozen=True)
class FrameOutcome:
    """Counters and energies of one simulated frame."""

    t: int
    q: int
    ids_queried: tuple
    n_a_start: int
    n_pulled: int          # wake-up signals sent, min(q, capacity)
    j: int                 # alarmed nodes among the pulled
    served_queries: int
    push_attempts: int
    push_successes: int
    push_collisions: int   # slots holding >= 2 transmitters
    n_idle: int
    e1: float
    e2: float
    e3: float

    @property
    def n_failed(self) -> int:
        return self.push_attempts - self.push_successes

    @property
    def alarm_fraction(self) -> float:
        if self.n_a_start == 0:
            return 1.0
        return (self.j + self.push_successes) / self.n_a_start

    @property
    def query_fraction(self) -> float:
        return self.served_queries / self.q if self.q > 0 else 0.0

    @property
    def energy_total(self) -> float:
        return self.e1 + self.e2 + self.e3


@dataclass(frozen=True)
class TrialMetrics:
    """Recorded frames of one trial plus their window means."""

    seed: int
    frames: tuple
    p_a: float
    p_q: float
    e1_j: float
    e2_j: float
    e3_j: float
    e_total_j: float
    mean_na: float


@dataclass(frozen=True)
class Aggregate:
    """Across-trial means with standard errors (sample stddev / sqrt(trials))."""

    n_trials: int
    seed: int
    backend: str
    p_a: float
    se_p_a: float
    p_q: float
    se_p_q: float
    e_j: float
    se_e_j: float
    e1_j: float
    e2_j: float
    e3_j: float
    mu_a: float
    s_bar: float
    se_s_bar: float

    @property
    def e_per_success_j(self) -> float | None:
        return self.e_j / self.s_bar if self.s_bar > 0 else None


def _params_for(frame: FrameConfig, traffic: TrafficConfig, power: PowerProfile,
                mr: MrConfig | None) -> KernelParams:
    if mr is None:
        return wur_params(frame, traffic, power)
    return mr_params(frame, mr, traffic, power)


def run_trials(kp: KernelParams, horizon: HorizonConfig, n_trials: int, seed: int,
               backend: str | None = None) -> np.ndarray:
    """(n_trials x 7) per-trial window means, columns as in COLUMNS."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    seed &= _MASK64
    record_from = 0 if horizon.include_warmup_frame else 1
    backend = backend or DEFAULT_BACKEND
    if backend == "compiled":
        if not _HAS_COMPILED:
            raise RuntimeError("compiled kernel not available")
        return _ckernel.run_trials(kp.n, kp.cap, kp.p_slots, kp.alpha, kp.mu_q,
                                   kp.poisson_floor, kp.e_pull_pos, kp.e_attempt,
                                   kp.e_idle, kp.e_frame_const, horizon.T_O,
                                   record_from, n_trials, seed)
    if backend != "python":
        raise ValueError(f"unknown backend {backend!r}")
    return _pykernel.run_trials(kp, horizon.T_O, record_from, n_trials, seed)


def step_frame(state: list[NodeState], frame: FrameConfig, traffic: TrafficConfig,
               power: PowerProfile, rng: SplitMix64, mr: MrConfig | None = None,
               ids: list[int] | None = None, t: int = 0) -> FrameOutcome:
    """Advance the given nodes by one frame, charging their energy.

    ids is the trial's persistent permutation buffer; omitting it uses a fresh
    identity order (fine distributionally, but pass the same list across
    frames to replay exactly what run_trial and the batch kernels do).
    """
    kp = _params_for(frame, traffic, power, mr)
    if len(state) != kp.n:
        raise ValueError(f"expected {kp.n} nodes, got {len(state)}")
    alarmed = bytearray(1 if node.alarmed else 0 for node in state)
    start = bytearray(alarmed)
    if ids is None:
        ids = list(range(kp.n))
    slot_of = [0] * kp.n
    occ = [0] * max(kp.p_slots, 1)

    (na_start, q, u, j, served, k, s_succ, collided, idle,
     e1, e2, e3) = _pykernel._step(kp, rng, alarmed, start, ids, slot_of, occ)

    per_node_const = kp.e_frame_const / kp.n
    position = {ids[pos]: pos for pos in range(u)}
    for node in state:
        node.alarmed = bool(alarmed[node.id])
        node.energy_j += per_node_const
        if node.id in position:
            node.energy_j += float(kp.e_pull_pos[position[node.id]])
        elif start[node.id]:
            if kp.p_slots >= 1:
                node.energy_j += kp.e_attempt
        else:
            node.energy_j += kp.e_idle

    return FrameOutcome(t=t, q=q, ids_queried=tuple(ids[:q]), n_a_start=na_start,
                        n_pulled=u, j=j, served_queries=served, push_attempts=k,
                        push_successes=s_succ, push_collisions=collided, n_idle=idle,
                        e1=float(e1), e2=float(e2), e3=float(e3))


def run_trial(frame: FrameConfig, traffic: TrafficConfig, power: PowerProfile,
              horizon: HorizonConfig, seed: int, mr: MrConfig | None = None,
              trial_index: int = 0) -> TrialMetrics:
    """One instrumented trial; numerically identical to row trial_index of a batch
    run with the same master seed."""
    kp = _params_for(frame, traffic, power, mr)
    rng = SplitMix64(trial_seed(seed & _MASK64, trial_index))
    record_from = 0 if horizon.include_warmup_frame else 1

    alarmed = bytearray(kp.n)
    start = bytearray(kp.n)
    ids = list(range(kp.n))
    slot_of = [0] * kp.n
    occ = [0] * max(kp.p_slots, 1)

    frames = []
    acc = [0.0] * 7
    for t in range(record_from + horizon.T_O):
        (na_start, q, u, j, served, k, s_succ, collided, idle,
         e1, e2, e3) = _pykernel._step(kp, rng, alarmed, start, ids, slot_of, occ)
        if t >= record_from:
            frames.append(FrameOutcome(t=t, q=q, ids_queried=tuple(ids[:q]),
                                       n_a_start=na_start, n_pulled=u, j=j,
                                       served_queries=served, push_attempts=k,
                                       push_successes=s_succ, push_collisions=collided,
                                       n_idle=idle, e1=float(e1), e2=float(e2), e3=float(e3)))
            acc[0] += (j + s_succ) / na_start if na_start > 0 else 1.0
            acc[1] += served / q if q > 0 else 0.0
            acc[2] += e1
            acc[3] += e2
            acc[4] += e3
            acc[5] += e1 + e2 + e3
            acc[6] += na_start
    t_obs = horizon.T_O
    return TrialMetrics(seed=seed, frames=tuple(frames),
                        p_a=acc[0] / t_obs, p_q=acc[1] / t_obs,
                        e1_j=acc[2] / t_obs, e2_j=acc[3] / t_obs, e3_j=acc[4] / t_obs,
                        e_total_j=acc[5] / t_obs, mean_na=acc[6] / t_obs)


def aggregate_trials(trials: np.ndarray, mu_q: float, seed: int, backend: str) -> Aggregate:
    """Reduce a run_trials array to means and standard errors.

    S is estimated as mu_q * mean(p_q) + mean(n_a) * mean(p_a), the plug-in
    form of its definition; averaging per-trial products instead would pick
    up the within-trial covariance between the alarm population and its
    success fraction and stay biased low no matter how many trials run. The
    SE comes from the delta method (influence of each trial on the product).
    """
    n = trials.shape[0]

    def mean_se(col: np.ndarray) -> tuple[float, float]:
        if n < 2:
            return float(col[0]), 0.0
        return float(col.mean()), float(col.std(ddof=1) / sqrt(n))

    p_a, se_p_a = mean_se(trials[:, 0])
    p_q, se_p_q = mean_se(trials[:, 1])
    e_j, se_e_j = mean_se(trials[:, 5])
    mu_a = float(trials[:, 6].mean())
    s_bar = mu_q * p_q + mu_a * p_a
    if n < 2:
        se_s = 0.0
    else:
        influence = mu_q * trials[:, 1] + mu_a * trials[:, 0] + p_a * trials[:, 6]
        se_s = float(influence.std(ddof=1) / sqrt(n))
    return Aggregate(n_trials=n, seed=seed, backend=backend,
                     p_a=p_a, se_p_a=se_p_a, p_q=p_q, se_p_q=se_p_q,
                     e_j=e_j, se_e_j=se_e_j,
                     e1_j=float(trials[:, 2].mean()), e2_j=float(trials[:, 3].mean()),
                     e3_j=float(trials[:, 4].mean()),
                     mu_a=mu_a,
                     s_bar=float(s_bar), se_s_bar=se_s)


def monte_carlo(frame: FrameConfig, traffic: TrafficConfig, power: PowerProfile,
                horizon: HorizonConfig, n_trials: int, seed: int,
                mr: MrConfig | None = None, backend: str | None = None) -> Aggregate:
    """Independent trials from one master seed, reduced to means and SEs."""
    kp = _params_for(frame, traffic, power, mr)
    backend = backend or DEFAULT_BACKEND
    trials = run_trials(kp, horizon, n_trials, seed, backend=backend)
    return aggregate_trials(trials, traffic.mu_q(frame), seed, backend)


__all__ = [
    "Aggregate",
    "COLUMNS",
    "DEFAULT_BACKEND",
    "FrameOutcome",
    "KernelParams",
    "NodeState",
    "SplitMix64",
    "TrialMetrics",
    "aggregate_trials",
    "mix64",
    "monte_carlo",
    "mr_params",
    "run_trial",
    "run_trials",
    "scenario_seed",
    "step_frame",
    "trial_seed",
    "wur_params",
]
