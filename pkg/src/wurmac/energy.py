"""Per-frame and horizon-averaged energy for the WuR MAC and the main-radio baseline.

Every node falls into exactly one of three cases per frame:

  case 1  pulled: WuR on until its own wake-up signal ends, then one payload
          transmission and one ACK reception
  case 2  alarmed but not pulled: WuR on for the whole pull sub-frame, main
          radio on for the push control signal, one push attempt (payload +
          ACK slot fractions). With no push slots at all (P = 0) these nodes
          stand down and spend nothing.
  case 3  neither: WuR on for the whole pull sub-frame only

The main-radio (MR) baseline replaces the wake-up machinery with a k_s-slot
schedule broadcast that every node receives with its main radio; the push
sub-frame is unchanged and the pull capacity grows to Q' = F - P - 1 - k_s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import FrameLaw, PullLaw, SuccessSummary, pulled_count_weights
from .core import ConfigError, FrameConfig, Pmf, PowerProfile, TrafficConfig


@dataclass(frozen=True)
class EnergyBreakdown:
    """Energy per frame in joules, split by node case."""

    e1: float
    e2: float
    e3: float

    @property
    def total(self) -> float:
        return self.e1 + self.e2 + self.e3


@dataclass(frozen=True)
class MrConfig:
    """Main-radio baseline geometry: k_s schedule slots and the derived pull capacity."""

    k_s: int
    F: int
    P: int

    def __post_init__(self):
        if self.q_prime < 0:
            raise ConfigError(f"MR baseline infeasible: Q' = {self.q_prime} < 0")

    @property
    def q_prime(self) -> int:
        return self.F - self.P - 1 - self.k_s


@dataclass(frozen=True)
class EfficiencySummary:
    """Mean delivered packets per frame and the energy cost per delivered packet.

    e_per_success_j is None when no packets are delivered at all (the
    'no successes' marker; never a division by zero).
    """

    s_bar: float
    mu_a: float
    e_per_success_j: float | None


def nu_pmf(nq_pmf: Pmf, Q: int) -> Pmf:
    """Distribution of n_u = min(Q, n_q), the number of wake-up signals sent."""
    w = pulled_count_weights(nq_pmf, Q)
    if w.size < nq_pmf.probs.size:
        w = np.concatenate([w, np.zeros(nq_pmf.probs.size - w.size)])
    return Pmf(w)


def _ny_probs(law: PullLaw, na_probs: np.ndarray) -> np.ndarray:
    """Vector of P(n_y = y): nodes that are neither alarmed nor pulled.

    Uses the two deterministic maps n_z = min(Q, n_q) - n_w and
    n_y = N - n_z - n_a, accumulating hypergeometric rows shifted to their
    y-offset per (pulled count d, alarm count i).
    """
    N, Q = law.N, law.Q
    out = np.zeros(N + 1)
    if Q >= N:
        # everyone queried is pulled: n_w = n_a, so n_y = N - min(Q, n_q)
        for d, weight in enumerate(pulled_count_weights(law.nq, min(Q, N))):
            out[N - d] += weight
        return out
    from .analytic import _hyp_table

    for d, weight in enumerate(pulled_count_weights(law.nq, Q)):
        if weight == 0.0:
            continue
        H = _hyp_table(N, d)
        for i in range(N + 1):
            if na_probs[i] == 0.0:
                continue
            j0 = max(0, d - (N - i))
            j1 = min(i, d)
            base = N - d - i  # y = base + j
            out[base + j0: base + j1 + 1] += weight * na_probs[i] * H[i, j0: j1 + 1]
    return out


def ny_pmf(nq_pmf: Pmf, na_pmf: Pmf, N: int, Q: int) -> Pmf:
    """Distribution of idle listeners: not alarmed and not pulled."""
    return Pmf(_ny_probs(PullLaw(nq_pmf, N, Q), na_pmf.probs))


def _per_pull_energy(frame: FrameConfig, power: PowerProfile, u: int) -> float:
    """Energy of the first u pulled nodes: the i-th one listens through i WuS
    and i-1 pull slots before transmitting."""
    wur_slots = (frame.k_w + 1) * u * (u + 1) / 2.0 - u
    txrx = u * (power.xi_t * frame.beta_t + power.xi_r * frame.beta_r)
    return frame.tau * (power.xi_w * wur_slots + txrx)


def _energy_frame_internal(law: PullLaw, frame: FrameConfig, power: PowerProfile,
                           na_probs: np.ndarray) -> EnergyBreakdown:
    N, Q = law.N, law.Q
    nu = pulled_count_weights(law.nq, min(Q, N))
    e1 = sum(nu[u] * _per_pull_energy(frame, power, u) for u in range(1, nu.size))

    if frame.P == 0:
        e2 = 0.0
    else:
        mean_np = float(np.arange(N + 1) @ na_probs) - float(law.mean_w_given_a @ na_probs)
        per_attempt = frame.tau * (power.xi_w * Q * (frame.k_w + 1) + power.xi_r * frame.k_c
                                   + power.xi_t * frame.beta_t + power.xi_r * frame.beta_r)
        e2 = mean_np * per_attempt

    mean_ny = float(np.arange(N + 1) @ _ny_probs(law, na_probs))
    e3 = mean_ny * frame.tau * power.xi_w * Q * (frame.k_w + 1)
    return EnergyBreakdown(e1=float(e1), e2=float(e2), e3=float(e3))


def energy_frame(frame: FrameConfig, power: PowerProfile, nq_pmf: Pmf, na_pmf: Pmf) -> EnergyBreakdown:
    """Expected per-frame energy of the whole population, split into the three cases."""
    law = PullLaw(nq_pmf, na_pmf.n, frame.Q)
    return _energy_frame_internal(law, frame, power, na_pmf.probs)


def _mr_energy_internal(law: PullLaw, frame: FrameConfig, mr: MrConfig, power: PowerProfile,
                        na_probs: np.ndarray) -> float:
    N = law.N
    nu = pulled_count_weights(law.nq, min(mr.q_prime, N))
    mean_nu = float(np.arange(nu.size) @ nu)
    mean_np = float(np.arange(N + 1) @ na_probs) - float(law.mean_w_given_a @ na_probs)
    if mr.P == 0:
        mean_np = 0.0
    txrx = power.xi_t * frame.beta_t + power.xi_r * frame.beta_r
    return (N * power.xi_r * mr.k_s * frame.tau
            + mean_nu * frame.tau * txrx
            + mean_np * frame.tau * (power.xi_r * frame.k_c + txrx))


def mr_energy_frame(frame: FrameConfig, mr: MrConfig, power: PowerProfile,
                    nq_pmf: Pmf, na_pmf: Pmf) -> float:
    """Expected per-frame energy of the MR baseline in joules.

    All N nodes pay the k_s-slot schedule reception; scheduled nodes add one
    transmission and one ACK; unscheduled alarmed nodes add the push control
    reception and one push attempt. The pull-side distributions must already
    be computed with capacity Q'.
    """
    law = PullLaw(nq_pmf, na_pmf.n, mr.q_prime)
    return _mr_energy_internal(law, frame, mr, power, na_pmf.probs)


def horizon_energy(frame: FrameConfig, power: PowerProfile,
                   laws: list[FrameLaw]) -> tuple[list[EnergyBreakdown], float]:
    """Per-frame breakdowns over a recorded horizon, plus their average total."""
    if not laws:
        raise ValueError("empty horizon")
    pull = PullLaw(laws[0].nq_pmf, laws[0].na_pmf.n, frame.Q)
    per_frame = [_energy_frame_internal(pull, frame, power, fl.na_pmf.probs) for fl in laws]
    return per_frame, float(np.mean([b.total for b in per_frame]))


def mr_horizon_energy(frame: FrameConfig, mr: MrConfig, power: PowerProfile,
                      laws: list[FrameLaw]) -> float:
    if not laws:
        raise ValueError("empty horizon")
    pull = PullLaw(laws[0].nq_pmf, laws[0].na_pmf.n, mr.q_prime)
    return float(np.mean([_mr_energy_internal(pull, frame, mr, power, fl.na_pmf.probs)
                          for fl in laws]))


def efficiency(summary: SuccessSummary, laws: list[FrameLaw], frame: FrameConfig,
               traffic: TrafficConfig, e_bar_j: float) -> EfficiencySummary:
    """Delivered packets per frame, S = mu_q*p_q + mu_a*p_a, and energy per delivery.

    mu_a is the mean alarm population over the same recorded window as the
    success averages.
    """
    mu_a = float(np.mean([fl.mean_na for fl in laws]))
    s_bar = traffic.mu_q(frame) * summary.p_bar_q + mu_a * summary.p_bar_a
    e_per = e_bar_j / s_bar if s_bar > 0 else None
    return EfficiencySummary(s_bar=float(s_bar), mu_a=mu_a, e_per_success_j=e_per)
