"""Kernel parameter pack: configs reduced to the scalars and energy constants the
per-trial loop consumes. Both backends take exactly this, so the WuR system and
the MR baseline run through one mode-free kernel."""

from __future__ import annotations

from dataclasses import dataclass
from math import exp

import numpy as np

from ..core import FrameConfig, PowerProfile, TrafficConfig
from ..energy import MrConfig


@dataclass(frozen=True)
class KernelParams:
    """Inputs of one simulated trial.

    e_pull_pos[m] is the energy of the node pulled m-th (0-based) in a frame;
    e_attempt is charged per push contender (never when p_slots == 0);
    e_idle per node that is neither pulled nor contending; e_frame_const once
    per frame (the MR schedule reception paid by all nodes).
    """

    n: int
    cap: int
    p_slots: int
    alpha: float
    mu_q: float
    poisson_floor: float
    e_pull_pos: np.ndarray
    e_attempt: float
    e_idle: float
    e_frame_const: float


def _frozen(v: np.ndarray) -> np.ndarray:
    v = np.ascontiguousarray(v, dtype=np.float64)
    v.flags.writeable = False
    return v


def wur_params(frame: FrameConfig, traffic: TrafficConfig, power: PowerProfile) -> KernelParams:
    tau = frame.tau
    txrx = power.xi_t * frame.beta_t + power.xi_r * frame.beta_r
    pos = np.arange(1, frame.Q + 1, dtype=np.float64)
    e_pull_pos = tau * (power.xi_w * (pos * frame.k_w + pos - 1.0) + txrx)
    mu_q = traffic.mu_q(frame)
    return KernelParams(
        n=traffic.N,
        cap=frame.Q,
        p_slots=frame.P,
        alpha=traffic.alpha(frame),
        mu_q=mu_q,
        poisson_floor=exp(-mu_q),
        e_pull_pos=_frozen(e_pull_pos),
        e_attempt=tau * (power.xi_w * frame.Q * (frame.k_w + 1) + power.xi_r * frame.k_c + txrx),
        e_idle=tau * power.xi_w * frame.Q * (frame.k_w + 1),
        e_frame_const=0.0,
    )


def mr_params(frame: FrameConfig, mr: MrConfig, traffic: TrafficConfig,
              power: PowerProfile) -> KernelParams:
    tau = frame.tau
    txrx = power.xi_t * frame.beta_t + power.xi_r * frame.beta_r
    mu_q = traffic.mu_q(frame)
    return KernelParams(
        n=traffic.N,
        cap=mr.q_prime,
        p_slots=mr.P,
        alpha=traffic.alpha(frame),
        mu_q=mu_q,
        poisson_floor=exp(-mu_q),
        e_pull_pos=_frozen(np.full(mr.q_prime, tau * txrx)),
        e_attempt=tau * (power.xi_r * frame.k_c + txrx),
        e_idle=0.0,
        e_frame_const=traffic.N * power.xi_r * mr.k_s * tau,
    )
