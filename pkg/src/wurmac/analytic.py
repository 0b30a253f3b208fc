"""Closed-form recursive engine for the dual pull/push MAC.

The engine tracks the distribution of the alarm-packet population n_a(t) frame
by frame and derives every per-frame metric from it:

  n_q  queries collected by the BS (truncated Poisson, i.i.d. per frame)
  n_w  alarmed nodes that receive a wake-up signal (hypergeometric mixture)
  n_p  alarmed nodes left to contend in the push sub-frame, n_p = n_a - n_w
  n_s  contenders that land alone in a push slot (Framed ALOHA)
  n_f  contenders that collide and carry their packet to the next frame
  n_n  fresh alarms among the N - n_a(t) currently quiet nodes (binomial)

with the population update n_a(t+1) = n_n(t) + n_f(t) started from an empty
system, so n_a(1) ~ Binomial(N, alpha).

Per-frame success probabilities:

  p_w  alarm delivered through a pull (expected fraction n_w/n_a)
  p_p  tagged contender survives the slotted contention
  p_i  overlap term so that p_a = p_w + p_p - p_i is the per-packet
       delivery probability
  p_q  query answered by a non-alarmed node (alarmed nodes preempt the
       reply with their alarm data, which does not serve the query)

Horizon averages run over the frames selected by HorizonConfig; the default
window is frames 1..T_O, which matches the published analytical curves (see
README on the calibration).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, exp

import numpy as np

from .core import FrameConfig, HorizonConfig, Pmf, TrafficConfig


# ---------------------------------------------------------------------------
# Query arrivals
# ---------------------------------------------------------------------------

def query_pmf(traffic: TrafficConfig, frame: FrameConfig) -> Pmf:
    """Distribution of queries per frame: Poisson(mu_q) with all tail mass at N."""
    return _truncated_poisson(traffic.mu_q(frame), traffic.N)


def _truncated_poisson(mu: float, n: int) -> Pmf:
    v = np.zeros(n + 1)
    if mu == 0.0:
        v[0] = 1.0
        return Pmf(v)
    p = exp(-mu)
    for q in range(n):
        v[q] = p
        p *= mu / (q + 1)
    v[n] = max(0.0, 1.0 - v[:n].sum())
    return Pmf(v)


# ---------------------------------------------------------------------------
# Pull sub-frame: who gets a wake-up signal
# ---------------------------------------------------------------------------

def wus_hit_prob(j: int, q: int, i: int, N: int, Q: int) -> float:
    """P(n_w = j | n_q = q, n_a = i): j alarmed nodes among the pulled ones.

    The BS pulls d = min(q, Q) of the q queried nodes; queried ids are drawn
    without replacement, so the alarmed count among the pulled set is
    hypergeometric with d draws from N nodes of which i are alarmed. When
    Q >= N every queried node is pulled and all i alarmed nodes respond.
    """
    if j < 0 or q < 0 or i < 0 or j > N or q > N or i > N:
        return 0.0
    if Q >= N:
        return 1.0 if j == i else 0.0
    d = min(q, Q)
    if j > min(i, d) or d - j > N - i:
        return 0.0
    return comb(i, j) * comb(N - i, d - j) / comb(N, d)


@lru_cache(maxsize=2048)
def _hyp_table(N: int, d: int) -> np.ndarray:
    """H[i, j] = P(j alarmed among d nodes pulled without replacement | i alarmed)."""
    H = np.zeros((N + 1, N + 1))
    denom = comb(N, d)
    for i in range(N + 1):
        for j in range(max(0, d - (N - i)), min(i, d) + 1):
            H[i, j] = comb(i, j) * comb(N - i, d - j) / denom
    H.flags.writeable = False
    return H


def pulled_count_weights(nq_pmf: Pmf, Q: int) -> np.ndarray:
    """Weights of d = min(n_q, Q), the number of wake-up signals actually sent."""
    probs = nq_pmf.probs
    if Q >= probs.size - 1:
        return probs.copy()
    w = np.zeros(Q + 1)
    w[:Q] = probs[:Q]
    w[Q] = probs[Q:].sum()
    return w


class PullLaw:
    """Conditional tables for one (N, pull capacity, query distribution) triple.

    W[i, j] = P(n_w = j | n_a = i), marginalized over the query count. All
    per-frame formulas reduce to contractions against W and the per-d
    hypergeometric tables, so building this once per scenario keeps the
    horizon recursion cheap. The capacity is the number of nodes the BS can
    pull per frame (Q, or Q' for the main-radio baseline).
    """

    def __init__(self, nq_pmf: Pmf, N: int, Q: int):
        self.N = N
        self.Q = Q
        self.nq = nq_pmf
        counts = np.arange(N + 1, dtype=np.float64)
        if Q >= N:
            self.W = np.eye(N + 1)
            self.mean_j_by_d = None  # degenerate regime: n_w = n_a surely
        else:
            dw = pulled_count_weights(nq_pmf, Q)
            W = np.zeros((N + 1, N + 1))
            mean_j = np.zeros((dw.size, N + 1))
            for d, weight in enumerate(dw):
                H = _hyp_table(N, d)
                mean_j[d] = H @ counts
                if weight > 0.0:
                    W += weight * H
            # each row is a conditional law; dividing out the weight sum keeps
            # row sums at exactly 1 despite sub-ulp drift in the query pmf
            W /= dw.sum()
            self.W = W
            self.mean_j_by_d = mean_j
        # E[n_w | n_a = i], used by the pull success and the idle-node count
        self.mean_w_given_a = self.W @ counts

    def nw_given_na(self, i: int) -> Pmf:
        return Pmf(self.W[i])

    def np_given_na(self, i: int) -> np.ndarray:
        """P(n_p = k | n_a = i) as a vector over k = 0..i; n_p = i - n_w."""
        return self.W[i, : i + 1][::-1]

    def query_success(self, na_probs: np.ndarray) -> float:
        """Served fraction E[(min(n_q, Q) - n_w) / n_q] over frames with queries."""
        nq = self.nq.probs
        total = 0.0
        if self.Q >= self.N:
            mean_alarmed = float(np.arange(self.N + 1) @ na_probs)
            for q in range(1, self.N + 1):
                if nq[q] > 0.0:
                    total += nq[q] * (min(q, self.Q) - mean_alarmed) / q
            return total
        for q in range(1, self.N + 1):
            if nq[q] > 0.0:
                d = min(q, self.Q)
                total += nq[q] * (d - float(na_probs @ self.mean_j_by_d[d])) / q
        return total


def nw_given_na(i: int, nq_pmf: Pmf, N: int, Q: int) -> Pmf:
    """Distribution of alarmed nodes pulled in a frame with n_a = i."""
    return PullLaw(nq_pmf, N, Q).nw_given_na(i)


def np_pmf(na_pmf: Pmf, nq_pmf: Pmf, Q: int) -> Pmf:
    """Distribution of push contenders: P(n_p = k) = sum_i P(n_w = i-k | i) P(n_a = i)."""
    N = na_pmf.n
    law = PullLaw(nq_pmf, N, Q)
    na = na_pmf.probs
    v = np.zeros(N + 1)
    for i in range(N + 1):
        if na[i] > 0.0:
            v[: i + 1] += na[i] * law.np_given_na(i)
    return Pmf(v)


# ---------------------------------------------------------------------------
# Push sub-frame: Framed ALOHA
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlohaJointTable:
    """Joint law of (singleton slots s, collided slots c) for k contenders on P slots."""

    k: int
    P: int
    entries: np.ndarray  # entries[s, c]

    def marginal_successes(self) -> np.ndarray:
        return self.entries.sum(axis=1)


def aloha_joint(k: int, P: int) -> AlohaJointTable:
    """Build the (s, c) table by adding contenders one at a time.

    A new contender either opens a fresh singleton slot, joins an existing
    collision, or collides with a previous singleton, with weights
    (P-s+1-c)/P, c/P and (s+1)/P on the k-1 table. Started from certainty of
    (0, 0) with no contenders.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if P < 1:
        raise ValueError("aloha_joint needs at least one slot; P = 0 is handled upstream")
    cmax = min(P, k // 2)
    cur = np.zeros((k + 1, cmax + 1))
    cur[0, 0] = 1.0
    for m in range(1, k + 1):
        prev, cur = cur, np.zeros_like(cur)
        smax = min(m, P)
        for s in range(smax + 1):
            for c in range((m - s) // 2 + 1):
                if c > cmax or s + c > P:
                    continue
                acc = 0.0
                if s >= 1:
                    acc += prev[s - 1, c] * (P - s + 1 - c) / P
                if c >= 1 and s + 1 <= k:
                    acc += prev[s + 1, c - 1] * (s + 1) / P
                acc += prev[s, c] * c / P
                cur[s, c] = acc
    return AlohaJointTable(k=k, P=P, entries=cur)


def ns_given_np(k: int, P: int) -> Pmf:
    """Distribution of delivered push packets among k contenders on P slots."""
    if P == 0:
        return Pmf.point_mass(max(k, 0), 0)
    return Pmf(aloha_joint(k, P).marginal_successes())


def tagged_success_prob(k: int, P: int) -> float:
    """Probability that one tagged contender out of k survives the contention."""
    if k == 0:
        return 1.0
    if P == 0:
        return 0.0
    if P == 1:
        return 1.0 if k == 1 else 0.0
    return (1.0 - 1.0 / P) ** (k - 1)


@lru_cache(maxsize=64)
def _success_table(N: int, P: int) -> np.ndarray:
    """S[k, s] = P(n_s = s | n_p = k) for all populations up to N."""
    S = np.zeros((N + 1, N + 1))
    if P == 0:
        S[:, 0] = 1.0
    else:
        for k in range(N + 1):
            S[k, : k + 1] = ns_given_np(k, P).probs
    S.flags.writeable = False
    return S


@lru_cache(maxsize=64)
def _failure_table(N: int, P: int) -> np.ndarray:
    """F[k, f] = P(n_f = f | n_p = k), with n_f = n_p - n_s."""
    S = _success_table(N, P)
    F = np.zeros((N + 1, N + 1))
    for k in range(N + 1):
        F[k, : k + 1] = S[k, : k + 1][::-1]
    F.flags.writeable = False
    return F


def nf_pmf(np_pmf_: Pmf, P: int) -> Pmf:
    """Distribution of push failures given the contender distribution."""
    return Pmf(np_pmf_.probs @ _failure_table(np_pmf_.n, P))


def ns_pmf(np_pmf_: Pmf, P: int) -> Pmf:
    """Distribution of push successes given the contender distribution."""
    return Pmf(np_pmf_.probs @ _success_table(np_pmf_.n, P))


# ---------------------------------------------------------------------------
# Per-frame success probabilities
# ---------------------------------------------------------------------------

def p_push(np_pmf_: Pmf, P: int) -> float:
    """Push success probability of a tagged contender, averaged over n_p."""
    probs = np_pmf_.probs
    return float(sum(probs[k] * tagged_success_prob(k, P) for k in range(probs.size)))


def p_pull(na_pmf: Pmf, nq_pmf: Pmf, N: int, Q: int) -> float:
    """Probability that a tagged alarm packet is delivered through a pull."""
    law = PullLaw(nq_pmf, N, Q)
    na = na_pmf.probs
    total = 0.0
    for i in range(1, N + 1):
        if na[i] > 0.0:
            total += na[i] * law.mean_w_given_a[i] / i
    return total


def p_intersection(na_pmf: Pmf, nq_pmf: Pmf, N: int, Q: int, P: int) -> float:
    """Overlap correction between pull and push success events."""
    law = PullLaw(nq_pmf, N, Q)
    na = na_pmf.probs
    ppk = np.array([tagged_success_prob(k, P) for k in range(N + 1)])
    total = 0.0
    for i in range(1, N + 1):
        if na[i] > 0.0:
            j = np.arange(i + 1)
            total += na[i] * float((j / i * ppk[i - j]) @ law.W[i, : i + 1])
    return total


def p_query(na_pmf: Pmf, nq_pmf: Pmf, N: int, Q: int) -> float:
    """Probability that a query is served, i.e. its target is pulled and not alarmed.

    Frames without queries contribute zero. Queries beyond the Q available
    wake-up signals and queries preempted by an alarm reply are unserved.
    """
    return PullLaw(nq_pmf, N, Q).query_success(na_pmf.probs)


# ---------------------------------------------------------------------------
# Population recursion and horizon averages
# ---------------------------------------------------------------------------

@lru_cache(maxsize=512)
def _binomial_row(n: int, alpha: float) -> np.ndarray:
    v = np.array([comb(n, k) * alpha**k * (1.0 - alpha) ** (n - k) for k in range(n + 1)])
    v.flags.writeable = False
    return v


def na_step(na_pmf: Pmf, nq_pmf: Pmf, traffic: TrafficConfig, frame: FrameConfig) -> Pmf:
    """One frame of the population recursion: n_a(t+1) = n_n(t) + n_f(t).

    Conditioned on n_a(t) = i, the pull outcome fixes the contender count,
    the ALOHA table fixes the failure count, and the fresh alarms are
    Binomial(N - i, alpha) over the still-quiet nodes; the two are
    conditionally independent given i.
    """
    N = traffic.N
    law = PullLaw(nq_pmf, N, frame.Q)
    return _na_step_internal(na_pmf.probs, law, _failure_table(N, frame.P),
                             traffic.alpha(frame), N)


def _na_step_internal(na: np.ndarray, law: PullLaw, fail_table: np.ndarray,
                      alpha: float, N: int) -> Pmf:
    out = np.zeros(N + 1)
    for i in range(N + 1):
        if na[i] == 0.0:
            continue
        np_given_i = law.np_given_na(i)                         # over k = 0..i
        nf_given_i = np_given_i @ fail_table[: i + 1, : i + 1]  # over f = 0..i
        fresh = _binomial_row(N - i, alpha)                     # over 0..N-i
        mixed = np.convolve(nf_given_i, fresh)[: N + 1]
        out[: mixed.size] += na[i] * mixed
    return Pmf(out)


@dataclass(frozen=True)
class FrameLaw:
    """Distributions and success metrics of one frame."""

    t: int
    na_pmf: Pmf
    nq_pmf: Pmf
    p_w: float
    p_p: float
    p_i: float
    p_a: float
    p_q: float

    @property
    def mean_na(self) -> float:
        return self.na_pmf.mean()


@dataclass(frozen=True)
class SuccessSummary:
    """Horizon-averaged success probabilities and their traffic weights."""

    p_bar_a: float
    p_bar_q: float
    p_bar_s: float
    w_q: float
    w_a: float


def frame_law(t: int, na_pmf: Pmf, nq_pmf: Pmf, law: PullLaw, P: int) -> FrameLaw:
    N = law.N
    na = na_pmf.probs
    ppk = np.array([tagged_success_prob(k, P) for k in range(N + 1)])

    pw = pi = pp = 0.0
    for i in range(N + 1):
        if na[i] == 0.0:
            continue
        pp += na[i] * float(law.np_given_na(i) @ ppk[: i + 1])
        if i >= 1:
            j = np.arange(i + 1)
            w_row = law.W[i, : i + 1]
            pw += na[i] * float((j / i) @ w_row)
            pi += na[i] * float((j / i * ppk[i - j]) @ w_row)
    pq = law.query_success(na)
    return FrameLaw(t=t, na_pmf=na_pmf, nq_pmf=nq_pmf,
                    p_w=pw, p_p=pp, p_i=pi, p_a=pw + pp - pi, p_q=pq)


def run_horizon(frame: FrameConfig, traffic: TrafficConfig, horizon: HorizonConfig,
                pull_capacity: int | None = None) -> tuple[list[FrameLaw], SuccessSummary]:
    """Iterate the recursion from an empty system and average the recorded window.

    Returns one FrameLaw per recorded frame plus the averaged summary. The
    trade-off weights split the traffic load: w_q = lambda_q/(lambda_q+lambda_a).
    pull_capacity overrides frame.Q for the main-radio baseline, whose
    schedule can address more nodes than the WuS budget allows.
    """
    rate_sum = traffic.lambda_q + traffic.lambda_a
    if rate_sum <= 0:
        raise ValueError("success trade-off weights are undefined for lambda_q = lambda_a = 0")
    w_q = traffic.lambda_q / rate_sum
    w_a = traffic.lambda_a / rate_sum

    N = traffic.N
    cap = frame.Q if pull_capacity is None else pull_capacity
    nq = query_pmf(traffic, frame)
    law = PullLaw(nq, N, cap)
    fail_table = _failure_table(N, frame.P)
    alpha = traffic.alpha(frame)

    recorded = horizon.recorded_frames
    laws: list[FrameLaw] = []
    na = Pmf.point_mass(N, 0)
    for t in range(recorded.stop):
        if t in recorded:
            laws.append(frame_law(t, na, nq, law, frame.P))
        if t + 1 < recorded.stop:
            na = _na_step_internal(na.probs, law, fail_table, alpha, N)

    p_bar_a = float(np.mean([fl.p_a for fl in laws]))
    p_bar_q = float(np.mean([fl.p_q for fl in laws]))
    summary = SuccessSummary(p_bar_a=p_bar_a, p_bar_q=p_bar_q,
                             p_bar_s=w_q * p_bar_q + w_a * p_bar_a, w_q=w_q, w_a=w_a)
    return laws, summary
