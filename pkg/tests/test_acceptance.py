"""Acceptance gate: every shipped reproduction target at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS/FAIL line per
criterion. The fig7/fig8 full-curve check is expected to fail and is marked
xfail(strict): the reference readings for those exhibits disagree with the
(exactly reproduced) fig5 analytical values at overlapping parameters, so no
implementation can satisfy both; see README, Known deviations.
"""

import time
from itertools import combinations, product

import numpy as np
import pytest

import wurmac.sim as sim
from wurmac.analytic import aloha_joint, run_horizon, wus_hit_prob
from wurmac.core import FrameConfig, HorizonConfig, Pmf, PowerProfile
from wurmac.energy import MrConfig, efficiency, horizon_energy, mr_horizon_energy

from conftest import make_frame, make_traffic
import reference_values as ref

POWER = PowerProfile(xi_w=1e-3, xi_r=50e-3, xi_t=55e-3)
HORIZON = HorizonConfig(T_O=10)


def report(ok: bool, name: str, detail: str):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


def fig5_grid(include_warmup: bool):
    """(p_bar_a, p_bar_q, E_bar_mJ) arrays over the 27-point reference grid."""
    horizon = HorizonConfig(T_O=10, include_warmup_frame=include_warmup)
    pa, pq, e = {}, {}, {}
    for Q in (1, 4, 7):
        frame = make_frame(Q)
        for lam in ref.FIG5_LAMBDAS:
            laws, summary = run_horizon(frame, make_traffic(lam, lam), horizon)
            _, e_bar = horizon_energy(frame, POWER, laws)
            pa[Q, lam], pq[Q, lam], e[Q, lam] = summary.p_bar_a, summary.p_bar_q, e_bar * 1e3
    return pa, pq, e


def case_grid():
    """(p_bar_a, p_bar_q, p_bar_s) per traffic case and Q = 0..8."""
    out = {}
    for case, (lam_a, lam_q) in ref.CASES.items():
        traffic = make_traffic(lam_q, lam_a)
        for Q in range(9):
            _, summary = run_horizon(make_frame(Q), traffic, HORIZON)
            out[case, Q] = (summary.p_bar_a, summary.p_bar_q, summary.p_bar_s)
    return out


def energy_comparison_grid():
    """{(P, system): (E_bar_mJ, E_per_success_mJ)} over the push-slot sweep."""
    traffic = make_traffic(15.0, 15.0)
    out = {}
    for P in ref.TABLE3:
        frame = FrameConfig.from_push_slots(0.25e-3, 41, 4, 1, P, 4 / 7, 3 / 7)
        laws, summary = run_horizon(frame, traffic, HORIZON)
        _, e_wur = horizon_energy(frame, POWER, laws)
        eff = efficiency(summary, laws, frame, traffic, e_wur)
        out[P, "wur"] = (e_wur * 1e3, eff.e_per_success_j * 1e3)
        for k_s in (1, 4):
            mr = MrConfig(k_s=k_s, F=41, P=P)
            laws_m, summ_m = run_horizon(frame, traffic, HORIZON, pull_capacity=mr.q_prime)
            e_mr = mr_horizon_energy(frame, mr, POWER, laws_m)
            eff_m = efficiency(summ_m, laws_m, frame, traffic, e_mr)
            out[P, f"mr{k_s}"] = (e_mr * 1e3, eff_m.e_per_success_j * 1e3)
    return out


# ---------------------------------------------------------------------------
# 1. Observation-window calibration
# ---------------------------------------------------------------------------

def test_criterion_convention_calibration():
    def max_err(include_warmup):
        pa, pq, _ = fig5_grid(include_warmup)
        return max(max(abs(pa[Q, lam] - ref.FIG5_PA[Q][il]),
                       abs(pq[Q, lam] - ref.FIG5_PQ[Q][il]))
                   for Q in (1, 4, 7) for il, lam in enumerate(ref.FIG5_LAMBDAS))

    err_skip = max_err(False)   # window 1..T_O (warm-up excluded)
    err_keep = max_err(True)    # window 0..T_O-1
    adopted_is_skip = err_skip < err_keep
    ok = adopted_is_skip and err_skip <= 1e-3 and not HorizonConfig(10).include_warmup_frame
    report(ok, "convention calibration",
           f"window 1..T_O err={err_skip:.2e}, window 0..T_O-1 err={err_keep:.2e}; "
           f"adopted: frames 1..T_O (warm-up excluded)")
    assert ok


# ---------------------------------------------------------------------------
# 2./3. Success and energy curves over the rate sweep
# ---------------------------------------------------------------------------

def test_criterion_fig5_success_curves():
    t0 = time.perf_counter()
    pa, pq, _ = fig5_grid(False)
    elapsed = time.perf_counter() - t0
    worst = max(max(abs(pa[Q, lam] - ref.FIG5_PA[Q][il]),
                    abs(pq[Q, lam] - ref.FIG5_PQ[Q][il]))
                for Q in (1, 4, 7) for il, lam in enumerate(ref.FIG5_LAMBDAS))
    ok = worst <= 1e-3 and elapsed < 5.0
    report(ok, "fig5 reproduction",
           f"54 values, max |dev| = {worst:.2e} (tol 1e-3), {elapsed:.2f}s (< 5s)")
    assert worst <= 1e-3
    assert elapsed < 5.0


def test_criterion_fig6_energy_curves():
    t0 = time.perf_counter()
    _, _, e = fig5_grid(False)
    elapsed = time.perf_counter() - t0
    worst = max(abs(e[Q, lam] / ref.FIG6_E[Q][il] - 1.0)
                for Q in (1, 4, 7) for il, lam in enumerate(ref.FIG5_LAMBDAS))
    ok = worst <= 0.01 and elapsed < 5.0
    report(ok, "fig6 reproduction",
           f"27 values, max rel dev = {worst:.2e} (tol 1%), {elapsed:.2f}s (< 5s)")
    assert worst <= 0.01
    assert elapsed < 5.0


# ---------------------------------------------------------------------------
# 4. Trade-off curves over the capacity sweep
# ---------------------------------------------------------------------------

@pytest.mark.xfail(strict=True, reason=(
    "the fig7/fig8 reference readings carry sampling noise and disagree with "
    "the exactly-reproduced fig5 analytical values at overlapping parameters "
    "(e.g. lam=15, Q=7: 0.272543 in fig5 vs 0.275649 in fig7), so the 1e-3 "
    "band cannot hold at every point; see README, Known deviations"))
def test_criterion_fig7_fig8_full_curves():
    grid = case_grid()
    worst = 0.0
    worst_at = None
    for case in ref.CASES:
        for Q in range(9):
            pa, pq, ps = grid[case, Q]
            for name, got, want in (("p_a", pa, ref.FIG7[case][Q][0]),
                                    ("p_q", pq, ref.FIG7[case][Q][1]),
                                    ("p_s", ps, ref.FIG8[case][Q])):
                dev = abs(got - want)
                if dev > worst:
                    worst, worst_at = dev, (case, Q, name)
    ok = worst <= 1e-3
    report(ok, "fig7/fig8 full curves",
           f"81 values, max |dev| = {worst:.2e} at {worst_at} (tol 1e-3)"
           + ("" if ok else "; reference data internally inconsistent, see README"))
    assert worst <= 1e-3


def test_criterion_fig7_fig8_anchors_and_argmax():
    t0 = time.perf_counter()
    grid = case_grid()
    elapsed = time.perf_counter() - t0

    argmax_ok = True
    for case in ref.CASES:
        ps = [grid[case, Q][2] for Q in range(9)]
        argmax_ok &= int(np.argmax(ps)) == ref.FIG8_ARGMAX[case]

    # the capacity-sweep endpoints quoted for the middle traffic case
    pa0, pq0, _ = grid["b", 0]
    pa8, pq8, _ = grid["b", 8]
    anchors_ok = (abs(pq0) == 0.0 and abs(pa0 - 0.8806) <= 1e-3
                  and abs(pa8 - 0.1450) <= 1e-3 and abs(pq8 - 0.5813) <= 1e-3)
    ok = argmax_ok and anchors_ok and elapsed < 10.0
    report(ok, "fig7/fig8 argmax and endpoints",
           f"argmax_Q p_s = {[int(np.argmax([grid[c, Q][2] for Q in range(9)])) for c in 'abc']} "
           f"(want [6, 5, 3]); case-b endpoints within 1e-3; {elapsed:.2f}s (< 10s)")
    assert ok


# ---------------------------------------------------------------------------
# 5./6. Energy comparison against the always-on baseline
# ---------------------------------------------------------------------------

def test_criterion_table3_energy_cells():
    t0 = time.perf_counter()
    grid = energy_comparison_grid()
    elapsed = time.perf_counter() - t0
    worst = max(abs(grid[P, system][0] / want - 1.0)
                for P, cells in ref.TABLE3.items()
                for system, want in zip(("wur", "mr1", "mr4"), cells))
    ok = worst <= 0.02 and elapsed < 10.0
    report(ok, "table3 reproduction",
           f"21 cells, max rel dev = {worst:.2e} (tol 2%), {elapsed:.2f}s (< 10s)")
    assert worst <= 0.02
    assert elapsed < 10.0


def test_criterion_fig10_energy_per_packet():
    grid = energy_comparison_grid()
    worst = max(abs(grid[P, system][1] / want - 1.0)
                for P, bars in ref.FIG10.items()
                for system, want in zip(("wur", "mr1", "mr4"), bars))
    # quoted anchor bars: the WuR 0.0376 mJ bar sits at P=30 in the reference
    # chart (the 0.0376-at-P=25 attribution was a transposition; P=25 reads
    # 0.0410 there)
    anchors_ok = (abs(grid[30, "wur"][1] / 0.0376 - 1.0) <= 0.02
                  and abs(grid[25, "mr1"][1] / 0.0680 - 1.0) <= 0.02
                  and abs(grid[5, "mr4"][1] / 0.2954 - 1.0) <= 0.02)
    ok = worst <= 0.02 and anchors_ok
    report(ok, "fig10 reproduction",
           f"21 bars, max rel dev = {worst:.2e} (tol 2%); anchors 0.0376/0.0680/0.2954 hit")
    assert worst <= 0.02
    assert anchors_ok


# ---------------------------------------------------------------------------
# 7. Monte Carlo cross-validation
# ---------------------------------------------------------------------------

def test_criterion_cross_validation():
    t0 = time.perf_counter()
    worst = 0.0
    for Q in (1, 4, 7):
        frame = make_frame(Q)
        for lam in ref.FIG5_LAMBDAS:
            traffic = make_traffic(lam, lam)
            laws, summary = run_horizon(frame, traffic, HORIZON)
            _, e_bar = horizon_energy(frame, POWER, laws)
            seed = sim.scenario_seed(ref.CROSSVAL_SEED, f"fig5-Q{Q}-lam{lam:g}")
            agg = sim.monte_carlo(frame, traffic, POWER, HORIZON, 10_000, seed)
            for got, want, se in ((agg.p_a, summary.p_bar_a, agg.se_p_a),
                                  (agg.p_q, summary.p_bar_q, agg.se_p_q),
                                  (agg.e_j, e_bar, agg.se_e_j)):
                worst = max(worst, abs(got - want) / se)
    elapsed = time.perf_counter() - t0
    ok = worst <= 3.0 and elapsed < 120.0
    report(ok, "cross-validation",
           f"27 points x 3 metrics at 1e4 trials (seed {ref.CROSSVAL_SEED}), "
           f"worst |z| = {worst:.2f} (<= 3), {elapsed:.1f}s (< 2min)")
    assert worst <= 3.0
    assert elapsed < 120.0


# ---------------------------------------------------------------------------
# 8. Oracle suite
# ---------------------------------------------------------------------------

def test_criterion_oracle_suite():
    t0 = time.perf_counter()

    # contention table vs exhaustive enumeration of slot assignments
    worst_aloha = 0.0
    for k in range(7):
        for P in range(1, 7):
            table = aloha_joint(k, P).entries
            brute = np.zeros_like(table)
            for assignment in product(range(P), repeat=k):
                counts = np.bincount(assignment, minlength=P)
                s = int((counts == 1).sum())
                c = int((counts >= 2).sum())
                brute[s, c] += 1.0 / P ** k
            worst_aloha = max(worst_aloha, float(np.max(np.abs(table - brute))))

    # pull-hit law vs enumeration of every pulled id set
    worst_wus = 0.0
    for N in range(2, 9):
        for Q in range(N):
            for q in range(N + 1):
                d = min(q, Q)
                subsets = list(combinations(range(N), d))
                for i in range(N + 1):
                    law = np.zeros(N + 1)
                    for pulled in subsets:
                        law[sum(1 for node in pulled if node < i)] += 1.0 / len(subsets)
                    for j in range(N + 1):
                        worst_wus = max(worst_wus,
                                        abs(wus_hit_prob(j, q, i, N, Q) - law[j]))

    # normalization and flow conservation along a live horizon
    from wurmac.analytic import PullLaw, nf_pmf, np_pmf, ns_pmf

    worst_norm = worst_flow = 0.0
    for Q in (0, 1, 4, 7, 8):
        frame = make_frame(Q)
        traffic = make_traffic(25.0, 25.0)
        laws, _ = run_horizon(frame, traffic, HORIZON)
        pull = PullLaw(laws[0].nq_pmf, 40, Q)
        for fl in laws:
            worst_norm = max(worst_norm, abs(float(fl.na_pmf.probs.sum()) - 1.0))
            contenders = np_pmf(fl.na_pmf, fl.nq_pmf, Q)
            mean_w = float(pull.mean_w_given_a @ fl.na_pmf.probs)
            balance = mean_w + ns_pmf(contenders, frame.P).mean() \
                + nf_pmf(contenders, frame.P).mean()
            worst_flow = max(worst_flow, abs(fl.mean_na - balance))

    elapsed = time.perf_counter() - t0
    ok = worst_aloha < 1e-12 and worst_wus < 1e-12 and worst_norm < 1e-9 \
        and worst_flow < 1e-9 and elapsed < 10.0
    report(ok, "oracle suite",
           f"contention vs enumeration {worst_aloha:.1e} (<1e-12), pull-hit vs "
           f"enumeration {worst_wus:.1e} (<1e-12), normalization {worst_norm:.1e}, "
           f"flow conservation {worst_flow:.1e}, {elapsed:.2f}s (< 10s)")
    assert ok


# ---------------------------------------------------------------------------
# 9. Degenerate suite
# ---------------------------------------------------------------------------

def test_criterion_degenerate_suite():
    from wurmac.analytic import query_pmf
    from wurmac.energy import energy_frame

    # Q=0: no query is ever served
    _, summary_q0 = run_horizon(make_frame(0), make_traffic(25.0, 25.0), HORIZON)
    q0_ok = summary_q0.p_bar_q == 0.0

    # P=0: case-2 energy is identically zero
    frame8 = make_frame(8)
    traffic = make_traffic(15.0, 15.0)
    laws8, _ = run_horizon(frame8, traffic, HORIZON)
    nq8 = query_pmf(traffic, frame8)
    p0_ok = all(energy_frame(frame8, POWER, nq8, fl.na_pmf).e2 == 0.0 for fl in laws8)

    # alpha=0: every (nonexistent) alarm succeeds by convention
    _, summary_a0 = run_horizon(make_frame(4), make_traffic(15.0, 0.0), HORIZON)
    a0_ok = summary_a0.p_bar_a == 1.0

    # lambda_q=0: alarm success reduces to the pure contention term
    laws_nq, _ = run_horizon(make_frame(4), make_traffic(0.0, 15.0), HORIZON)
    nq_ok = all(fl.p_a == fl.p_p and fl.p_w == 0.0 and fl.p_i == 0.0 for fl in laws_nq)

    ok = q0_ok and p0_ok and a0_ok and nq_ok
    report(ok, "degenerate suite",
           f"Q=0 p_q==0: {q0_ok}; P=0 E2==0: {p0_ok}; alpha=0 p_a==1: {a0_ok}; "
           f"lambda_q=0 p_a==p_p: {nq_ok}")
    assert ok
