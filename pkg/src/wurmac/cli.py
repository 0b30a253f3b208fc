"""Experiment runner: config ingestion, sweeps, analytic/simulation cross-checks,
and CSV emission for the shipped exhibits.

Exit codes: 0 success, 1 cross-validation failure (some |z| > 3),
2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from . import sim
from .analytic import run_horizon
from .core import ConfigError, FrameConfig, HorizonConfig, PowerProfile, TrafficConfig, \
    build_configs, derive_q, load_config
from .energy import MrConfig, efficiency, horizon_energy, mr_horizon_energy

CSV_COLUMNS = (
    "scenario_id", "engine", "N", "F", "tau_s", "k_w", "k_c", "Q", "P", "k_s",
    "lambda_q", "lambda_a", "T_O", "n_trials", "seed",
    "p_bar_a", "p_bar_q", "p_bar_s", "E_bar_mJ", "S_bar", "E_per_success_mJ",
    "se_p_a", "se_p_q", "se_E",
)

EXHIBITS = ("fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "table3")

_FIG5_LAMBDAS = tuple(float(x) for x in range(10, 51, 5))
_FIG5_QS = (1, 4, 7)
# equal total load, shifted between queries and alarms: (label, lambda_a, lambda_q)
_TRAFFIC_CASES = (("a", 10.0, 20.0), ("b", 15.0, 15.0), ("c", 20.0, 10.0))
_PUSH_SWEEP = tuple(range(5, 36, 5))


@dataclass(frozen=True)
class PointSpec:
    """One sweep point, fully resolved; picklable for the worker pool."""

    scenario_id: str
    resolved: dict          # core config mapping (load_config shape)
    engine: str             # analytic | sim | both
    k_s: int | None = None  # main-radio baseline when set
    P: int | None = None    # explicit push-slot request (MR, or WuR via derive_q)
    n_trials: int = 10_000
    seed: int = 0
    backend: str | None = None


def _point_configs(spec: PointSpec):
    resolved = dict(spec.resolved)
    if spec.P is not None:
        resolved["Q"] = derive_q(int(resolved["F"]), int(resolved["k_w"]),
                                 int(resolved["k_c"]), spec.P)
    frame, traffic, power, horizon = build_configs(resolved)
    mr = None
    if spec.k_s is not None:
        mr = MrConfig(k_s=spec.k_s, F=frame.F, P=frame.P if spec.P is None else spec.P)
    return frame, traffic, power, horizon, mr


def evaluate_point(spec: PointSpec) -> list[dict]:
    """All CSV rows of one sweep point (one per engine)."""
    frame, traffic, power, horizon, mr = _point_configs(spec)
    base = {
        "scenario_id": spec.scenario_id,
        "N": traffic.N, "F": frame.F, "tau_s": frame.tau,
        "k_w": frame.k_w, "k_c": frame.k_c,
        "Q": mr.q_prime if mr is not None else frame.Q,
        "P": mr.P if mr is not None else frame.P,
        "k_s": "" if mr is None else mr.k_s,
        "lambda_q": traffic.lambda_q, "lambda_a": traffic.lambda_a,
        "T_O": horizon.T_O,
    }
    w_q = traffic.lambda_q / (traffic.lambda_q + traffic.lambda_a)
    w_a = 1.0 - w_q
    rows = []

    if spec.engine in ("analytic", "both"):
        cap = mr.q_prime if mr is not None else None
        laws, summary = run_horizon(frame, traffic, horizon, pull_capacity=cap)
        if mr is None:
            _, e_bar = horizon_energy(frame, power, laws)
        else:
            e_bar = mr_horizon_energy(frame, mr, power, laws)
        eff = efficiency(summary, laws, frame, traffic, e_bar)
        rows.append(base | {
            "engine": "analytic", "n_trials": "", "seed": "",
            "p_bar_a": summary.p_bar_a, "p_bar_q": summary.p_bar_q,
            "p_bar_s": summary.p_bar_s,
            "E_bar_mJ": e_bar * 1e3, "S_bar": eff.s_bar,
            "E_per_success_mJ": "" if eff.e_per_success_j is None else eff.e_per_success_j * 1e3,
            "se_p_a": "", "se_p_q": "", "se_E": "",
        })

    if spec.engine in ("sim", "both"):
        agg = sim.monte_carlo(frame, traffic, power, horizon, spec.n_trials,
                              sim.scenario_seed(spec.seed, spec.scenario_id),
                              mr=mr, backend=spec.backend)
        rows.append(base | {
            "engine": "sim", "n_trials": spec.n_trials, "seed": spec.seed,
            "p_bar_a": agg.p_a, "p_bar_q": agg.p_q,
            "p_bar_s": w_q * agg.p_q + w_a * agg.p_a,
            "E_bar_mJ": agg.e_j * 1e3, "S_bar": agg.s_bar,
            "E_per_success_mJ": "" if agg.e_per_success_j is None else agg.e_per_success_j * 1e3,
            "se_p_a": agg.se_p_a, "se_p_q": agg.se_p_q, "se_E": agg.se_e_j * 1e3,
        })
    return rows


def _run_points(points: list[PointSpec], jobs: int) -> list[dict]:
    if not points:
        raise ConfigError("empty sweep: no points to evaluate")
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            nested = list(pool.map(evaluate_point, points))
    else:
        nested = [evaluate_point(p) for p in points]
    rows = [row for group in nested for row in group]
    rows.sort(key=lambda r: (r["scenario_id"], r["engine"]))
    return rows


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def write_csv(rows: list[dict], out: str | None) -> None:
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(",".join(_fmt(row[c]) for c in CSV_COLUMNS) for row in rows)
    text = "\n".join(lines) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# Exhibit grids
# ---------------------------------------------------------------------------

def exhibit_points(name: str, resolved: dict, engine: str, n_trials: int, seed: int,
                   backend: str | None) -> list[PointSpec]:
    common = dict(engine=engine, n_trials=n_trials, seed=seed, backend=backend)
    points: list[PointSpec] = []
    if name in ("fig5", "fig6"):
        for Q in _FIG5_QS:
            for lam in _FIG5_LAMBDAS:
                r = dict(resolved) | {"Q": Q, "lambda_q": lam, "lambda_a": lam}
                points.append(PointSpec(f"{name}-Q{Q}-lam{lam:g}", r, **common))
    elif name in ("fig7", "fig8", "fig9"):
        for case, lam_a, lam_q in _TRAFFIC_CASES:
            for Q in range(9):
                r = dict(resolved) | {"Q": Q, "lambda_q": lam_q, "lambda_a": lam_a}
                points.append(PointSpec(f"{name}-{case}-Q{Q}", r, **common))
    elif name in ("fig10", "table3"):
        for P in _PUSH_SWEEP:
            r = dict(resolved) | {"lambda_q": 15.0, "lambda_a": 15.0}
            points.append(PointSpec(f"{name}-P{P:02d}-wur", r, P=P, **common))
            for k_s in (1, 4):
                points.append(PointSpec(f"{name}-P{P:02d}-mr{k_s}", r, P=P, k_s=k_s, **common))
    else:
        raise ConfigError(f"unknown exhibit {name!r}; choose from {', '.join(EXHIBITS)}")
    return points


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_figure(args) -> int:
    resolved = load_config(args.config)
    points = exhibit_points(args.name, resolved, args.engine, args.trials, args.seed,
                            args.backend)
    rows = _run_points(points, args.jobs)
    write_csv(rows, args.out)
    return 0


def cmd_sweep(args) -> int:
    resolved = load_config(args.config)
    qs = _parse_int_list(args.Q) if args.Q is not None else None
    lams = _parse_float_list(args.lam) if args.lam is not None else None
    ps = _parse_int_list(args.P) if args.P is not None else None
    kss = _parse_int_list(args.ks) if args.ks is not None else None
    if not any(axis for axis in (qs, lams, ps, kss)):
        raise ConfigError("empty sweep: give at least one non-empty axis "
                          "(--Q, --lam, --P, --ks)")
    if qs is not None and ps is not None:
        raise ConfigError("sweep by --Q or by --P, not both")

    common = dict(engine=args.engine, n_trials=args.trials, seed=args.seed,
                  backend=args.backend)
    lam_axis = lams if lams is not None else [None]
    points: list[PointSpec] = []
    for lam in lam_axis:
        r = dict(resolved)
        if lam is not None:
            r |= {"lambda_q": lam, "lambda_a": lam}
        tag = "" if lam is None else f"-lam{lam:g}"
        if ps is not None:
            for P in ps:
                if kss is not None:
                    for k_s in kss:
                        points.append(PointSpec(f"sweep-P{P:02d}-mr{k_s}{tag}", r,
                                                P=P, k_s=k_s, **common))
                else:
                    points.append(PointSpec(f"sweep-P{P:02d}-wur{tag}", r, P=P, **common))
        else:
            q_axis = qs if qs is not None else [int(r["Q"])]
            for Q in q_axis:
                r_q = dict(r) | {"Q": Q}
                if kss is not None:
                    for k_s in kss:
                        points.append(PointSpec(f"sweep-Q{Q}-mr{k_s}{tag}", r_q,
                                                P=None, k_s=k_s, **common))
                else:
                    points.append(PointSpec(f"sweep-Q{Q}{tag}", r_q, **common))
    rows = _run_points(points, args.jobs)
    write_csv(rows, args.out)
    return 0


def cmd_validate(args) -> int:
    """Analytic vs Monte Carlo on a grid; nonzero exit if any |z| > 3."""
    resolved = load_config(args.config)
    qs = _parse_int_list(args.Q) if args.Q is not None else list(_FIG5_QS)
    lams = _parse_float_list(args.lam) if args.lam is not None else list(_FIG5_LAMBDAS)
    if not qs or not lams:
        raise ConfigError("empty sweep: --Q and --lam must be non-empty")

    points = []
    for Q in qs:
        for lam in lams:
            r = dict(resolved) | {"Q": Q, "lambda_q": lam, "lambda_a": lam}
            points.append(PointSpec(f"validate-Q{Q}-lam{lam:g}", r, engine="both",
                                    n_trials=args.trials, seed=args.seed,
                                    backend=args.backend))
    rows = _run_points(points, args.jobs)
    if args.out:
        write_csv(rows, args.out)

    by_scenario: dict[str, dict[str, dict]] = {}
    for row in rows:
        by_scenario.setdefault(row["scenario_id"], {})[row["engine"]] = row

    print(f"{'scenario':<24} {'metric':<6} {'analytic':>12} {'sim':>12} {'se':>10} {'z':>7}")
    worst = 0.0
    failures = 0
    for sid in sorted(by_scenario):
        ana, mc = by_scenario[sid]["analytic"], by_scenario[sid]["sim"]
        for metric, a_key, s_key, se_key in (("p_a", "p_bar_a", "p_bar_a", "se_p_a"),
                                             ("p_q", "p_bar_q", "p_bar_q", "se_p_q"),
                                             ("E", "E_bar_mJ", "E_bar_mJ", "se_E")):
            a, s, se = ana[a_key], mc[s_key], mc[se_key]
            z = (s - a) / se if se > 0 else (0.0 if s == a else float("inf"))
            worst = max(worst, abs(z))
            flag = ""
            if abs(z) > 3:
                failures += 1
                flag = "  <-- |z| > 3"
            print(f"{sid:<24} {metric:<6} {a:>12.6f} {s:>12.6f} {se:>10.2e} {z:>+7.2f}{flag}")
    print(f"worst |z| = {worst:.3f} over {3 * len(by_scenario)} checks; "
          f"{failures} beyond 3 standard errors")
    return 1 if failures else 0


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip() != ""]


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip() != ""]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wurmac",
        description="Dual-mode pull/push wake-up-radio MAC: analytic model and simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="key=value config file")
        p.add_argument("--seed", type=lambda s: int(s, 0), default=20260809,
                       help="master seed (u64)")
        p.add_argument("--trials", type=int, default=10_000,
                       help="Monte Carlo trials per point")
        p.add_argument("--out", default=None, help="CSV output path ('-' = stdout)")
        p.add_argument("--engine", choices=("analytic", "sim", "both"), default="analytic")
        p.add_argument("--backend", choices=("compiled", "python"), default=None,
                       help="simulation kernel (default: compiled when available)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for sweep points")

    p_fig = sub.add_parser("figure", help="emit the CSV of a named exhibit")
    p_fig.add_argument("name", help=f"one of {', '.join(EXHIBITS)}")
    common(p_fig)
    p_fig.set_defaults(func=cmd_figure)

    p_sweep = sub.add_parser("sweep", help="evaluate a parameter sweep")
    common(p_sweep)
    p_sweep.add_argument("--Q", default=None, help="comma list of pull capacities")
    p_sweep.add_argument("--lam", default=None,
                         help="comma list of rates, sets lambda_a = lambda_q")
    p_sweep.add_argument("--P", default=None, help="comma list of push-slot counts")
    p_sweep.add_argument("--ks", default=None,
                         help="comma list of schedule lengths (main-radio baseline)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate",
                           help="cross-validate the engines (default grid: fig5)")
    common(p_val)
    p_val.add_argument("--Q", default=None, help="comma list of pull capacities")
    p_val.add_argument("--lam", default=None,
                       help="comma list of rates, sets lambda_a = lambda_q")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "engine", None) and args.command == "validate":
        args.engine = "both"
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
