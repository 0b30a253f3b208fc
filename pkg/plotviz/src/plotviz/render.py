"""Render wurmac experiment CSVs into publication-style figures.

Consumes only the public CSV contract (fixed column schema); never recomputes
model quantities. One exhibit, one image:

  fig5    success probabilities vs load; analytic lines, simulation markers
  fig6    average energy vs load, one series per pull capacity
  fig7    query success vs alarm success, Q-annotated trade-off scatter
  fig8    grouped bars of the weighted success trade-off vs Q
  fig9    trade-off vs average energy, Q-annotated scatter
  fig10   grouped bars of energy per delivered packet vs push slots
  table3  grouped bars of average energy vs push slots (WuR vs MR)
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

EXHIBITS = ("fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "table3")

_CASE_COLORS = {0: "tab:gray", 1: "tab:blue", 2: "tab:cyan"}
_Q_COLORS = {"1": "tab:blue", "4": "tab:gray", "7": "tab:cyan"}
_SYSTEMS = (("WuR", "tab:gray"), ("MR k_s=1", "tab:cyan"), ("MR k_s=4", "tab:blue"))


class RenderError(ValueError):
    """Raised for schema mismatches or unusable input."""


@dataclass(frozen=True)
class FigureRecipe:
    """What to draw: exhibit name, source CSV, and the columns it relies on."""

    exhibit: str
    csv_path: Path
    required_columns: tuple = ()

    def load(self) -> list[dict]:
        with open(self.csv_path) as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            for column in self.required_columns:
                if column not in header:
                    raise RenderError(
                        f"{self.csv_path}: required column {column!r} missing")
            rows = list(reader)
        if not rows:
            raise RenderError(f"{self.csv_path}: no data rows")
        return rows


_REQUIRED = {
    "fig5": ("engine", "Q", "lambda_q", "p_bar_a", "p_bar_q"),
    "fig6": ("engine", "Q", "lambda_q", "E_bar_mJ"),
    "fig7": ("lambda_a", "lambda_q", "Q", "p_bar_a", "p_bar_q", "engine"),
    "fig8": ("lambda_a", "lambda_q", "Q", "p_bar_s", "engine"),
    "fig9": ("lambda_a", "lambda_q", "Q", "p_bar_s", "E_bar_mJ", "engine"),
    "fig10": ("P", "k_s", "E_per_success_mJ", "engine"),
    "table3": ("P", "k_s", "E_bar_mJ", "engine"),
}


def recipe_for(exhibit: str, csv_path: str | Path) -> FigureRecipe:
    if exhibit not in EXHIBITS:
        raise RenderError(f"unknown exhibit {exhibit!r}; choose from {', '.join(EXHIBITS)}")
    return FigureRecipe(exhibit=exhibit, csv_path=Path(csv_path),
                        required_columns=_REQUIRED[exhibit])


def render(recipe: FigureRecipe, out_path: str | Path) -> Path:
    """Draw the exhibit and write the image; returns the written path."""
    rows = recipe.load()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    _DRAWERS[recipe.exhibit](ax, rows)
    ax.grid(True, alpha=0.4)
    fig.tight_layout()
    out = Path(out_path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def _by_engine(rows: list[dict]) -> tuple[list[dict], list[dict]]:
    analytic = [r for r in rows if r["engine"] == "analytic"]
    mc = [r for r in rows if r["engine"] == "sim"]
    return analytic, mc


def _case_groups(rows: list[dict]) -> list[tuple[str, list[dict]]]:
    """Group by traffic mix and order each group by Q."""
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault((row["lambda_a"], row["lambda_q"]), []).append(row)
    out = []
    for (lam_a, lam_q), members in sorted(groups.items(), key=lambda kv: float(kv[0][0])):
        members.sort(key=lambda r: int(r["Q"]))
        out.append((f"$\\lambda_a$={lam_a}, $\\lambda_q$={lam_q}", members))
    return out


def _draw_fig5(ax, rows):
    analytic, mc = _by_engine(rows)
    for metric, style, label in (("p_bar_a", "-", "alarm"), ("p_bar_q", "--", "query")):
        for Q in sorted({r["Q"] for r in analytic or mc}, key=int):
            color = _Q_COLORS.get(Q, "tab:olive")
            ana = sorted((r for r in analytic if r["Q"] == Q),
                         key=lambda r: float(r["lambda_q"]))
            if ana:
                ax.plot([float(r["lambda_q"]) for r in ana],
                        [float(r[metric]) for r in ana], style, color=color,
                        label=f"{label}, Q={Q}")
            pts = sorted((r for r in mc if r["Q"] == Q),
                         key=lambda r: float(r["lambda_q"]))
            if pts:
                ax.plot([float(r["lambda_q"]) for r in pts],
                        [float(r[metric]) for r in pts],
                        "o" if metric == "p_bar_a" else "^",
                        color=color, mfc="none", linestyle="none")
    ax.set_xlabel(r"$\lambda_a = \lambda_q$ [packets/s]")
    ax.set_ylabel(r"$\bar{p}_a$, $\bar{p}_q$")
    ax.legend(fontsize=7, ncol=2)


def _draw_fig6(ax, rows):
    analytic, mc = _by_engine(rows)
    for Q in sorted({r["Q"] for r in analytic or mc}, key=int):
        color = _Q_COLORS.get(Q, "tab:olive")
        ana = sorted((r for r in analytic if r["Q"] == Q), key=lambda r: float(r["lambda_q"]))
        if ana:
            ax.plot([float(r["lambda_q"]) for r in ana],
                    [float(r["E_bar_mJ"]) for r in ana], "-", color=color, label=f"Q={Q}")
        pts = sorted((r for r in mc if r["Q"] == Q), key=lambda r: float(r["lambda_q"]))
        if pts:
            ax.plot([float(r["lambda_q"]) for r in pts],
                    [float(r["E_bar_mJ"]) for r in pts], "o", color=color,
                    mfc="none", linestyle="none")
    ax.set_xlabel(r"$\lambda_a = \lambda_q$ [packets/s]")
    ax.set_ylabel(r"$\bar{E}$ [mJ]")
    ax.legend(fontsize=8)


def _draw_fig7(ax, rows):
    analytic, _ = _by_engine(rows)
    for idx, (label, members) in enumerate(_case_groups(analytic or rows)):
        color = _CASE_COLORS[idx % 3]
        xs = [float(r["p_bar_a"]) for r in members]
        ys = [float(r["p_bar_q"]) for r in members]
        ax.plot(xs, ys, "-o", color=color, ms=4, label=label)
        for r, x, y in zip(members, xs, ys):
            ax.annotate(f"Q={r['Q']}" if r["Q"] in ("0", "8") else r["Q"],
                        (x, y), textcoords="offset points", xytext=(4, 4),
                        fontsize=6, color=color)
    ax.set_xlabel(r"$\bar{p}_a$")
    ax.set_ylabel(r"$\bar{p}_q$")
    ax.legend(fontsize=7)


def _draw_fig8(ax, rows):
    analytic, _ = _by_engine(rows)
    groups = _case_groups(analytic or rows)
    width = 0.8 / len(groups)
    for idx, (label, members) in enumerate(groups):
        color = _CASE_COLORS[idx % 3]
        xs = [int(r["Q"]) + (idx - (len(groups) - 1) / 2) * width for r in members]
        ax.bar(xs, [float(r["p_bar_s"]) for r in members], width=width,
               color=color, label=label)
    ax.set_xticks(range(9))
    ax.set_xlabel("Q")
    ax.set_ylabel(r"$\bar{p}_s$")
    ax.legend(fontsize=7)


def _draw_fig9(ax, rows):
    analytic, _ = _by_engine(rows)
    for idx, (label, members) in enumerate(_case_groups(analytic or rows)):
        color = _CASE_COLORS[idx % 3]
        xs = [float(r["E_bar_mJ"]) for r in members]
        ys = [float(r["p_bar_s"]) for r in members]
        ax.plot(xs, ys, "-o", color=color, ms=4, label=label)
        for r, x, y in zip(members, xs, ys):
            ax.annotate(f"Q={r['Q']}" if r["Q"] in ("0", "8") else r["Q"],
                        (x, y), textcoords="offset points", xytext=(4, 4),
                        fontsize=6, color=color)
    ax.set_xlabel(r"$\bar{E}$ [mJ]")
    ax.set_ylabel(r"$\bar{p}_s$")
    ax.legend(fontsize=7)


def _system_of(row: dict) -> str:
    if row["k_s"] == "":
        return "WuR"
    return f"MR k_s={row['k_s']}"


def _draw_energy_bars(ax, rows, value_column: str, ylabel: str):
    analytic, _ = _by_engine(rows)
    rows = analytic or rows
    ps = sorted({int(r["P"]) for r in rows})
    offsets = {name: i for i, (name, _) in enumerate(_SYSTEMS)}
    width = 0.8 / len(_SYSTEMS)
    for name, color in _SYSTEMS:
        members = {int(r["P"]): r for r in rows if _system_of(r) == name}
        xs, ys = [], []
        for ip, P in enumerate(ps):
            if P in members and members[P][value_column] != "":
                xs.append(ip + (offsets[name] - 1) * width)
                ys.append(float(members[P][value_column]))
        ax.bar(xs, ys, width=width, color=color, label=name)
    ax.set_xticks(range(len(ps)))
    ax.set_xticklabels([str(P) for P in ps])
    ax.set_xlabel("P")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)


def _draw_fig10(ax, rows):
    _draw_energy_bars(ax, rows, "E_per_success_mJ", r"$\bar{E}/\bar{S}$ [mJ]")


def _draw_table3(ax, rows):
    _draw_energy_bars(ax, rows, "E_bar_mJ", r"$\bar{E}$ [mJ]")


_DRAWERS = {
    "fig5": _draw_fig5,
    "fig6": _draw_fig6,
    "fig7": _draw_fig7,
    "fig8": _draw_fig8,
    "fig9": _draw_fig9,
    "fig10": _draw_fig10,
    "table3": _draw_table3,
}
