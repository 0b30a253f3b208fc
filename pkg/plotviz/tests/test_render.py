"""Renders every exhibit from CSVs produced by the wurmac CLI (the public
interface between the packages) and exercises the error paths."""

import subprocess
import sys
from pathlib import Path

import pytest

from plotviz import EXHIBITS, RenderError, recipe_for, render


@pytest.fixture(scope="session")
def csv_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("csvs")
    for name in EXHIBITS:
        argv = ["wurmac", "figure", name, "--out", str(out / f"{name}.csv")]
        if name == "fig5":  # analytic lines + simulation markers overlay
            argv += ["--engine", "both", "--trials", "300", "--seed", "11"]
        proc = subprocess.run(argv, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
    return out


@pytest.mark.parametrize("name", EXHIBITS)
def test_renders_every_exhibit(csv_dir, tmp_path, name):
    out = render(recipe_for(name, csv_dir / f"{name}.csv"), tmp_path / f"{name}.png")
    assert out.exists() and out.stat().st_size > 1000


def test_fig5_overlay_includes_both_engines(csv_dir):
    rows = recipe_for("fig5", csv_dir / "fig5.csv").load()
    assert {r["engine"] for r in rows} == {"analytic", "sim"}


def test_rerender_is_identical(csv_dir, tmp_path):
    recipe = recipe_for("fig8", csv_dir / "fig8.csv")
    a = render(recipe, tmp_path / "a.png")
    b = render(recipe, tmp_path / "b.png")
    assert a.read_bytes() == b.read_bytes()


def test_unknown_exhibit_rejected(csv_dir):
    with pytest.raises(RenderError, match="unknown exhibit"):
        recipe_for("fig11", csv_dir / "fig5.csv")


def test_missing_column_named(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("scenario_id,engine,Q\nx,analytic,1\n")
    with pytest.raises(RenderError, match="'lambda_q' missing"):
        render(recipe_for("fig5", bad), tmp_path / "x.png")


SCHEMA = ("scenario_id,engine,N,F,tau_s,k_w,k_c,Q,P,k_s,lambda_q,lambda_a,T_O,"
          "n_trials,seed,p_bar_a,p_bar_q,p_bar_s,E_bar_mJ,S_bar,E_per_success_mJ,"
          "se_p_a,se_p_q,se_E")


def test_empty_csv_writes_nothing(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text(SCHEMA + "\n")
    target = tmp_path / "x.png"
    with pytest.raises(RenderError, match="no data rows"):
        render(recipe_for("fig7", empty), target)
    assert not target.exists()


def test_cli_round_trip(csv_dir, tmp_path):
    out = tmp_path / "fig10.png"
    proc = subprocess.run(["wurmac-plot", "render", "--exhibit", "fig10",
                           "--csv", str(csv_dir / "fig10.csv"), "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()


def test_cli_reports_schema_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    proc = subprocess.run(["wurmac-plot", "render", "--exhibit", "fig6",
                           "--csv", str(bad), "--out", str(tmp_path / "x.png")],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "missing" in proc.stderr
