"""Renders real simulator output when the producer CLI is installed.

These tests shell out to the qdiode executable, which is the only
permitted coupling between the two packages (the CSV contract plus the
command line). They skip cleanly when the simulator is absent so this
package stands alone.
"""

import json
import shutil
import subprocess

import numpy as np
import pytest

from qdiode_figs.plots import PlotSpec, render
from qdiode_figs.schema import read_rows

pytestmark = pytest.mark.skipif(
    shutil.which("qdiode") is None, reason="qdiode CLI not installed"
)


def run_sweep(name, tmp_path, axes):
    """Fetch a preset config, shrink its axes, run the sweep."""
    config = json.loads(
        subprocess.run(
            ["qdiode", "preset", name], capture_output=True, text=True, check=True
        ).stdout
    )
    config.update(axes)
    config_path = tmp_path / f"{name}.json"
    config_path.write_text(json.dumps(config))
    csv_path = tmp_path / f"{name}.csv"
    subprocess.run(
        ["qdiode", "sweep", "--config", str(config_path), "--out", str(csv_path)],
        check=True,
    )
    return csv_path


def coarse(lo, hi, count):
    return [round(lo + (hi - lo) * k / (count - 1), 6) for k in range(count)]


def test_heatmap_from_reduced_fig2(tmp_path):
    csv_path = run_sweep(
        "fig2",
        tmp_path,
        {
            "n": [1],
            "theta_over_2pi": coarse(0.0, 1.0, 13),
            "delta_over_gamma": coarse(-0.5, 0.5, 13),
        },
    )
    out = tmp_path / "fig2.png"
    render(PlotSpec(csv_path=str(csv_path), kind="heatmap", out_path=str(out)))
    assert out.exists()


def test_line_from_reduced_fig3_shows_negative_dip(tmp_path):
    csv_path = run_sweep(
        "fig3",
        tmp_path,
        {"n": [1, 22], "delta_over_gamma": coarse(-0.2, 0.2, 21)},
    )
    rows = read_rows(csv_path)
    assert {r.n for r in rows} == {1, 22}
    deep = [
        r.r1 for r in rows if r.n == 22 and r.converged and not np.isnan(r.r1)
    ]
    assert min(deep) < -0.1  # the rectification reversal is in the data
    out = tmp_path / "fig3.png"
    render(PlotSpec(csv_path=str(csv_path), kind="line", out_path=str(out)))
    assert out.exists()


def test_metric_compare_from_reduced_fig4(tmp_path):
    csv_path = run_sweep(
        "fig4",
        tmp_path,
        {"delta_over_gamma": coarse(-0.2, 0.2, 21)},
    )
    out = tmp_path / "fig4.png"
    render(
        PlotSpec(csv_path=str(csv_path), kind="metric-compare", out_path=str(out))
    )
    assert out.exists()
