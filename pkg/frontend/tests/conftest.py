"""Synthetic sweep CSVs shaped like the producer's presets.

The fixtures write files that follow the CSV contract exactly (shortest
round-trip floats, empty cells for absent values, lowercase flags) so the
reader is exercised against the same texture the real sweeps produce.
"""

import csv
import math

import pytest

from qdiode_figs.schema import COLUMNS


def write_csv(path, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(COLUMNS)
        writer.writerows(rows)


def fock_row(n, delta, theta, r1, omega=0.01, converged=True):
    flux = n * omega / 2.0
    head = [n, "", repr(omega), repr(delta), repr(theta), repr(flux)]
    if not converged:
        return head + ["nan"] * 6 + ["steady_state", "false"]
    # plot inputs only; the metric columns need not be mutually consistent
    t_bwd = 0.01
    metrics = [t_bwd + r1, t_bwd, r1, r1 / 2.0, abs(r1) / 2.0, abs(r1) * 0.4]
    return head + [repr(float(v)) for v in metrics] + ["steady_state", "true"]


def coherent_row(nbar, flux, r1, omega=0.01):
    head = ["", repr(float(nbar)), repr(omega), repr(-0.23), repr(0.5172), repr(float(flux))]
    metrics = [0.3 + r1, 0.3, r1, r1 / 2.0, abs(r1) / 2.0, abs(r1) * 0.4]
    return head + [repr(float(v)) for v in metrics] + ["steady_state", "true"]


@pytest.fixture
def line_csv(tmp_path):
    """Three Fock curves vs detuning; the n=22 one dips clearly negative."""
    path = tmp_path / "line.csv"
    deltas = [-0.2 + 0.02 * k for k in range(21)]
    rows = []
    for n in (1, 2, 22):
        for delta in deltas:
            r1 = 0.25 - 0.4 * math.exp(-(((delta - 0.04) / 0.05) ** 2)) * n / 22.0
            rows.append(fock_row(n, delta, 0.5025, r1))
    write_csv(path, rows)
    return path


@pytest.fixture
def heatmap_csv(tmp_path):
    """Two small Fock heatmaps with one refused cell each."""
    path = tmp_path / "map.csv"
    rows = []
    for n in (1, 2):
        for i in range(9):
            theta = i / 8.0
            for j in range(11):
                delta = -0.5 + 0.1 * j
                refused = delta == 0.0 and theta in (0.0, 0.5, 1.0)
                r1 = 0.6 * math.sin(2.0 * math.pi * theta) * math.cos(delta) / n
                rows.append(fock_row(n, delta, theta, r1, converged=not refused))
    write_csv(path, rows)
    return path


@pytest.fixture
def plateau_csv(tmp_path):
    """A coherent flux scan with a flat top."""
    path = tmp_path / "plateau.csv"
    rows = []
    for k in range(25):
        flux = 10.0 ** (-4.0 + 4.0 * k / 24.0)
        r1 = 0.6 / (1.0 + (flux / 0.2) ** 2)
        rows.append(coherent_row(nbar=flux * 200.0, flux=flux, r1=r1))
    write_csv(path, rows)
    return path
