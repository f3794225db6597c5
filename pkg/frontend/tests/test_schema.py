import math

import pytest

from qdiode_figs.schema import COLUMNS, SchemaError, read_rows

from conftest import fock_row, write_csv


def test_round_trip_types(line_csv):
    rows = read_rows(line_csv)
    assert len(rows) == 3 * 21
    first = rows[0]
    assert first.n == 1
    assert first.nbar is None
    assert first.omega_over_gamma == 0.01
    assert first.delta_over_gamma == -0.2
    assert first.solver_mode == "steady_state"
    assert first.converged is True
    assert {r.n for r in rows} == {1, 2, 22}


def test_refused_rows_parse_as_nan(heatmap_csv):
    rows = read_rows(heatmap_csv)
    refused = [r for r in rows if not r.converged]
    assert len(refused) == 6
    assert all(math.isnan(r.r1) for r in refused)
    assert all(math.isnan(r.t_fwd) for r in refused)


def test_missing_file_is_descriptive(tmp_path):
    with pytest.raises(SchemaError, match="does not exist"):
        read_rows(tmp_path / "nope.csv")


def test_renamed_column_is_reported(tmp_path):
    path = tmp_path / "bad.csv"
    header = list(COLUMNS)
    header[header.index("r1")] = "rect1"
    with open(path, "w") as handle:
        handle.write(",".join(header) + "\n")
        handle.write(",".join(["1", "", "0.01", "0.0", "0.25", "0.005",
                               "0.1", "0.1", "0", "0", "0", "0",
                               "steady_state", "true"]) + "\n")
    with pytest.raises(SchemaError) as err:
        read_rows(path)
    assert "missing columns: r1" in str(err.value)
    assert "unexpected columns: rect1" in str(err.value)


def test_extra_column_is_rejected(tmp_path):
    path = tmp_path / "extra.csv"
    with open(path, "w") as handle:
        handle.write(",".join(COLUMNS + ["note"]) + "\n")
    with pytest.raises(SchemaError, match="unexpected columns: note"):
        read_rows(path)


def test_reordered_columns_are_rejected(tmp_path):
    path = tmp_path / "swapped.csv"
    header = list(COLUMNS)
    header[0], header[1] = header[1], header[0]
    with open(path, "w") as handle:
        handle.write(",".join(header) + "\n")
    with pytest.raises(SchemaError, match="out of order"):
        read_rows(path)


def test_header_only_file_is_rejected(tmp_path):
    path = tmp_path / "empty.csv"
    write_csv(path, [])
    with pytest.raises(SchemaError, match="no data rows"):
        read_rows(path)


def test_zero_byte_file_is_rejected(tmp_path):
    path = tmp_path / "zero.csv"
    path.touch()
    with pytest.raises(SchemaError, match="no header"):
        read_rows(path)


def test_ragged_row_is_located(tmp_path):
    path = tmp_path / "ragged.csv"
    with open(path, "w") as handle:
        handle.write(",".join(COLUMNS) + "\n")
        handle.write("1,2,3\n")
    with pytest.raises(SchemaError, match="line 2: 3 cells"):
        read_rows(path)


def test_text_in_numeric_column_is_located(tmp_path):
    path = tmp_path / "text.csv"
    row = fock_row(1, 0.0, 0.25, 0.1)
    row[COLUMNS.index("t_fwd")] = "high"
    write_csv(path, [row])
    with pytest.raises(SchemaError, match="column 't_fwd' holds 'high'"):
        read_rows(path)


def test_bad_convergence_flag_is_rejected(tmp_path):
    path = tmp_path / "flag.csv"
    row = fock_row(1, 0.0, 0.25, 0.1)
    row[-1] = "maybe"
    write_csv(path, [row])
    with pytest.raises(SchemaError, match="converged must be true or false"):
        read_rows(path)
