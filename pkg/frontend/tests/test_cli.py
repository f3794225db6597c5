import json

from qdiode_figs.cli import main

from conftest import write_csv


def test_render_success(line_csv, tmp_path, capsys):
    out = tmp_path / "fig.png"
    code = main([str(line_csv), "--kind", "line", "--out", str(out)])
    assert code == 0
    assert out.exists()
    assert capsys.readouterr().out.strip() == str(out)


def test_kind_and_value_flags(line_csv, tmp_path):
    out = tmp_path / "fig.png"
    code = main(
        [str(line_csv), "--kind", "metric-compare", "--out", str(out),
         "--title", "metrics", "--x-label", "detuning"]
    )
    assert code == 0
    assert out.exists()


def test_schema_failure_exits_1(tmp_path, capsys):
    path = tmp_path / "empty.csv"
    write_csv(path, [])
    out = tmp_path / "never.png"
    code = main([str(path), "--kind", "line", "--out", str(out)])
    assert code == 1
    assert not out.exists()
    err = json.loads(capsys.readouterr().err)
    assert err["kind"] == "validation"
    assert "no data rows" in err["error"]


def test_missing_input_exits_1(tmp_path, capsys):
    code = main(
        [str(tmp_path / "nope.csv"), "--kind", "line", "--out", "x.png"]
    )
    assert code == 1
    assert json.loads(capsys.readouterr().err)["kind"] == "validation"


def test_unwritable_output_exits_2(line_csv, tmp_path, capsys):
    out = tmp_path / "no" / "such" / "dir" / "fig.png"
    code = main([str(line_csv), "--kind", "line", "--out", str(out)])
    assert code == 2
    assert json.loads(capsys.readouterr().err)["kind"] == "runtime"


def test_bad_flag_exits_1(line_csv, capsys):
    code = main([str(line_csv), "--kind", "pie", "--out", "x.png"])
    assert code == 1
    capsys.readouterr()


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0
    assert "sweep CSV" in capsys.readouterr().out
