import csv
import json

import numpy as np
import pytest

from detune_sim.cli.config import load_config, parse_config_text
from detune_sim.cli.main import main, parse_overrides, parse_value
from detune_sim.cli.output import render_csv, write_csv
from detune_sim.errors import ParseError, ValidationError
from detune_sim.models import TwoLevelParams
from detune_sim.propagators import two_level_trajectory


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_defaults_applied():
    cfg = load_config(overrides={"Delta": 10.0}, command="simulate")
    assert cfg.t_max == 100.0 and cfg.grid_points == 2001
    assert "t_max" in cfg.defaults_applied


def test_t_max_default_follows_g():
    assert load_config(overrides={"Delta": 10.0, "g": 2.0}, command="simulate").t_max == 50.0


def test_n_must_be_positive():
    with pytest.raises(ValidationError, match="N must be ≥ 1"):
        load_config(overrides={"N": 0, "Delta": 10.0}, command="simulate")


def test_figure_preset_and_override_precedence(tmp_path):
    cfg = load_config(overrides={"figure": "fig2"}, command="figure")
    assert (cfg.N, cfg.Delta, cfg.kappa, cfg.gamma) == ([1, 5, 25], 10.0, 0.1, 0.01)
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"figure": "fig2", "Delta": 20.0, "kappa": 0.2}))
    cfg = load_config(path, {"kappa": 0.3}, command="figure")
    assert (cfg.Delta, cfg.kappa) == (20.0, 0.3)


def test_unknown_key():
    with pytest.raises(ValidationError) as info:
        load_config(overrides={"Delat": 10.0}, command="simulate")
    assert info.value.key == "Delat"


def test_missing_delta():
    with pytest.raises(ValidationError, match="Delta"):
        load_config(command="simulate")


def test_parse_error_location():
    with pytest.raises(ParseError) as info:
        parse_config_text('{\n  "N": [1, 2\n}')
    assert info.value.line == 3


def test_parse_overrides():
    assert parse_value("1,4,16") == [1, 4, 16]
    assert parse_value("0.5") == 0.5
    assert parse_value("full") == "full"
    assert parse_overrides(["--leak-tol", "0.05", "--N=4"]) == {"leak_tol": 0.05, "N": [4]}


def test_empty_table_refused(tmp_path):
    with pytest.raises(ValueError):
        write_csv((["a"], []), tmp_path / "x.csv")
    assert not (tmp_path / "x.csv").exists()


def test_one_row_table(tmp_path):
    path = write_csv((["a", "b"], [[1, 0.1]]), tmp_path / "x.csv")
    assert path.read_bytes() == b"a,b\n1,0.10000000000000001\n"


def test_csv_round_trips_floats():
    tr = two_level_trajectory(TwoLevelParams(5, 1.0, 10.0), np.linspace(0, 3, 7))
    rows = list(csv.reader(render_csv(tr).splitlines()))
    assert rows[0] == ["t", "pop_plus", "pop_minus"]
    assert np.array_equal(np.array(rows[1:], float)[:, 1], tr.series["pop_plus"])


def test_figure_fig2(tmp_path, capsys):
    assert main(["figure", "fig2", "--out", str(tmp_path), "--grid_points", "401"]) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["fig2.svg", "fig2_N1.csv", "fig2_N25.csv", "fig2_N5.csv", "manifest.txt"]
    mins = [min(float(r[1]) for r in read_rows(tmp_path / f"fig2_N{n}.csv")[1:]) for n in (1, 5, 25)]
    assert mins[0] > mins[1] > mins[2]
    assert "Delta/(sqrtN g)" in capsys.readouterr().out


def test_figure_fig4(tmp_path):
    assert main(["figure", "fig4", "--out", str(tmp_path), "--grid_points", "20001"]) == 0
    rows = read_rows(tmp_path / "fig4_N25.csv")
    col = rows[0].index("pop_u1")
    peak = max(float(r[col]) for r in rows[1:])
    assert peak == pytest.approx(100 / 204, abs=1e-3)


def test_threshold(tmp_path):
    assert main(["threshold", "--N", "1,16", "--out", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "threshold.csv")
    d1, d16 = float(rows[1][3]), float(rows[2][3])
    assert d16 / d1 == pytest.approx(4.0, abs=1e-6)


def test_sweep_command(tmp_path):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({"g": 1.0, "Delta": 10.0, "axes": {"N": [1, 25]},
                               "metrics": ["max_leakage"]}))
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "o"), "--jobs", "2"]) == 0
    rows = read_rows(tmp_path / "o" / "sweep.csv")
    assert rows[0] == ["N", "metric", "value"]
    assert float(rows[2][2]) == pytest.approx(0.5)


def test_validate(tmp_path):
    assert main(["validate", "--out", str(tmp_path)]) == 0
    assert all(r[3] == "true" for r in read_rows(tmp_path / "validate.csv")[1:])


def test_reruns_are_byte_identical(tmp_path):
    args = ["simulate", "--model", "lambda", "--N", "1,5", "--Omega", "10", "--Delta", "100",
            "--delta", "0.3", "--t_max", "20", "--grid_points", "201"]
    assert main([*args, "--out", str(tmp_path / "a")]) == 0
    assert main([*args, "--out", str(tmp_path / "b"), "--jobs", "2"]) == 0
    for name in ("simulate_lambda_N1.csv", "simulate_lambda_N5.csv", "simulate_lambda.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    stable = [(tmp_path / d / "manifest.txt").read_text().split("timestamp:")[0] for d in "ab"]
    assert stable[0] == stable[1]


def test_bad_config_exits_nonzero(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert "error" in capsys.readouterr().err
    assert main(["explode"]) == 1
    assert main(["simulate", "--Delta", "10", "--N", "0"]) == 1
