import json
import math

import numpy as np
import pytest

from syklab import serialize
from syklab.cli import main


def test_algebra_check(capsys):
    assert main(["algebra", "check", "--n", "3", "--trials", "25"]) == 0
    out = capsys.readouterr().out
    assert out.count("pass") == 3


def test_sample_and_spectrum_round_trip(tmp_path, capsys):
    inst_path = str(tmp_path / "inst.json")
    assert main(["sample", "--model", "syk", "--n", "4", "--p", "0.5",
                 "--seed", "7", "--out", inst_path]) == 0
    data = serialize.load_json(inst_path)
    assert data["model"] == "syk" and data["p"] == 1.0  # syk forces p = 1
    assert len(data["terms"]) == math.comb(8, 4)
    capsys.readouterr()
    assert main(["spectrum", "--in", inst_path, "--method", "lanczos"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["converged"] is True
    assert payload["lambda_max"] > 0


def test_sample_requires_model_arguments(tmp_path):
    out = str(tmp_path / "x.json")
    assert main(["sample", "--model", "ssyk", "--seed", "1", "--out", out]) == 2
    assert main(["sample", "--model", "two-color", "--seed", "1",
                 "--out", out]) == 2


def test_ho_commutators_and_sweep(tmp_path, capsys):
    tc_path = str(tmp_path / "tc.json")
    main(["sample", "--model", "two-color", "--n1", "6", "--n2", "3",
          "--p", "1.0", "--seed", "1", "--out", tc_path])
    capsys.readouterr()
    assert main(["ho", "commutators", "--in", tc_path]) == 0
    out = capsys.readouterr().out
    lines = {line.split("=")[0].strip(): float(line.split("=")[1])
             for line in out.strip().splitlines()}
    route_a = lines["single commutator, matrix route"]
    route_b = lines["single commutator, coupling route"]
    assert abs(route_a - route_b) <= 1e-10

    sweep_path = str(tmp_path / "sweep.csv")
    assert main(["ho", "sweep", "--in", tc_path, "--theta-max", "0.2",
                 "--step", "0.05", "--out", sweep_path]) == 0
    header, rows = serialize.read_csv(sweep_path)
    assert header == ["theta", "energy"]
    assert len(rows) == 5
    assert float(rows[0][1]) == pytest.approx(0.0, abs=1e-12)


def test_gaussian_opt_and_witness(tmp_path, capsys):
    inst_path = str(tmp_path / "inst.json")
    main(["sample", "--model", "ssyk", "--n", "6", "--p", "1.0",
          "--seed", "3", "--out", inst_path])
    out_path = str(tmp_path / "g.json")
    assert main(["gaussian", "opt", "--in", inst_path, "--restarts", "1",
                 "--out", out_path]) == 0
    payload = serialize.load_json(out_path)
    assert payload["method"] == "gradient-ascent"
    assert len(payload["gamma"]) == 12 * 12
    gamma = np.array(payload["gamma"]).reshape(12, 12)
    assert np.max(np.abs(gamma + gamma.T)) < 1e-10
    capsys.readouterr()
    assert main(["gaussian", "witness", "--in", inst_path]) == 0
    assert "witness energy" in capsys.readouterr().out


def test_theta_graph_and_fit(tmp_path, capsys):
    fig_path = str(tmp_path / "fig.csv")
    assert main(["theta", "graph", "--n", "3", "--q", "4",
                 "--p-grid", "0.4,0.7,1.0", "--trials", "2", "--seed", "9",
                 "--out", fig_path]) == 0
    header, rows = serialize.read_csv(fig_path)
    assert header == ["p", "trial", "vertices", "theta", "converged"]
    assert len(rows) == 6
    capsys.readouterr()
    plot_path = str(tmp_path / "fig.svg")
    assert main(["theta", "fit", "--in", fig_path, "--plot", plot_path]) == 0
    out = capsys.readouterr().out
    assert "residual_sqrt" in out and "residual_linear" in out
    assert (tmp_path / "fig.svg").exists()


def test_theta_fit_on_synthetic_sqrt_data(tmp_path, capsys):
    fig_path = tmp_path / "synthetic.csv"
    rows = []
    for p in (0.1, 0.3, 0.5, 0.8, 1.0):
        for trial in range(2):
            rows.append((p, trial, 10, 2 * math.sqrt(p) + 3, True))
    serialize.write_csv(fig_path, ["p", "trial", "vertices", "theta",
                                   "converged"], rows)
    assert main(["theta", "fit", "--in", str(fig_path)]) == 0
    out = capsys.readouterr().out
    values = {line.split("=")[0].strip(): float(line.split("=")[1])
              for line in out.strip().splitlines()}
    assert values["c1"] == pytest.approx(2.0, abs=1e-9)
    assert values["c2"] == pytest.approx(3.0, abs=1e-9)
    assert values["residual_sqrt"] < values["residual_linear"]


def test_experiment_run_and_config_error(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    serialize.save_json({"experiment": "witness", "n": [6], "p": [1.0],
                         "trials": 2, "seed": 0}, cfg)
    assert main(["experiment", "run", "--config", str(cfg),
                 "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "manifest.json").exists()

    bad = tmp_path / "bad.json"
    serialize.save_json({"experiment": "witness", "n": [5], "p": [3.0],
                         "trials": 0, "seed": 0}, bad)
    capsys.readouterr()
    assert main(["experiment", "run", "--config", str(bad),
                 "--out", str(tmp_path / "nope")]) == 2
    err = capsys.readouterr().err
    assert "config errors" in err


def test_missing_file_is_config_error():
    assert main(["spectrum", "--in", "/nonexistent/path.json"]) == 2
