import json

import numpy as np
import pytest

from syklab import harness, serialize
from syklab.harness import ConfigError, ExperimentConfig, run_experiment


def test_config_validation_collects_all_problems():
    bad = {"experiment": "universality", "n": [40], "p": [2.0], "trials": 0,
           "seed": "x"}
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_dict(bad)
    problems = err.value.problems
    assert len(problems) == 4
    assert any("n=40" in p for p in problems)
    assert any("p=2.0" in p for p in problems)
    assert any("trials" in p for p in problems)
    assert any("seed" in p for p in problems)


def test_config_rejects_unknown_experiment():
    with pytest.raises(ConfigError, match="experiment"):
        ExperimentConfig.from_dict({"experiment": "bogus"})


@pytest.mark.parametrize("config", [
    {"experiment": "witness", "n": [5], "p": [1.0], "trials": 1, "seed": 0},
    {"experiment": "gap", "n": [12], "p": [1.0], "trials": 1, "seed": 0},
    {"experiment": "lovasz-scaling", "n": 5, "p": [0.5, 1.0], "trials": 1,
     "seed": 0},
    {"experiment": "lovasz-scaling", "n": 9, "p": [0.2, 0.5, 1.0], "trials": 1,
     "seed": 0},
])
def test_config_rejects_out_of_cap_requests(config):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(config)


def test_fuzzed_invalid_configs_never_reach_execution(tmp_path):
    rng = np.random.default_rng(0)
    bad_values = {
        "n": [[-1], [0], "four", [99], None],
        "p": [[0.0], [1.2], ["half"], [], None],
        "trials": [0, -3, "many", None],
        "seed": ["zero", 1.5, None],
    }
    for _ in range(40):
        config = {"experiment": "witness", "n": [6], "p": [1.0], "trials": 1,
                  "seed": 0}
        broken = rng.choice(list(bad_values))
        choices = bad_values[broken]
        value = choices[int(rng.integers(len(choices)))]
        if value is None:
            config.pop(broken)
        else:
            config[broken] = value
        with pytest.raises(ConfigError):
            run_experiment(config, tmp_path / "never")
        assert not (tmp_path / "never").exists()


def test_run_witness_and_rerun_bytes(tmp_path):
    config = {"experiment": "witness", "n": [6], "p": [1.0], "trials": 4,
              "seed": 5}
    res1 = run_experiment(config, tmp_path / "a")
    assert not res1.failures
    table = (tmp_path / "a" / "witness.csv").read_bytes()
    summary = (tmp_path / "a" / "summary.json").read_bytes()

    manifest = serialize.load_json(tmp_path / "a" / "manifest.json")
    assert manifest["config_hash"] == serialize.config_hash(config)
    res2 = run_experiment(manifest, tmp_path / "b")
    assert (tmp_path / "b" / "witness.csv").read_bytes() == table
    assert (tmp_path / "b" / "summary.json").read_bytes() == summary


def test_run_witness_zero_couplings(tmp_path):
    config = {"experiment": "witness", "n": [6], "p": [1.0], "trials": 3,
              "seed": 1, "zero_couplings": True}
    run_experiment(config, tmp_path / "z")
    header, rows = serialize.read_csv(tmp_path / "z" / "witness.csv")
    assert header == ["n", "p", "seed", "energy"]
    assert all(float(r[3]) == 0.0 for r in rows)


def test_run_universality_minimal(tmp_path):
    config = {"experiment": "universality", "n": [4], "p": [0.5], "trials": 2,
              "seed": 0}
    res = run_experiment(config, tmp_path / "u")
    header, rows = serialize.read_csv(res.files["table"])
    assert header == ["n", "p", "seed", "lambda_max", "lambda_over_sqrt_n",
                      "residual", "iterations"]
    assert len(rows) == 2
    summary = serialize.load_json(res.files["summary"])
    assert summary["cells"][0]["trials"] == 2


def test_run_gap_minimal(tmp_path):
    config = {"experiment": "gap", "n": [4], "p": [1.0], "trials": 2,
              "seed": 3, "restarts": 2}
    res = run_experiment(config, tmp_path / "g")
    header, rows = serialize.read_csv(res.files["table"])
    assert header == ["n", "p", "seed", "lambda_max", "lambda_gauss",
                      "ho_energy_on_full", "gauss_ratio", "ho_ratio"]
    assert len(rows) == 2
    for row in rows:
        lam = float(row[3])
        gauss = float(row[4])
        assert 0 < gauss <= lam + 1e-9
        assert 0 <= float(row[6]) <= 1 + 1e-6


def test_gap_row_empty_instance_is_all_zeros():
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        row = harness._gap_row((4, 1e-9, 0, 2, 0.01, 1.0, "auto"))
    assert row == (4, 1e-9, 0, 0.0, 0.0, 0.0, 0.0, 0.0)


def test_run_lovasz_scaling_minimal(tmp_path):
    config = {"experiment": "lovasz-scaling", "n": 3, "p": [0.4, 0.7, 1.0],
              "trials": 2, "seed": 9, "tol": 1e-7}
    res = run_experiment(config, tmp_path / "l")
    assert not res.failures
    header, rows = serialize.read_csv(res.files["table"])
    assert header == ["p", "trial", "vertices", "theta", "converged"]
    assert len(rows) == 6
    fit = serialize.load_json(res.files["fit"])
    assert set(fit) == {"c1", "c2", "residual_sqrt", "residual_linear",
                        "points"}
    svg = (tmp_path / "l" / "plot.svg").read_text()
    assert svg.startswith("<svg") and "</svg>" in svg
    # rerun reproduces every artifact byte for byte
    res2 = run_experiment(config, tmp_path / "l2")
    for name in ("fig1.csv", "fit.json", "plot.svg"):
        assert ((tmp_path / "l" / name).read_bytes()
                == (tmp_path / "l2" / name).read_bytes())


def test_pool_map_respects_thread_env(monkeypatch):
    monkeypatch.setenv("SYKLAB_THREADS", "1")
    assert harness.pool_map(lambda x: x * x, range(5)) == [0, 1, 4, 9, 16]
    monkeypatch.setenv("SYKLAB_THREADS", "4")
    assert harness.pool_map(lambda x: x * x, range(5)) == [0, 1, 4, 9, 16]


def test_csv_floats_round_trip(tmp_path):
    path = tmp_path / "x.csv"
    value = 0.1 + 0.2  # not representable prettily
    serialize.write_csv(path, ["a"], [(value,)])
    _, rows = serialize.read_csv(path)
    assert float(rows[0][0]) == value
    assert json.loads(json.dumps(value)) == value
