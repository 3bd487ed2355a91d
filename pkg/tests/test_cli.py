import csv
import json

import numpy as np
import pytest

from quantspline.cli import main
from quantspline.dataio import ingest_csv
from quantspline.estimator import evaluate, fit
from quantspline.exceptions import DataError


def _write(path, rows, header=("x", "y")):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(str(v) for v in r) + "\n")
    return str(path)


@pytest.fixture
def data_csv(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.uniform(0, 1, 120)
    y = np.sin(2 * np.pi * x) + 0.4 * rng.standard_normal(120)
    return _write(tmp_path / "data.csv", zip(x, y))


def test_ingest_grid_fixture_verbatim(tmp_path):
    x = np.arange(1, 9) / 8
    y = np.arange(8.0)
    d = ingest_csv(_write(tmp_path / "g.csv", zip(x, y)), mapping="none")
    np.testing.assert_array_equal(d.y, y)
    np.testing.assert_array_equal(d.x, x)
    assert not d.mapped_grid


def test_ingest_rank_mapping(tmp_path):
    x = np.array([0.9, 0.1, 0.5, 0.3, 0.7, 0.2, 0.8, 0.4])
    y = np.arange(8.0)
    d = ingest_csv(_write(tmp_path / "s.csv", zip(x, y)))
    np.testing.assert_array_equal(d.y, y[np.argsort(x)])
    np.testing.assert_array_equal(d.x, np.arange(1, 9) / 8)
    assert d.mapped_grid


def test_ingest_ties_keep_input_order(tmp_path):
    x = [0.5, 0.1, 0.5, 0.2, 0.3, 0.4, 0.6, 0.7]
    d = ingest_csv(_write(tmp_path / "t.csv", zip(x, range(8))))
    assert list(d.y[-3:-1]) == [0.0, 2.0] or list(d.y[4:6]) == [0.0, 2.0]
    with pytest.raises(DataError, match="tied"):
        ingest_csv(str(tmp_path / "t.csv"), mapping="none")


def test_ingest_errors(tmp_path):
    rows = [(i / 8, i) for i in range(1, 9)]
    rows[3] = (0.5, "NA")
    with pytest.raises(DataError, match="row 5"):
        ingest_csv(_write(tmp_path / "na.csv", rows))
    with pytest.raises(DataError, match="no such file"):
        ingest_csv(str(tmp_path / "missing.csv"))
    with pytest.raises(DataError, match="at least 8"):
        ingest_csv(_write(tmp_path / "few.csv", [(0.1, 1), (0.2, 2)]))
    with pytest.raises(DataError, match="design point"):
        ingest_csv(_write(tmp_path / "off.csv", [(i / 9, i) for i in range(1, 9)]), mapping="none")
    with pytest.raises(DataError, match="missing column"):
        ingest_csv(_write(tmp_path / "cols.csv", rows, header=("a", "b")))


def test_estimate_round_trip(tmp_path, data_csv):
    out = tmp_path / "curve.csv"
    assert main(["estimate", "--input", data_csv, "--b", "5", "--m", "2", "--lambda", "gcv", "--output", str(out)]) == 0
    meta = json.loads((tmp_path / "curve.csv.json").read_text())
    assert meta["lambda_rule"] == "gcv" and meta["lambda"] > 0 and meta["mapped_grid"]
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    x = np.array([float(r["x"]) for r in rows])
    f = np.array([float(r["f_hat"]) for r in rows])
    theta = np.array(meta["theta"])
    refit = fit(np.zeros(theta.size), 2, meta["lambda"])
    refit = refit.__class__(theta=theta, fitted_grid=refit.fitted_grid, lam=meta["lambda"], n=theta.size, m=2)
    np.testing.assert_allclose(evaluate(refit, x), f, rtol=0, atol=1e-12)


def test_estimate_center_and_fixed_lambda(tmp_path, data_csv):
    out = tmp_path / "c.csv"
    assert main(["estimate", "--input", data_csv, "--lambda", "1e-4", "--center-y", "--output", str(out), "--grid-size", "50"]) == 0
    meta = json.loads((tmp_path / "c.csv.json").read_text())
    assert meta["center_y"] and meta["lambda"] == 1e-4 and meta["quantizer"] is None
    assert len(out.read_text().strip().split("\n")) == 51


def test_test_linear_null(tmp_path, data_csv, capsys):
    assert main(["test", "--input", data_csv, "--b", "3", "--null", "linear", "--alpha", "0.1"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["null"] == "linear" and isinstance(res["reject"], bool)
    assert res["quantizer"]["b"] == 3


def test_test_file_null(tmp_path, data_csv):
    n = 120
    grid = _write(tmp_path / "null.csv", [(v,) for v in np.zeros(n)], header=("f",))
    out = tmp_path / "r.json"
    assert main(["test", "--input", data_csv, "--null", f"file:{grid}", "--output", str(out)]) == 0
    with_file = json.loads(out.read_text())
    assert main(["test", "--input", data_csv, "--output", str(out)]) == 0
    assert json.loads(out.read_text())["n_T"] == pytest.approx(with_file["n_T"], rel=1e-12)
    bad = _write(tmp_path / "short.csv", [(0.0,)] * 5, header=("f",))
    assert main(["test", "--input", data_csv, "--null", f"file:{bad}"]) == 1


def test_simulate_reproducible(tmp_path):
    cfg = tmp_path / "size.json"
    cfg.write_text(json.dumps({"scenario": "size", "n_list": [64], "b_list": [3], "replications": 4}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", str(cfg), "--output", str(a), "--seed", "7"]) == 0
    assert main(["simulate", "--config", str(cfg), "--output", str(b), "--seed", "7"]) == 0
    assert a.read_text() == b.read_text()
    assert a.read_text().startswith("scenario,n,b,r,noise_sd,alpha_signal,metric,value,mc_stderr,replications,seed\n")
    assert json.loads((tmp_path / "a.csv.config.json").read_text())["seed"] == 7


def test_spectral_and_diagnose(capsys):
    assert main(["spectral", "--n", "10", "--m", "2", "--lambda", "1e-3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["lam_c"][0] == pytest.approx(1 / 7.2e6, rel=1e-13)
    assert len(out["xi"]) == 10
    assert main(["diagnose", "--n", "500", "--lambda", "1e-4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out["error_terms"]) == {"C_k_sq", "G1", "G2", "G_total"}
    assert out["conditions"]["condition_B"]
    assert main(["diagnose", "--n", "500", "--lambda", "1e-4", "--scheme", "uniform-symmetric", "--c", "0.5", "--l", "3"]) == 0


def test_usage_errors(tmp_path, data_csv, capsys):
    out = tmp_path / "never.csv"
    assert main(["estimate", "--input", data_csv, "--bogus", "--output", str(out)]) == 2
    assert "usage" in capsys.readouterr().err
    assert main(["estimate", "--input", data_csv, "--lambda", "soon", "--output", str(out)]) == 2
    assert main(["estimate", "--input", data_csv, "--grid-size", "1", "--output", str(out)]) == 2
    assert main(["diagnose", "--n", "100", "--lambda", "1e-3", "--scheme", "uniform"]) == 2
    assert main([]) == 2
    assert not out.exists()
    assert [p.name for p in tmp_path.iterdir() if p.name.startswith(".tmp")] == []


def test_runtime_errors(tmp_path):
    assert main(["test", "--input", str(tmp_path / "none.csv")]) == 1
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"scenario": "size", "n_list": [7]}))
    assert main(["simulate", "--config", str(cfg)]) == 1
