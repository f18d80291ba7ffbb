import csv
import json

import pytest

from nakaolab import __version__
from nakaolab.cli import main


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_region(capsys):
    code, out, _ = run_cli(["region", "--p", "2", "--q", "2", "--n", "1"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["blowup_condition_holds"] and rep["lifespan_exponent"] == 3
    assert rep["glassey"] == "Infinity"
    code, out, _ = run_cli(["region", "--p", "2", "--q", "2", "--n", "2"], capsys)
    assert code == 0 and json.loads(out)["blowup_condition_holds"] is False


def test_region_invalid(capsys):
    code, _, err = run_cli(["region", "--p", "0.5", "--q", "2", "--n", "2"], capsys)
    assert code == 2 and "p must exceed 1" in err


def test_full_precision_json(capsys):
    _, out, _ = run_cli(["region", "--p", "1.5", "--q", "1.7", "--n", "2"], capsys)
    rep = json.loads(out)
    assert rep["t1"] == ((3 - 1.5 * 1.7) / (2 * (1.5 * 1.7 - 1)))


def test_iterate(tmp_path, capsys):
    code, _, _ = run_cli(["iterate", "--p", "2", "--q", "2", "--n", "1", "--eps", "0.1",
                          "--j-max", "9", "--out", str(tmp_path)], capsys)
    assert code == 0
    lines = (tmp_path / "sequence.csv").read_text().splitlines()
    assert lines[0].startswith("# nakaolab " + __version__) and '"j_max": 9' in lines[0]
    rows = list(csv.DictReader(lines[1:]))
    assert [int(r["j"]) for r in rows] == list(range(1, 10))
    for r in rows:
        for k in ("alpha", "a", "beta", "b"):
            assert float(r[f"{k}_j"]) == pytest.approx(float(r[f"{k}_cf"]), rel=1e-10)
    led = json.loads((tmp_path / "constants.json").read_text())
    c = led["constants"]
    assert isinstance(c["j0"], int) and isinstance(c["j1"], int) and c["L"] > 1
    assert led["version"] == __version__ and "predicted_blowup_time" in led


def test_iterate_eps_too_large(tmp_path, capsys):
    code, _, _ = run_cli(["iterate", "--p", "2", "--q", "2", "--n", "1", "--eps", "1e6",
                          "--out", str(tmp_path)], capsys)
    led = json.loads((tmp_path / "constants.json").read_text())
    assert code == 0 and "predicted_blowup_time" not in led
    assert "eps0" in led["predicted_blowup_time_note"]


def test_iterate_out_of_region(tmp_path, capsys):
    code, _, _ = run_cli(["iterate", "--p", "2", "--q", "2", "--n", "2",
                          "--out", str(tmp_path)], capsys)
    assert code == 2


def test_phi_and_verify(capsys):
    code, out, _ = run_cli(["phi", "--n", "3", "--r", "0", "1", "1000"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["phi"][2] is None and rep["log_phi"][2] > 990
    code, out, _ = run_cli(["verify-testfn", "--n", "2", "--t-max", "30"], capsys)
    rep = json.loads(out)
    assert code == 0 and set(rep) >= {"c1", "max_eigen_residual", "asymptotic_flatness"}
    assert rep["max_eigen_residual"] < 1e-4


def test_simulate_full_and_linear(tmp_path, capsys):
    cfg = {"params": {"p": 2, "q": 2, "n": 1, "eps": 0.5},
           "sim": {"nx": 1024, "t_max": 10}, "output_dir": str(tmp_path / "full")}
    code, _, _ = run_cli(["simulate", "--config", write(tmp_path, "f.json", cfg)], capsys)
    v = json.loads((tmp_path / "full" / "verdict.json").read_text())
    assert code == 0 and v["blown_up"] and v["T_num"] > 0 and v["trigger"]
    assert v["threshold"] == 1e8 and v["threshold_robust"] is True
    assert v["config"]["sim"]["cfl"] == 0.4 and v["version"] == __version__
    head = (tmp_path / "full" / "trace.csv").read_text().splitlines()[:2]
    assert head[0].startswith("# nakaolab") and head[1] == "t,F1,F2,sup_ut,sup_vt,support_radius"

    cfg = {"params": {"p": 2, "q": 2, "n": 1, "eps": 0.5},
           "sim": {"nx": 1024, "t_max": 4, "mode": "linear_free"}}
    code, _, _ = run_cli(["simulate", "--config", write(tmp_path, "l.json", cfg),
                          "--out", str(tmp_path / "lin")], capsys)
    v = json.loads((tmp_path / "lin" / "verdict.json").read_text())
    assert code == 0 and not v["blown_up"] and v["energy_drift"] < 1e-6


@pytest.mark.parametrize("cfg,key", [
    ({"params": {"p": 2, "q": 2, "n": 1}, "sim": {"nxx": 5}}, "sim.nxx"),
    ({"params": {"p": 2, "q": 2, "n": 1, "r": 1}}, "params.r"),
    ({"params": {"p": 2, "q": 2, "n": 1}, "colour": 1}, "colour"),
])
def test_simulate_rejects_unknown_keys(tmp_path, capsys, cfg, key):
    code, _, err = run_cli(["simulate", "--config", write(tmp_path, "c.json", cfg)], capsys)
    assert code == 2 and key in err


def test_simulate_bad_json_and_cfl(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli(["simulate", "--config", str(bad)], capsys)[0] == 2
    cfg = {"params": {"p": 2, "q": 2, "n": 1}, "sim": {"cfl": 0.8}}
    assert run_cli(["simulate", "--config", write(tmp_path, "c.json", cfg)], capsys)[0] == 3


def test_sweep_all_censored_and_deterministic(tmp_path, capsys):
    cfg = {"params": {"p": 2, "q": 2, "n": 1}, "sim": {"nx": 256, "t_max": 1},
           "sweep": {"eps_count": 5}}
    path = write(tmp_path, "s.json", cfg)
    for d in ("a", "b"):
        code, _, _ = run_cli(["sweep", "--config", path, "--out", str(tmp_path / d)], capsys)
        assert code == 0
    fit = json.loads((tmp_path / "a" / "fit.json").read_text())
    assert fit["consistent"] is None and "insufficient blow-ups" in fit["reason"]
    assert fit["theoretical_exponent"] == 3.0 and fit["slack"] == 0.5
    assert (tmp_path / "a" / "sweep.csv").read_bytes() == (tmp_path / "b" / "sweep.csv").read_bytes()
    assert (tmp_path / "a" / "plot.dat").exists()


def test_sweep_fit(tmp_path, capsys):
    cfg = {"params": {"p": 2, "q": 2, "n": 1}, "sim": {"nx": 512, "t_max": 12},
           "sweep": {"eps_count": 5, "eps_min": 0.5}}
    code, _, _ = run_cli(["sweep", "--config", write(tmp_path, "s.json", cfg),
                          "--out", str(tmp_path)], capsys)
    fit = json.loads((tmp_path / "fit.json").read_text())
    assert code == 0 and fit["points_used"] == 5 and fit["consistent"] is True
    assert set(fit) >= {"slope", "intercept", "r_squared", "theoretical_exponent",
                        "consistent", "slack", "points_used"}
