import csv
import io
import json

import numpy as np
import pytest

from strongstab import cli
from strongstab.worked_example import config_path

EXAMPLE = config_path()


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_factorize_example(capsys):
    code, out, _ = run(["factorize", EXAMPLE], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["format"] == 1 and doc["case"] == "ii.a" and doc["n_o"] == 0
    pair = np.array([complex(*z) for z in doc["interpolation_zeros"]])
    for z in (0.3125 + 0.8548j, 0.3125 - 0.8548j):
        assert np.min(np.abs(pair - z)) < 1e-3
    assert doc["checks"]["reconstruction_residual"] < 1e-8


def test_factorize_stable_minimum_phase(tmp_path, capsys):
    cfg = {
        "format": 1,
        "numerator_terms": [{"num": [1, 2], "den": [1, 3, 2], "delay": "0"}],
        "denominator_terms": [{"num": [1], "den": [1], "delay": "0"}],
        "weight": {"num": [1], "den": [1, 1]},
    }
    p = tmp_path / "plant.json"
    p.write_text(json.dumps(cfg))
    code, out, _ = run(["factorize", str(p)], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["Mn_zeros"] == [] and doc["inner_T_zeros"] == [] and doc["case"] == "ii.b"


def test_env_var_default(monkeypatch, capsys):
    monkeypatch.setenv(cli.CONFIG_ENV, EXAMPLE)
    code, out, _ = run(["gamma"], capsys)
    assert code == 0
    assert json.loads(out)["gamma"] == pytest.approx(1.0704, abs=5e-3)


def test_gamma_strip(capsys):
    code, out, _ = run(["gamma", EXAMPLE, "--mode", "strip", "--rho", str(np.exp(3))], capsys)
    assert code == 0
    assert json.loads(out)["gamma"] == pytest.approx(1.08, abs=0.01)


def test_gamma_curve_monotone(capsys):
    code, out, _ = run(["gamma", EXAMPLE, "--mode", "curve", "--rho-grid", "2.0,2.6,4,10,100,3000"], capsys)
    assert code == 0
    r = rows(out)
    assert r[0] == ["rho", "gamma"] and r[1][1] == ""
    vals = [float(g) for _, g in r[1:] if g]
    assert all(b <= a + 1e-6 for a, b in zip(vals, vals[1:]))


@pytest.fixture(scope="module")
def bundles(tmp_path_factory):
    d = tmp_path_factory.mktemp("designs")
    out = {}
    for name, extra in (
        ("unit", ["--method", "unit-search"]),
        ("strip", ["--method", "strip", "--rho", str(np.exp(3))]),
    ):
        path = d / f"{name}.json"
        assert cli.main(["-o", str(path), "design", EXAMPLE, "--gamma", "1.08", *extra]) == 0
        out[name] = path
    return out


def test_design_unit_search(bundles):
    doc = json.loads(bundles["unit"].read_text())
    assert doc["format"] == 1 and doc["F"]["type"] == "rational"
    assert doc["order"] >= 1
    assert doc["unit"]["is_unit"]
    assert doc["report"]["achieved_norm"] == pytest.approx(1.08, abs=0.01)
    assert doc["report"]["identity_residual"] < 1e-6


def test_design_gamma_12(capsys):
    code, out, _ = run(["design", EXAMPLE, "--gamma", "1.2"], capsys)
    assert code == 0
    assert json.loads(out)["unit"]["is_unit"]


def test_design_below_optimum(capsys):
    code, _, err = run(["design", EXAMPLE, "--gamma", "0.5"], capsys)
    assert code == 2 and "below γ_ss" in err


def test_design_is_deterministic(bundles, tmp_path):
    again = tmp_path / "again.json"
    assert cli.main(["-o", str(again), "design", EXAMPLE, "--gamma", "1.08"]) == 0
    assert json.loads(again.read_text()) == json.loads(bundles["unit"].read_text())


@pytest.mark.parametrize("name", ["unit", "strip"])
def test_freqresp_identity(bundles, name, capsys):
    code, out, _ = run(["freqresp", str(bundles[name]), "--grid", "0.01:100:200"], capsys)
    assert code == 0
    r = rows(out)
    assert r[0] == ["omega", "abs_F", "phase_F_deg", "abs_WS", "abs_C"]
    a = np.array(r[1:], dtype=float)
    assert a.shape == (200, 5)
    assert np.max(np.abs(a[:, 3] - 1.08 * a[:, 1]) / a[:, 3]) < 1e-6


def test_freqresp_default_grid(bundles, capsys):
    code, out, _ = run(["freqresp", str(bundles["strip"])], capsys)
    assert code == 0 and len(rows(out)) == 401


def test_regions_c30(capsys):
    code, out, _ = run(["regions", EXAMPLE, "--gamma", "1.2", "--c", "30"], capsys)
    assert code == 0
    reg = [x for x in rows(out)[1:] if x[0] == "region"]
    assert any(x[4] == "0" and x[5] == "1" for x in reg)
    assert any(x[0] == "curve" for x in rows(out)[1:])


def test_regions_c1(capsys):
    code, out, _ = run(["regions", EXAMPLE, "--gamma", "1.2", "--c", "1"], capsys)
    assert code == 0
    assert any(x[0] == "line_plus" for x in rows(out)[1:])


def test_malformed_json(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"format": 1,\n  "numerator_terms": [\n}')
    code, _, err = run(["factorize", str(p)], capsys)
    assert code == 3 and "bad.json:3" in err


def test_wrong_format_version(tmp_path, capsys):
    p = tmp_path / "v2.json"
    p.write_text('{"format": 2}')
    code, _, err = run(["factorize", str(p)], capsys)
    assert code == 3 and "format" in err


def test_irrational_delay_rejected(tmp_path, capsys):
    cfg = json.loads(open(EXAMPLE).read())
    cfg["numerator_terms"][1]["delay"] = "pi"
    p = tmp_path / "p.json"
    p.write_text(json.dumps(cfg))
    code, _, err = run(["factorize", str(p)], capsys)
    assert code == 3 and "not rational" in err


def test_missing_plant(monkeypatch, capsys):
    monkeypatch.delenv(cli.CONFIG_ENV, raising=False)
    code, _, err = run(["factorize"], capsys)
    assert code == 3


def test_bad_arguments_exit_3(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["gamma", EXAMPLE, "--mode", "nope"])
    assert exc.value.code == 3
