import json

try:
    import tomllib
except ImportError:
    import tomli as tomllib

import numpy as np
import pytest

from trigapprox.harness.cli import main
from trigapprox.harness.config import load_config, scenarios_from_dict
from trigapprox.harness.oracle import OracleError, oracle_distance
from trigapprox.harness.runner import SCHEMA_VERSION, run_all
from trigapprox.primal import UnsupportedScenario

SINGLETON = """
[scenario]
name = "unit"
group = "integer"
grid = 256
S = "explicit(0)"
s = 0
windows = [0, 4]
[scenario.weight]
family = "constant"
value = 1.0
"""

SZEGO = """
[scenario]
name = "szego"
grid = 4096
S = "halfline(le,0)"
s = 0
windows = [128]
[scenario.weight]
family = "polynomial-modulus"
coeffs = [1.0, -0.5]
"""

UNSUPPORTED = """
[scenario]
name = "bad"
S = "explicit(0)"
s = 0
alpha = 3.0
[scenario.weight]
family = "constant"
value = [[1.0, 0.0], [0.0, 1.0]]
"""


def _write(tmp_path, text, name="c.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_oracle_examples():
    assert oracle_distance(8, np.ones(8), [x == 0 for x in range(8)], 0) == pytest.approx(1.0)
    w = np.array([1, 2, 3, 4, 4, 3, 2, 1], float)
    w = w / w.mean()
    want = np.mean(1 / w) ** -0.5
    assert oracle_distance(8, w, lambda x: x == 0, 0) == pytest.approx(want, abs=1e-13)
    rng = np.random.default_rng(3)
    B = rng.normal(size=(6, 2, 2)) + 1j * rng.normal(size=(6, 2, 2))
    W = B @ np.conj(np.swapaxes(B, 1, 2))
    A = np.mean(np.linalg.inv(W), axis=0)
    want = np.sqrt(np.linalg.inv(A)[1, 1].real)
    assert oracle_distance(6, W, [x == 0 for x in range(6)], 0, k=2) == pytest.approx(want, abs=1e-12)
    with pytest.raises(OracleError):
        oracle_distance(65, np.ones(65), [True] * 65, 0)


def test_run_singleton(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", str(_write(tmp_path, SINGLETON)), "--report", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == SCHEMA_VERSION
    sw = doc["scenarios"][0]["sandwich"]
    assert sw["lower"] == pytest.approx(1.0, abs=1e-12) and sw["upper"] == pytest.approx(1.0, abs=1e-12)
    assert "singleton" in capsys.readouterr().out


def test_run_szego():
    doc = run_all(scenarios_from_dict(tomllib.loads(SZEGO)))
    sw = doc["scenarios"][0]["sandwich"]
    assert sw["lower"] - 1e-12 <= 1.0 <= sw["upper"] + 1e-12
    assert sw["relative_gap"] <= 1e-3
    assert doc["scenarios"][0]["references"]["szego"]["inside_sandwich"]


def test_unsupported_exit(tmp_path, capsys):
    assert main(["run", str(_write(tmp_path, UNSUPPORTED))]) == 1
    assert "only supported for alpha = 2" in capsys.readouterr().err
    with pytest.raises(UnsupportedScenario):
        load_config(_write(tmp_path, UNSUPPORTED))


@pytest.mark.parametrize("text, msg", [
    ("[scenario]\nS='explicit(0)'\ns=1\n", "not in S"),
    ("[scenario]\nS='explicit(0)'\ns=0\n[scenario.weight]\nfamily='spline'\n", "unknown weight family"),
    ("[scenario]\nS='explicit(0)'\ns=0\nwindows=[4,2]\n", "ascending"),
    ("[scenario]\nS='explicit(0)'\ns=0\nreduction='maybe'\n", "reduction"),
    ("[scenario]\nS='explicit(0)'\ns=0\ngrid=64\n[[scenario.atoms]]\nindex=64\nmass=1.0\n", "grid"),
    ("[scenario\n", ""),
])
def test_config_errors(tmp_path, text, msg, capsys):
    assert main(["run", str(_write(tmp_path, text))]) == 1
    assert msg in capsys.readouterr().err


def test_missing_file(capsys):
    assert main(["run", "/nonexistent/x.toml"]) == 1
    assert "cannot read config" in capsys.readouterr().err


def test_sandwich_violation_exit(tmp_path, monkeypatch):
    import trigapprox.harness.runner as runner
    real = runner.dual_bound

    def inflated(*a, **k):
        c = real(*a, **k)
        c.lower_bound += 1.0
        return c

    monkeypatch.setattr(runner, "dual_bound", inflated)
    assert main(["run", str(_write(tmp_path, SINGLETON))]) == 2


def test_reports_byte_identical(tmp_path):
    cfg = _write(tmp_path, SINGLETON.replace("[scenario]", "[[scenario]]") + SZEGO.replace("[scenario]", "[[scenario]]").replace("windows = [128]", "windows = [16]"))
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["run", str(cfg), "--report", str(a)]) == 0
    assert main(["run", str(cfg), "--report", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_and_oracle(tmp_path, capsys):
    cyc = """
[scenario]
name = "z8"
group = "cyclic"
order = 8
S = "explicit(0, 3)"
s = 3
[scenario.weight]
family = "table"
rows = "0 1\\n1 2\\n2 3\\n3 4\\n4 4\\n5 3\\n6 2\\n7 1\\n"
"""
    cfg = _write(tmp_path, cyc)
    out = tmp_path / "o.json"
    assert main(["oracle", str(cfg), "--report", str(out)]) == 0
    rep = json.loads(out.read_text())["scenarios"][0]
    assert rep["oracle"]["max_deviation"] <= 1e-8
    assert main(["sweep", str(cfg), "--windows", "1", "4", "--report", str(out)]) == 0
    rep = json.loads(out.read_text())["scenarios"][0]
    assert [p["window"] for p in rep["primal"]] == [1, 4]


def test_atoms_reported(tmp_path):
    text = SZEGO.replace("windows = [128]", "windows = [16, 32]") + "[[scenario.atoms]]\nindex = 1024\nmass = 0.7\n"
    out = tmp_path / "r.json"
    assert main(["run", str(_write(tmp_path, text)), "--report", str(out)]) == 0
    red = json.loads(out.read_text())["scenarios"][0]["reduction"]
    assert red["reduced"] and red["dropped_atoms"] == 1
    assert red["rho_full"] >= red["rho_reduced"] - 1e-12


def test_verify_command(capsys):
    assert main(["verify"]) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith("[")]
    assert len(lines) == 9 and all(l.startswith("[PASS]") for l in lines)
