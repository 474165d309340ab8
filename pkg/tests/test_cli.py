import json
import math

import pytest

from oscilab import __version__, main
from oscilab.core.bounds import theorem1_bound
from oscilab.core.config import ENV_CONFIG, ENV_SEED
from oscilab.core.counterexample import CounterexampleSpec, closed_form
from oscilab.core.utils import format_float


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv(ENV_CONFIG, raising=False)
    monkeypatch.delenv(ENV_SEED, raising=False)


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def _summary(out):
    return dict(line.split("=", 1) for line in out.splitlines())


def test_version(capsys):
    code, out = _run(capsys, "--version")
    assert code == 0
    assert __version__ in out


def test_help(capsys):
    code, out = _run(capsys, "--help")
    assert code == 0
    assert "construct" in out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["bound"],
        ["bound", "--n", "two"],
        ["stress", "--trials", "0"],
        ["count", "--x0", "1"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _ = _run(capsys, *argv)
    assert code == 2


def test_bound(capsys):
    code, out = _run(capsys, "bound", "--n", "1")
    assert code == 0
    assert out == format_float(theorem1_bound(1, 1, -1, 1)) + "\n"
    assert float(out) == pytest.approx(2 / math.log(2), rel=1e-15)

    code, out = _run(capsys, "bound", "--n", "2", "--C", "1", "--alpha", "-1", "--beta", "1")
    assert code == 0
    assert float(out) == pytest.approx(1 + 4 / math.log(2), rel=1e-15)


def test_bound_hypothesis_is_enforced(capsys):
    code, out = _run(capsys, "bound", "--n", "2", "--C", "0.5")
    assert code == 2
    assert out == ""


def test_construct(capsys, tmp_path):
    code, out = _run(capsys, "construct", "--nodes", "0", "--out", str(tmp_path))
    assert code == 0
    summary = _summary(out)
    assert summary["d"] == "1"
    assert float(summary["lambda"]) == pytest.approx(0.410679, abs=1e-5)
    assert float(summary["norm_upper"]) < 1
    assert summary["zeros_certified"] == "1"
    assert summary["phi1_zeros"] == "0"
    assert 0 < float(summary["phi1_lower"]) <= 1

    spec_payload = json.loads((tmp_path / "spec_d1.json").read_text(encoding="utf-8"))
    system_payload = json.loads((tmp_path / "system_d1.json").read_text(encoding="utf-8"))
    assert spec_payload["nodes"] == [0.0]
    assert system_payload["dim"] == 2
    assert CounterexampleSpec.from_json(spec_payload).lam == float(summary["lambda"])


def test_construct_chebyshev(capsys, tmp_path):
    code, out = _run(capsys, "construct", "--d", "5", "--margin", "0.02", "--out", str(tmp_path))
    assert code == 0
    assert _summary(out)["zeros_certified"] == "5"
    spec = CounterexampleSpec.from_json(json.loads((tmp_path / "spec_d5.json").read_text(encoding="utf-8")))
    assert spec.margin == 0.02


@pytest.mark.parametrize(
    "argv",
    [
        ["--d", "0"],
        ["--nodes", "0,0"],
        ["--nodes", "0,2"],
        ["--d", "3", "--nodes", "0,0.5"],
        ["--d", "2", "--margin", "1.5"],
        ["--d", "2", "--strategy", "random"],
    ],
)
def test_construct_rejects(capsys, tmp_path, argv):
    code, _ = _run(capsys, "construct", *argv, "--out", str(tmp_path))
    assert code == 2


def test_demo_is_deterministic(capsys):
    code, first = _run(capsys, "demo", "--d-max", "3")
    assert code == 0
    lines = first.splitlines()
    assert lines[0] == "d,lambda,norm_upper,zeros_certified,zeros_numeric,theorem1_reference"
    assert [line.split(",")[0] for line in lines[1:]] == ["1", "2", "3"]
    assert [line.split(",")[3] for line in lines[1:]] == ["1", "2", "3"]
    assert [line.split(",")[4] for line in lines[1:]] == ["1", "2", "3"]

    code, second = _run(capsys, "demo", "--d-max", "3")
    assert code == 0
    assert second == first


def test_demo_to_file(capsys, tmp_path):
    target = tmp_path / "out" / "demo.csv"
    code, out = _run(capsys, "demo", "--d-max", "2", "--strategy", "uniform", "--out", str(target))
    assert code == 0
    assert out == ""
    assert len(target.read_text(encoding="utf-8").splitlines()) == 3


def test_stress_is_deterministic(capsys, tmp_path):
    argv = ["stress", "--trials", "6", "--n-max", "3", "--seed", "42"]
    code, first = _run(capsys, *argv)
    assert code == 0
    report = json.loads(first)
    assert report["trials"] == 6
    assert report["seed"] == 42
    assert report["violations"] == 0

    code, second = _run(capsys, *argv)
    assert second == first

    target = tmp_path / "trials.csv"
    code, _ = _run(capsys, *argv, "--out", str(target))
    assert code == 0
    lines = target.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "index,n,count,bound,flagged,ratio"
    assert len(lines) == 7


def test_stress_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv(ENV_SEED, "7")
    code, out = _run(capsys, "stress", "--trials", "2", "--n-max", "1")
    assert code == 0
    assert json.loads(out)["seed"] == 7


def test_stress_config_file(capsys, tmp_path):
    path = tmp_path / "oscilab.yaml"
    path.write_text("trials: 3\nn_max: 2\nseed: 5\n", encoding="utf-8")
    code, out = _run(capsys, "stress", "--config", str(path))
    assert code == 0
    assert json.loads(out)["trials"] == 3
    assert json.loads(out)["seed"] == 5


def test_stress_rejects_order(capsys):
    code, _ = _run(capsys, "stress", "--trials", "2", "--n-max", "9")
    assert code == 2


def test_complex(capsys):
    code, out = _run(capsys, "complex", "--nodes", "0", "--epsilon", "0.1", "--delta", "0.01")
    assert code == 0
    payload = json.loads(out)
    assert 0 < payload["lambda"] < 0.005
    assert payload["complex"]["bound"] <= 0.01
    assert payload["complex"]["epsilon"] == 0.1


def test_complex_rejects_delta(capsys):
    code, _ = _run(capsys, "complex", "--d", "2", "--delta", "1.5")
    assert code == 2


def test_count(capsys, tmp_path):
    code, _ = _run(capsys, "construct", "--nodes=-0.5,0.5", "--out", str(tmp_path))
    assert code == 0
    spec_path = tmp_path / "spec_d2.json"
    spec = CounterexampleSpec.from_json(json.loads(spec_path.read_text(encoding="utf-8")))
    phi1, phi2 = closed_form(spec, -1.0).gamma
    x0 = f"--x0={phi1!r},{phi2!r}"

    for source in (spec_path, tmp_path / "system_d2.json"):
        code, out = _run(capsys, "count", "--system", str(source), x0, "--component", "1")
        assert code == 0
        report = json.loads(out)
        assert report["count"] == 2
        assert report["locations"] == pytest.approx([-0.5, 0.5], abs=1e-8)

    code, out = _run(capsys, "count", "--system", str(spec_path), x0, "--normal", "0,1")
    assert code == 0
    assert json.loads(out)["count"] == 2

    trajectory = tmp_path / "trajectory.csv"
    argv = ["count", "--system", str(spec_path), x0, "--alpha", "0", "--samples", "11"]
    code, out = _run(capsys, *argv, "--out", str(trajectory))
    assert code == 0
    assert json.loads(out)["count"] == 0
    lines = trajectory.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "t,x1,x2"
    assert len(lines) == 12

    code, out = _run(capsys, "count", "--system", str(spec_path), "--x0=0,0", "--component", "1")
    assert code == 0
    assert json.loads(out)["count"] == 0
    assert json.loads(out)["vanishes"] is True


def test_count_rejects(capsys, tmp_path):
    missing = tmp_path / "missing.json"
    code, _ = _run(capsys, "count", "--system", str(missing), "--x0=1,0")
    assert code == 2

    garbage = tmp_path / "garbage.json"
    garbage.write_text("{not json", encoding="utf-8")
    code, _ = _run(capsys, "count", "--system", str(garbage), "--x0=1,0")
    assert code == 2

    code, _ = _run(capsys, "construct", "--nodes", "0", "--out", str(tmp_path))
    system = str(tmp_path / "system_d1.json")
    code, _ = _run(capsys, "count", "--system", system, "--x0=1,0", "--component", "5")
    assert code == 2
    code, _ = _run(capsys, "count", "--system", system, "--x0=1,0,0")
    assert code == 2
