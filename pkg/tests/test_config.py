import pytest

from oscilab.core.config import ENV_CONFIG, ENV_SEED, Config
from oscilab.core.errors import InvalidArgument
from oscilab.core.ode import IntegratorConfig


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv(ENV_CONFIG, raising=False)
    monkeypatch.delenv(ENV_SEED, raising=False)


def test_defaults(config):
    assert config.get("margin") == 0.01
    assert config.get("node_strategy") == "chebyshev"
    assert config.get("enclosure_tol") == 1e-6
    assert config.get("seed") == 42
    assert config.get("trials") == 1000
    assert config.get("n_max") == 4
    assert config.get("jobs") == 1
    assert set(config.keys()) == set(config.defaults)
    assert "margin" in config
    assert "colour" not in config


def test_keys_are_normalized(config):
    config.set("zero-tol", 1e-6)
    assert config.get("ZERO_TOL") == 1e-6
    assert config["zero_tol"] == 1e-6


def test_values_are_cast(config):
    config.set("seed", "7")
    assert config.get("seed") == 7
    config.set("margin", "0.05")
    assert config.get("margin") == 0.05
    config.set("trials", 10.0)
    assert config.get("trials") == 10
    with pytest.raises(InvalidArgument):
        config.set("trials", 10.5)
    with pytest.raises(InvalidArgument):
        config.set("margin", "small")


def test_unknown_key(config):
    with pytest.raises(KeyError):
        config.set("colour", "blue")
    with pytest.raises(KeyError):
        config.get("colour")
    with pytest.raises(KeyError):
        Config({"colour": "blue"})


def test_update_skips_none(config):
    config.update({"margin": 0.02, "seed": None, "d-max": 3})
    assert config.get("margin") == 0.02
    assert config.get("seed") == 42
    assert config.get("d_max") == 3


def test_remove_restores_default(config):
    config.set("margin", 0.3)
    config.remove("margin", restore_default=True)
    assert config.get("margin") == 0.01


def test_from_file(tmp_path):
    path = tmp_path / "oscilab.yaml"
    path.write_text("margin: 0.02\nseed: 9\nnode_strategy: uniform\n", encoding="utf-8")
    config = Config.from_file(path)
    assert config.get("margin") == 0.02
    assert config.get("seed") == 9
    assert config.get("node_strategy") == "uniform"
    assert config.get("rtol") == 1e-10


def test_from_file_empty(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("", encoding="utf-8")
    assert dict(Config.from_file(path).items()) == dict(Config().items())


@pytest.mark.parametrize("text", ["[1, 2]\n", "margin: [\n"])
def test_from_file_rejects_bad_content(tmp_path, text):
    path = tmp_path / "bad.yaml"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(InvalidArgument):
        Config.from_file(path)


def test_from_file_missing(tmp_path):
    with pytest.raises(InvalidArgument):
        Config.from_file(tmp_path / "missing.yaml")


def test_from_env(tmp_path, monkeypatch):
    path = tmp_path / "env.yaml"
    path.write_text("trials: 12\n", encoding="utf-8")
    monkeypatch.setenv(ENV_CONFIG, str(path))
    monkeypatch.setenv(ENV_SEED, "123")
    config = Config.from_env()
    assert config.get("trials") == 12
    assert config.get("seed") == 123


def test_from_env_explicit_path_wins(tmp_path, monkeypatch):
    env_path = tmp_path / "env.yaml"
    env_path.write_text("trials: 12\n", encoding="utf-8")
    cli_path = tmp_path / "cli.yaml"
    cli_path.write_text("trials: 34\n", encoding="utf-8")
    monkeypatch.setenv(ENV_CONFIG, str(env_path))
    assert Config.from_env(cli_path).get("trials") == 34
    assert Config.from_env().get("seed") == 42


def test_integrator_config(config):
    config.set("rtol", 1e-8)
    assert config.integrator_config() == IntegratorConfig(rtol=1e-8)
    config.set("initial_step", 1.0)
    with pytest.raises(InvalidArgument):
        config.integrator_config()
