import pytest
import yaml

from loewner_lab import InvalidArgument, NumericConfig
from loewner_lab.config import get_max_workers, load_config, parallel_map


def test_defaults_are_valid():
    cfg = NumericConfig()
    assert cfg.ode_method == "DOP853"
    assert cfg.eps_list == (1e-4, 1e-5, 1e-6, 1e-7)


@pytest.mark.parametrize(
    "overrides",
    [
        dict(ode_rel_tol=0.0),
        dict(ode_method="Radau"),
        dict(eps_list=(1e-4, 1e-5)),
        dict(eps_list=(1e-4, 0.9e-4, 1e-6)),
        dict(max_newton_iters=0),
        dict(weld_steps=1),
    ],
)
def test_invalid_values_are_rejected(overrides):
    with pytest.raises(InvalidArgument):
        NumericConfig(**overrides)


def test_updated_skips_none():
    cfg = NumericConfig().updated(ode_rel_tol=1e-9, weld_steps=None)
    assert cfg.ode_rel_tol == 1e-9
    assert cfg.weld_steps == NumericConfig().weld_steps


def test_load_config_nested_and_flat(tmp_path):
    nested = tmp_path / "nested.yaml"
    nested.write_text(yaml.safe_dump({"numeric": {"ode_rel_tol": 1e-9, "eps_list": [1e-3, 1e-4, 1e-5]}}))
    flat = tmp_path / "flat.yaml"
    flat.write_text(yaml.safe_dump({"weld_steps": 512}))

    cfg = load_config(nested)
    assert cfg.ode_rel_tol == 1e-9
    assert cfg.eps_list == (1e-3, 1e-4, 1e-5)
    assert load_config(flat).weld_steps == 512


def test_load_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text("numeric:\n  ode_tolerance: 1.0e-9\n")
    with pytest.raises(InvalidArgument):
        load_config(path)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(InvalidArgument):
        load_config(tmp_path / "missing.yaml")


def test_thread_count_from_environment(monkeypatch):
    monkeypatch.setenv("LOEWNER_LAB_THREADS", "3")
    assert get_max_workers() == 3
    monkeypatch.setenv("LOEWNER_LAB_THREADS", "many")
    with pytest.raises(InvalidArgument):
        get_max_workers()


def test_parallel_map_keeps_order(monkeypatch):
    monkeypatch.setenv("LOEWNER_LAB_THREADS", "4")
    assert parallel_map(lambda x: x * x, range(10)) == [x * x for x in range(10)]
