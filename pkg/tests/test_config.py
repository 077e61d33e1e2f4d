"""Configuration schema: validation, defaulting, and content hashing."""

import pytest

from samplewise.config import (
    ConfigError,
    config_hash,
    load_config,
    validate_config,
)

MINIMAL = {"experiment": {"name": "t"}, "truth": {"kind": "unimodal"}}


def minimal(**overrides):
    data = {"experiment": {"name": "t"}, "truth": {"kind": "unimodal"}}
    for section, table in overrides.items():
        data.setdefault(section, {}).update(table)
    return data


def test_minimal_config_fills_defaults():
    cfg = validate_config(MINIMAL)
    assert cfg["experiment"]["model"] == "spring"
    assert cfg["experiment"]["seed"] == 0
    assert cfg["experiment"]["threads"] == 1
    assert cfg["dataset"]["n_train"] == 200
    assert cfg["dataset"]["n_test"] == 1000
    assert cfg["dataset"]["delta_x"] == 0.005
    assert cfg["inversion"]["beta"] == 0.1
    assert cfg["prior"]["n_augment_per"] == 5
    assert cfg["nnk"]["trainer"] == "newton_raphson"
    assert cfg["baselines"]["map"]["enabled"] is False
    assert cfg["baselines"]["mh"]["n_steps"] == 2000
    assert cfg["baselines"]["hmc"]["starts"] == [[3.0, 3.0], [-3.0, -3.0]]
    assert cfg["sigma"]["enabled"] is False
    assert cfg["report"]["eval_input"] == [0.9, 0.8]


def test_defaults_are_fresh_copies():
    a = validate_config(MINIMAL)
    b = validate_config(MINIMAL)
    a["dataset"]["center"].append(9.9)
    assert b["dataset"]["center"] == [0.5, 0.5]


def test_missing_required_keys():
    with pytest.raises(ConfigError, match="experiment.name"):
        validate_config({"experiment": {}, "truth": {"kind": "unimodal"}})
    with pytest.raises(ConfigError, match="truth.kind"):
        validate_config({"experiment": {"name": "t"}})


def test_unknown_section_and_key_name_their_path():
    with pytest.raises(ConfigError, match="'nope'"):
        validate_config(minimal(nope={"a": 1}))
    with pytest.raises(ConfigError, match="'dataset.n_points'"):
        validate_config(minimal(dataset={"n_points": 50}))
    with pytest.raises(ConfigError, match="'baselines.mh.step'"):
        data = minimal()
        data["baselines"] = {"mh": {"step": 0.1}}
        validate_config(data)


def test_type_errors():
    with pytest.raises(ConfigError, match="'dataset.n_train'"):
        validate_config(minimal(dataset={"n_train": "many"}))
    # booleans are not acceptable integers
    with pytest.raises(ConfigError, match="'experiment.seed'"):
        validate_config(minimal(experiment={"seed": True}))
    with pytest.raises(ConfigError, match="'inversion.beta'"):
        validate_config(minimal(inversion={"beta": True}))


def test_integer_values_coerce_to_float_keys():
    cfg = validate_config(minimal(inversion={"beta": 1}))
    assert cfg["inversion"]["beta"] == 1.0
    assert isinstance(cfg["inversion"]["beta"], float)


def test_enum_validation():
    with pytest.raises(ConfigError, match="experiment.model"):
        validate_config(minimal(experiment={"model": "pendulum"}))
    with pytest.raises(ConfigError, match="truth.kind"):
        validate_config(minimal(truth={"kind": "quadmodal"}))
    with pytest.raises(ConfigError, match="nnk.trainer"):
        validate_config(minimal(nnk={"trainer": "adam"}))
    data = minimal()
    data["baselines"] = {"mh": {"likelihood": "exact"}}
    with pytest.raises(ConfigError, match="baselines.mh.likelihood"):
        validate_config(data)
    data = minimal()
    data["baselines"] = {"hmc": {"target": "prior"}}
    with pytest.raises(ConfigError, match="baselines.hmc.target"):
        validate_config(data)


def test_section_must_be_table():
    with pytest.raises(ConfigError, match="'dataset'"):
        validate_config(minimal() | {"dataset": 3})
    data = minimal()
    data["baselines"] = {"map": 1}
    with pytest.raises(ConfigError, match="'baselines.map'"):
        validate_config(data)


def test_non_table_root_rejected():
    with pytest.raises(ConfigError, match="table of sections"):
        validate_config([1, 2])


def test_load_config_roundtrip(tmp_path):
    p = tmp_path / "ok.toml"
    p.write_text(
        '[experiment]\nname = "demo"\nmodel = "spring_square"\nseed = 3\n'
        '[truth]\nkind = "bimodal"\n[dataset]\nn_train = 40\n'
    )
    cfg = load_config(p)
    assert cfg["experiment"]["model"] == "spring_square"
    assert cfg["experiment"]["seed"] == 3
    assert cfg["dataset"]["n_train"] == 40
    assert cfg["dataset"]["n_test"] == 1000


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "absent.toml")


def test_load_config_bad_toml(tmp_path):
    p = tmp_path / "broken.toml"
    p.write_text("[experiment\nname=")
    with pytest.raises(ConfigError, match="TOML"):
        load_config(p)


def test_config_hash_stable_and_sensitive():
    a = validate_config(MINIMAL)
    b = validate_config(minimal())
    assert config_hash(a) == config_hash(b)
    c = validate_config(minimal(dataset={"n_train": 201}))
    assert config_hash(c) != config_hash(a)
    assert len(config_hash(a)) == 64


def test_bundled_configs_all_validate():
    import samplewise

    cfg_dir = (
        __import__("pathlib").Path(samplewise.__file__).parent / "configs"
    )
    paths = sorted(cfg_dir.glob("*.toml"))
    assert len(paths) >= 7
    for p in paths:
        cfg = load_config(p)
        assert cfg["experiment"]["name"]
