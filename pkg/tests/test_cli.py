"""Command-line interface: subcommands, overrides, exit codes."""

import json
import subprocess
import sys

import pytest

from samplewise.cli import main

CONFIG = """
[experiment]
name = "cli-spring"
model = "spring"

[truth]
kind = "unimodal"

[dataset]
n_train = 16
n_test = 24

[nnk]
max_iter = 200

[baselines.mh]
n_steps = 200
n_lkl = 8

[report]
n_reference = 5000
n_mc_truth = 100
"""


@pytest.fixture()
def config_path(tmp_path):
    p = tmp_path / "exp.toml"
    p.write_text(CONFIG)
    return p


def test_stage_subcommands_compose(config_path, tmp_path, capsys):
    out = tmp_path / "run"
    common = ["--config", str(config_path), "--out-dir", str(out)]
    for command in ("generate", "invert", "permute", "train", "predict",
                    "report"):
        assert main([command] + common) == 0
        assert f"{command} complete" in capsys.readouterr().out
    metrics = json.loads((out / "report" / "metrics.json").read_text())
    assert "inversion" in metrics


def test_run_subcommand(config_path, tmp_path):
    out = tmp_path / "full"
    code = main(["run", "--config", str(config_path),
                 "--out-dir", str(out), "--seed", "9"])
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["master_seed"] == 9
    assert (out / "report" / "metrics.json").exists()


def test_baseline_subcommand_force_enables(config_path, tmp_path):
    out = tmp_path / "mh"
    common = ["--config", str(config_path), "--out-dir", str(out)]
    assert main(["generate"] + common) == 0
    assert main(["invert"] + common) == 0
    # config leaves mh disabled; explicit invocation runs it anyway
    assert main(["baseline", "mh"] + common) == 0
    assert (out / "baselines" / "mh_chain_0.csv").exists()


def test_sigma_subcommand_force_enables(config_path, tmp_path):
    out = tmp_path / "sig"
    common = ["--config", str(config_path), "--out-dir", str(out)]
    assert main(["generate"] + common) == 0
    assert main(["invert"] + common) == 0
    assert main(["sigma"] + common) == 0
    assert json.loads((out / "sigma" / "sigma.json").read_text())["sigma_opt"]


def test_missing_config_file_exits_1(tmp_path, capsys):
    code = main(["run", "--config", str(tmp_path / "nope.toml")])
    assert code == 1
    assert "configuration error" in capsys.readouterr().err


def test_invalid_config_value_exits_1(tmp_path, capsys):
    p = tmp_path / "bad.toml"
    p.write_text('[experiment]\nname = "x"\nmodel = "bogus"\n'
                 '[truth]\nkind = "unimodal"\n')
    assert main(["run", "--config", str(p)]) == 1
    assert "experiment.model" in capsys.readouterr().err


def test_stage_failure_exits_2(config_path, tmp_path, capsys):
    # inversion without a generated dataset is a runtime failure
    code = main(["invert", "--config", str(config_path),
                 "--out-dir", str(tmp_path / "empty")])
    assert code == 2
    assert "stage 'invert' failed" in capsys.readouterr().err


def test_usage_errors_exit_1(config_path):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["run"])  # --config is required
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["baseline", "bootstrap", "--config", str(config_path)])
    assert exc.value.code == 1


def test_console_script_installed(config_path, tmp_path):
    out = tmp_path / "console"
    proc = subprocess.run(
        [sys.executable, "-m", "samplewise.cli", "generate",
         "--config", str(config_path), "--out-dir", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (out / "dataset" / "train_X.csv").exists()
