"""Experiment configuration: TOML parsing, schema validation, defaulting."""

import copy
import hashlib
import json

import tomli

from .experiments import TRUTH_KINDS

__all__ = ["ConfigError", "load_config", "validate_config", "config_hash"]


class ConfigError(ValueError):
    """Raised when a configuration file fails schema validation."""


_REQUIRED = object()

# schema entries: key -> (allowed types, default); nested dicts are subsections
_SCHEMA = {
    "experiment": {
        "name": (str, _REQUIRED),
        "model": (str, "spring"),
        "out_dir": (str, "results"),
        "seed": (int, 0),
        "threads": (int, 1),
    },
    "truth": {
        "kind": (str, _REQUIRED),
        "d": (int, None),
        "weights": (list, None),
        "means": (list, None),
        "covs": (list, None),
    },
    "dataset": {
        "n_train": (int, 200),
        "n_test": (int, 1000),
        "delta_x": (float, 0.005),
        "center": (list, [0.5, 0.5]),
    },
    "inversion": {
        "beta": (float, 0.1),
        "residual_tol": (float, 0.01),
        "max_iter": (int, 500),
        "loose": (float, 1e-5),
        "tight": (float, 1e-6),
        "threshold": (float, 0.01),
    },
    "noise": {
        "enabled": (bool, False),
        "delta": (float, 0.01),
        "n_per_sample": (int, 5),
    },
    "prior": {
        "n_augment_per": (int, 5),
        "augment_sigma": (float, 0.002),
    },
    "nnk": {
        "layer_sizes": (list, None),
        "n_anchor": (int, None),
        "trainer": (str, "newton_raphson"),
        "beta": (float, None),
        "max_iter": (int, None),
        "tol_factor": (float, 0.01),
    },
    "baselines": {
        "map": {
            "enabled": (bool, False),
            "n_quadrature": (int, 17),
            "coverage_scale": (float, 1.0),
            "gamma_scale": (float, 1.0),
            "sigma0_scale": (float, 1.0),
            "n_samples": (int, 1000),
            "max_iter": (int, 200),
        },
        "mh": {
            "enabled": (bool, False),
            "n_steps": (int, 2000),
            "proposal_scale": (float, 0.25),
            "likelihood": (str, "distance"),
            "n_lkl": (int, 20),
            "gamma_scale": (float, None),
            "starts": (list, [[0.0, 0.0]]),
        },
        "hmc": {
            "enabled": (bool, False),
            "n_steps": (int, 500),
            "epsilon": (float, 0.05),
            "n_leapfrog": (int, 20),
            "target": (str, "truth_mixture"),
            "gamma_scale": (float, 0.01),
            "starts": (list, [[3.0, 3.0], [-3.0, -3.0]]),
        },
    },
    "sigma": {
        "enabled": (bool, False),
        "n_mc": (int, 5000),
        "grid": (list, None),
    },
    "fem": {
        "nx": (int, 16),
        "ny": (int, 16),
        "d": (int, 6),
        "ell": (float, 1.0),
        "transformed": (bool, True),
        "simp_exponent": (float, 1.0),
        "n_keep": (int, 20),
        "n_noise_per": (int, 10),
        "n_bumps": (int, 6),
        "jitter": (float, 0.01),
    },
    "report": {
        "n_reference": (int, 100000),
        "mode_radius": (float, 1.0),
        "eval_input": (list, [0.9, 0.8]),
        "n_mc_truth": (int, 1000),
    },
}

_MODELS = ("spring", "spring_square", "fem", "analytic")


def _is_subsection(entry):
    return isinstance(entry, dict)


def _check_type(path, value, types):
    # bool is an int subclass; keep the two apart
    if types is int and isinstance(value, bool):
        raise ConfigError(f"key '{path}' expects an integer")
    if types is float and isinstance(value, bool):
        raise ConfigError(f"key '{path}' expects a number")
    if types is float and isinstance(value, int):
        return float(value)
    if not isinstance(value, types):
        raise ConfigError(f"key '{path}' expects {getattr(types, '__name__', types)}")
    return value


def _validate_section(data, schema, prefix):
    out = {}
    for key, entry in schema.items():
        path = f"{prefix}.{key}" if prefix else key
        if _is_subsection(entry):
            sub = data.get(key, {})
            if not isinstance(sub, dict):
                raise ConfigError(f"section '{path}' must be a table")
            out[key] = _validate_section(sub, entry, path)
            continue
        types, default = entry
        if key in data:
            out[key] = _check_type(path, data[key], types)
        elif default is _REQUIRED:
            raise ConfigError(f"missing required key '{path}'")
        else:
            out[key] = copy.deepcopy(default)
    for key in data:
        if key not in schema:
            path = f"{prefix}.{key}" if prefix else key
            raise ConfigError(f"unknown key '{path}'")
    return out


def validate_config(data):
    """Validate a parsed configuration mapping against the schema and fill
    in defaults; returns a new nested dict."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a table of sections")
    for section in data:
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section '{section}'")
        if not isinstance(data[section], dict):
            raise ConfigError(f"section '{section}' must be a table")
    out = {}
    for section, schema in _SCHEMA.items():
        out[section] = _validate_section(data.get(section, {}), schema, section)
    if out["experiment"]["model"] not in _MODELS:
        raise ConfigError(
            f"key 'experiment.model' must be one of {_MODELS}, "
            f"got {out['experiment']['model']!r}"
        )
    if out["truth"]["kind"] not in TRUTH_KINDS:
        raise ConfigError(
            f"key 'truth.kind' must be one of {TRUTH_KINDS}, "
            f"got {out['truth']['kind']!r}"
        )
    enums = {
        ("nnk", "trainer"): ("newton_raphson", "gradient_descent"),
        ("baselines", "mh", "likelihood"): ("distance", "standard"),
        ("baselines", "hmc", "target"): ("truth_mixture", "standard"),
    }
    for keys, allowed in enums.items():
        value = out
        for key in keys:
            value = value[key]
        if value not in allowed:
            path = ".".join(keys)
            raise ConfigError(
                f"key '{path}' must be one of {allowed}, got {value!r}")
    return out


def load_config(path):
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}")
    return validate_config(data)


def config_hash(cfg):
    """Stable content hash of a validated configuration."""
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()
