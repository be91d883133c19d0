"""Experiment configuration: YAML files merged over per-experiment defaults.

A config file is a flat YAML mapping. Keys not present take the defaults of
the chosen experiment; unknown keys and badly typed values are rejected with
the offending key named.
"""

import copy
import hashlib
import json
from dataclasses import dataclass, field

import yaml

EXPERIMENTS = ("overlap-scan", "linf-scan", "disjointness", "reduceA3", "dispersive-sweep",
               "strichartz-sweep", "picard-run", "stability", "energy-check")

_THRESHOLDS = {"q_hi": 4.0, "q_lo": 0.0625, "j_thr": 8}

DEFAULTS = {
    "overlap-scan": {
        "lambda": [64, 128, 256], "eps0": [0.25, 0.0625], "seed": 0, "n_pairs": 1000,
        "n_bins": 8, "c0": 4.0, **_THRESHOLDS,
        "band_max": 8.0, "n1_slope": [-0.7, 0.1], "n2_slope": [-1.2, 0.1],
    },
    "linf-scan": {
        "lambda": [64, 128, 256], "eps0": [0.25], "j": [0, 1], "k": [],
        "c_env": 10.0, **_THRESHOLDS,
    },
    "disjointness": {
        "lambda": [64, 128, 256, 512, 1024], "eps0": [0.25, 0.0625], "M": [1, 2, 4],
        "scaled_band": [0.125, 8.0], "j_star_max": 8,
    },
    "reduceA3": {
        "lambda": [64, 128, 256], "seed": 0, "seeds": 100,
        "ensembles": ["gaussian", "single", "extremal", "slowly-varying"],
        "c_ratio": 10.0, "slope_band": [-0.2, 0.2],
    },
    "dispersive-sweep": {
        "lambda": [64, 128, 256], "eps0": [0.25], "seed": 0, "seeds": 20,
        "r_max": 4.0, "n_angles": 1, "nq": 32, "classwise": False, "band_max": 16.0,
        **_THRESHOLDS,
    },
    "strichartz-sweep": {
        "lambda": [32, 64, 128, 256, 512], "s": 1.6, "T": 1.0, "R": 8.0,
        "control_order": 0.0, "slope_max": 0.1, "control_slope_min": 0.4,
    },
    "picard-run": {
        "R": 8.0, "N": 256, "s": 1.6, "T": 0.25, "amplitude": 0.01, "width": 0.5,
        "p": 1.0, "q": 1.0, "tol": 1e-10, "max_iter": 50, "factor_max": 0.5,
    },
    "stability": {
        "R": 8.0, "N": 256, "s": 1.6, "T": 0.25, "delta": [0.1, 0.01, 0.001, 0.0001],
        "background": 0.5, "width": 0.5, "perturbation_width": 0.4, "p": 1.0, "q": 1.0,
        "tol": 1e-12, "max_iter": 60, "c_band": 4.0,
    },
    "energy-check": {
        "r_order": 2.0, "T": 1.0, "R": 8.0, "N": 256, "width": 0.5,
        "bump_amplitude": 1.2, "bump_radius": 1.0, "n_points": [401, 801, 1601],
        "lambda": [32, 64, 128, 256], "rho": None, "flat_tol": 1e-8,
        "refinement_tol": 0.1, "slope_max": 0.1,
    },
}

#: Keys whose value must be a non-empty list of parameters.
GRID_KEYS = ("lambda", "eps0", "M", "delta", "n_points")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


def defaults(experiment):
    """A fresh copy of the default settings of ``experiment``."""
    if experiment not in DEFAULTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    return copy.deepcopy(DEFAULTS[experiment])


def _check_type(key, value, default):
    if default is None or value is None:
        return value
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected a boolean, got {value!r}")
        return value
    if isinstance(default, (int, float)):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        return int(value) if isinstance(default, int) and float(value).is_integer() else value
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(f"{key}: expected a list, got {value!r}")
        return value
    if isinstance(default, str) and not isinstance(value, str):
        raise ConfigError(f"{key}: expected a string, got {value!r}")
    return value


@dataclass
class ExperimentConfig:
    """Effective settings of one run."""

    experiment: str
    settings: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.settings[key]

    def get(self, key, default=None):
        return self.settings.get(key, default)

    @property
    def seed(self):
        return self.settings.get("seed")

    def as_dict(self):
        return {"experiment": self.experiment, **self.settings}

    def to_yaml(self):
        return yaml.safe_dump(self.as_dict(), sort_keys=True)

    def sha256(self):
        canon = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def make_config(experiment, overrides=None):
    """Merge ``overrides`` over the defaults of ``experiment`` and validate.

    Raises
    ------
    ConfigError
        For an unknown experiment or key, a mistyped value, or an empty
        parameter grid ("empty parameter grid").
    """
    settings = defaults(experiment)
    for key, value in (overrides or {}).items():
        if key == "experiment":
            if value != experiment:
                raise ConfigError(f"experiment: config is for {value!r}, not {experiment!r}")
            continue
        if key not in settings:
            raise ConfigError(f"{key}: unknown key for {experiment}")
        settings[key] = _check_type(key, value, settings[key])
    for key in GRID_KEYS:
        if key in settings and isinstance(settings[key], list) and not settings[key]:
            raise ConfigError(f"empty parameter grid: {key}")
    for key in ("seeds", "n_pairs", "max_iter", "N"):
        if key in settings and settings[key] < 1:
            raise ConfigError(f"{key}: must be positive")
    return ExperimentConfig(experiment, settings)


def load_config(path, experiment=None):
    """Read a YAML config; ``experiment`` defaults to the file's own key."""
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a mapping")
    experiment = experiment or data.get("experiment")
    if experiment is None:
        raise ConfigError("experiment: not given on the command line or in the file")
    return make_config(experiment, data)
