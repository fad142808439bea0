"""Scenario configuration: INI file + ``--set section.key=value`` overrides.

Precedence is scenario defaults < config file < command-line overrides.
Every value is checked against a typed schema; problems are collected and
reported together with their file line (or the offending ``--set``).
"""

from __future__ import annotations

import configparser
import copy
import math
import os
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .morse import MorseParams
from .optics import HybridParams, SingleModeParams
from .rates import BathConfig

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "SCENARIOS",
    "load_config",
    "default_workers",
]

SCENARIOS = (
    "blockade-laser-sweep",
    "blockade-map",
    "thermal-sweep",
    "laser-freq-alt",
    "amplification",
    "lasing-map",
    "validate",
)


class ConfigError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("\n".join(self.problems))


def _floatlist(s: str):
    return [float(v) for v in re.split(r"[,\s]+", s.strip()) if v]


# section -> key -> parser
SCHEMA = {
    "morse": {"omega_b": float, "delta_omega_b": float, "K": int},
    "optics": {
        "spectrum": str,
        "omega_1": float,
        "kappa_1": float,
        "omega_2": float,
        "kappa_2": float,
        "f": float,
        "response": str,
    },
    "drive": {"omega_l": float, "alpha2": float, "g0": float},
    "bath": {"gamma": float, "n_th": float},
    "sweep": {
        "omega_l_min": float,
        "omega_l_max": float,
        "omega_l_step": float,
        "alpha2_min": float,
        "alpha2_max": float,
        "alpha2_points": int,
        "delta_omega_b_min": float,
        "delta_omega_b_max": float,
        "delta_omega_b_points": int,
        "delta_omega_b_values": _floatlist,
        "n_th_values": _floatlist,
    },
    "lasing": {"kappa": float, "max_periods": int, "window_periods": int, "lasing_sigma": float},
}

_BASE = {
    "morse": {"omega_b": "20", "delta_omega_b": "2.0", "K": "16"},
    "optics": {
        "spectrum": "hybrid",
        "omega_1": "550",
        "kappa_1": "60",
        "omega_2": "486",
        "kappa_2": "0.15",
        "f": "15",
        "response": "plasmon",
    },
    "drive": {"omega_l": "501", "alpha2": "4", "g0": "2"},
    "bath": {"gamma": "0.05", "n_th": "0.05"},
    "sweep": {
        "omega_l_min": "480",
        "omega_l_max": "510",
        "omega_l_step": "0.01",
        "alpha2_min": "0.25",
        "alpha2_max": "8",
        "alpha2_points": "32",
        "delta_omega_b_min": "0.5",
        "delta_omega_b_max": "3.0",
        "delta_omega_b_points": "26",
        "delta_omega_b_values": "0.1, 0.2",
        "n_th_values": "0.05, 0.02, 0.01",
    },
    "lasing": {"kappa": "60", "max_periods": "20000", "window_periods": "100", "lasing_sigma": "0.1"},
}

# per-scenario departures from the base defaults
_SCENARIO_DEFAULTS = {
    "laser-freq-alt": {"drive": {"omega_l": "495"}},
    "amplification": {
        "morse": {"K": "120"},
        "optics": {"spectrum": "single"},
        "drive": {"omega_l": "570"},
        "sweep": {"alpha2_min": "0.05", "alpha2_max": "3.0", "alpha2_points": "60"},
    },
    "lasing-map": {
        "optics": {"spectrum": "single"},
        "drive": {"omega_l": "570"},
        "sweep": {
            "alpha2_min": "0.2",
            "alpha2_max": "0.78",
            "alpha2_points": "30",
            "delta_omega_b_values": "0, 0.1, 0.2",
        },
    },
}


def default_workers() -> int:
    env = os.environ.get("ANHARM_OM_WORKERS")
    if env is None:
        return 1
    try:
        n = int(env)
    except ValueError:
        raise ConfigError([f"ANHARM_OM_WORKERS: not an integer: {env!r}"]) from None
    if n < 1:
        raise ConfigError([f"ANHARM_OM_WORKERS: must be >= 1, got {n}"])
    return n


@dataclass
class ScenarioConfig:
    name: str
    values: dict
    out_dir: str = "."
    workers: int = 1
    sources: dict = field(default_factory=dict)

    def __getitem__(self, key: str):
        section, k = key.split(".", 1)
        return self.values[section][k]

    # ---- typed views
    def morse(self, delta_omega_b: Optional[float] = None, max_levels: Optional[int] = None) -> MorseParams:
        dw = self["morse.delta_omega_b"] if delta_omega_b is None else delta_omega_b
        return MorseParams(self["morse.omega_b"], dw, max_levels)

    def truncation(self, m: MorseParams) -> int:
        return min(self["morse.K"], m.n_bound)

    def spectrum_params(self):
        if self["optics.spectrum"] == "single":
            return SingleModeParams(self["optics.omega_1"], self["optics.kappa_1"])
        return HybridParams(
            self["optics.omega_1"],
            self["optics.omega_2"],
            self["optics.kappa_1"],
            self["optics.kappa_2"],
            self["optics.f"],
            self["optics.response"],
        )

    def bath(self, n_th: Optional[float] = None) -> BathConfig:
        return BathConfig(self["bath.gamma"], self["bath.n_th"] if n_th is None else n_th)

    def omega_l_grid(self) -> np.ndarray:
        lo, hi, step = self["sweep.omega_l_min"], self["sweep.omega_l_max"], self["sweep.omega_l_step"]
        n = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return np.round(lo + step * np.arange(n), 9)

    def alpha2_grid(self) -> np.ndarray:
        return np.linspace(self["sweep.alpha2_min"], self["sweep.alpha2_max"], self["sweep.alpha2_points"])

    def delta_omega_b_grid(self) -> np.ndarray:
        return np.linspace(
            self["sweep.delta_omega_b_min"],
            self["sweep.delta_omega_b_max"],
            self["sweep.delta_omega_b_points"],
        )

    def echo(self) -> dict:
        return copy.deepcopy(self.values)


def _file_lines(path: str) -> dict:
    """(section, key) -> line number, for diagnostics."""
    where = {}
    section = None
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, 1):
            s = line.strip()
            m = re.match(r"\[([^\]]+)\]", s)
            if m:
                section = m.group(1).strip()
                where[(section, None)] = i
                continue
            m = re.match(r"([^=:#;\s][^=:]*?)\s*[=:]", s)
            if m and section is not None:
                where[(section, m.group(1).strip())] = i
    return where


def _validate(name: str, typed: dict, origin) -> list:
    problems = []

    def bad(sec, key, msg):
        problems.append(f"{origin(sec, key)}: {sec}.{key}: {msg}")

    mo, op, dr, ba, sw, la = (typed[s] for s in ("morse", "optics", "drive", "bath", "sweep", "lasing"))
    if not mo["omega_b"] > 0:
        bad("morse", "omega_b", "must be positive")
    if not 0 <= mo["delta_omega_b"] < mo["omega_b"]:
        bad("morse", "delta_omega_b", "need 0 <= delta_omega_b < omega_b")
    if mo["K"] < 2:
        bad("morse", "K", "truncation must be >= 2")
    if op["spectrum"] not in ("hybrid", "single"):
        bad("optics", "spectrum", "exactly one of 'hybrid' or 'single'")
    if op["response"] not in ("plasmon", "as-printed"):
        bad("optics", "response", "one of 'plasmon' or 'as-printed'")
    for k in ("kappa_1", "kappa_2"):
        if not op[k] > 0:
            bad("optics", k, "linewidth must be positive")
    if op["f"] < 0:
        bad("optics", "f", "must be >= 0")
    if dr["alpha2"] < 0:
        bad("drive", "alpha2", "must be >= 0")
    if ba["gamma"] < 0:
        bad("bath", "gamma", "must be >= 0")
    if ba["n_th"] < 0:
        bad("bath", "n_th", "must be >= 0")
    if not sw["omega_l_step"] > 0:
        bad("sweep", "omega_l_step", "must be positive")
    for lo, hi in (
        ("omega_l_min", "omega_l_max"),
        ("alpha2_min", "alpha2_max"),
        ("delta_omega_b_min", "delta_omega_b_max"),
    ):
        if not sw[lo] < sw[hi]:
            bad("sweep", lo, f"range must be ordered and nonempty ({lo} < {hi})")
    if sw["alpha2_min"] < 0:
        bad("sweep", "alpha2_min", "must be >= 0")
    if sw["delta_omega_b_min"] < 0 or sw["delta_omega_b_max"] >= mo["omega_b"]:
        bad("sweep", "delta_omega_b_min", "anharmonicity range must lie in [0, omega_b)")
    for k in ("alpha2_points", "delta_omega_b_points"):
        if sw[k] < 2:
            bad("sweep", k, "need at least two points")
    for k in ("delta_omega_b_values", "n_th_values"):
        vals = sw[k]
        if not vals:
            bad("sweep", k, "list must be nonempty")
        elif any(v < 0 for v in vals):
            bad("sweep", k, "values must be >= 0")
        elif len(set(vals)) != len(vals):
            bad("sweep", k, "values must be distinct")
    if any(v >= mo["omega_b"] for v in sw["delta_omega_b_values"]):
        bad("sweep", "delta_omega_b_values", "anharmonicity must be < omega_b")
    if not la["kappa"] > 0:
        bad("lasing", "kappa", "must be positive")
    if la["window_periods"] < 50:
        bad("lasing", "window_periods", "window must hold at least 50 periods")
    if la["max_periods"] < 2 * la["window_periods"]:
        bad("lasing", "max_periods", "need room for two windows")
    if not la["lasing_sigma"] > 0:
        bad("lasing", "lasing_sigma", "must be positive")
    return problems


def load_config(
    name: str,
    path: Optional[str] = None,
    overrides=(),
    out_dir: Optional[str] = None,
    workers: Optional[int] = None,
) -> ScenarioConfig:
    """Merge defaults, file and overrides; raise ConfigError listing every problem."""
    if name not in SCENARIOS:
        raise ConfigError([f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}"])
    raw = copy.deepcopy(_BASE)
    for sec, kv in _SCENARIO_DEFAULTS.get(name, {}).items():
        raw[sec].update(kv)
    sources = {}
    problems = []

    if path is not None:
        lines = {}
        try:
            lines = _file_lines(path)
            cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
            cp.optionxform = str
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
        except OSError as exc:
            raise ConfigError([f"{path}: cannot read config: {exc.strerror}"]) from None
        except configparser.Error as exc:
            raise ConfigError([f"{path}: {exc.message if hasattr(exc, 'message') else exc}"]) from None
        for sec in cp.sections():
            if sec not in SCHEMA:
                problems.append(f"{path}:{lines.get((sec, None), '?')}: unknown section [{sec}]")
                continue
            for key, val in cp.items(sec):
                if key not in SCHEMA[sec]:
                    problems.append(f"{path}:{lines.get((sec, key), '?')}: {sec}.{key}: unknown key")
                    continue
                raw[sec][key] = val
                sources[(sec, key)] = f"{path}:{lines.get((sec, key), '?')}"

    for item in overrides:
        m = re.fullmatch(r"\s*([A-Za-z_]\w*)\.([A-Za-z_]\w*)\s*=(.*)", item)
        if not m:
            problems.append(f"--set {item!r}: expected section.key=value")
            continue
        sec, key, val = m.group(1), m.group(2), m.group(3).strip()
        if sec not in SCHEMA or key not in SCHEMA[sec]:
            problems.append(f"--set {sec}.{key}: unknown field")
            continue
        raw[sec][key] = val
        sources[(sec, key)] = f"--set {sec}.{key}"

    def origin(sec, key):
        return sources.get((sec, key), "default")

    typed = {}
    for sec, keys in SCHEMA.items():
        typed[sec] = {}
        for key, conv in keys.items():
            try:
                v = conv(raw[sec][key])
                if isinstance(v, float) and not math.isfinite(v):
                    raise ValueError("not finite")
                if isinstance(v, list) and not all(math.isfinite(x) for x in v):
                    raise ValueError("not finite")
                typed[sec][key] = v
            except ValueError:
                problems.append(
                    f"{origin(sec, key)}: {sec}.{key}: cannot parse {raw[sec][key]!r} as {conv.__name__.lstrip('_')}"
                )
    if problems:
        raise ConfigError(problems)
    problems = _validate(name, typed, origin)
    if workers is None:
        workers = default_workers()
    if workers < 1:
        problems.append(f"--workers: must be >= 1, got {workers}")
    if problems:
        raise ConfigError(problems)
    return ScenarioConfig(name, typed, out_dir or ".", workers, sources)
