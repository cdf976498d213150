"""Sweep configuration: YAML with explicit units on physical quantities.

Quantities are strings such as ``"54.6 MHz"``, ``"790 ns"``, ``"1.034 pi"``
or ``"8 nm"``. Internally frequencies are angular (rad/us), times are in
us, angles in rad and lengths in nm. Cyclic units (Hz, kHz, MHz) are
multiplied by 2 pi.
"""
from __future__ import annotations

import copy
import hashlib
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

TWO_PI = 2 * math.pi

UNITS = {
    "frequency": {"Hz": TWO_PI * 1e-6, "kHz": TWO_PI * 1e-3, "MHz": TWO_PI, "GHz": TWO_PI * 1e3,
                  "rad/us": 1.0, "rad/μs": 1.0, "rad/ns": 1e3},
    "time": {"ns": 1e-3, "us": 1.0, "μs": 1.0, "ms": 1e3, "s": 1e6},
    "angle": {"rad": 1.0, "pi": math.pi, "π": math.pi, "deg": math.pi / 180},
    "length": {"nm": 1.0, "A": 0.1, "um": 1e3},
}

_QTY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\s\d].*?)\s*$")


class ConfigError(ValueError):
    """Invalid or incomplete configuration (CLI exit code 2)."""


@dataclass(frozen=True)
class Quantity:
    magnitude: float
    unit: str
    kind: str

    @property
    def value(self):
        return self.magnitude * UNITS[self.kind][self.unit]

    def __str__(self):
        return f"{self.magnitude!r} {self.unit}"


def parse_quantity(text, kind, where="value"):
    if isinstance(text, Quantity):
        return text
    if isinstance(text, bool) or not isinstance(text, str):
        raise ConfigError(f"{where}: expected a {kind} with units, got {text!r}")
    m = _QTY.match(text)
    if not m:
        raise ConfigError(f"{where}: cannot parse {text!r} as a {kind}")
    unit = m.group(2)
    if unit not in UNITS[kind]:
        raise ConfigError(f"{where}: unit {unit!r} is not a {kind} unit "
                          f"({', '.join(UNITS[kind])})")
    return Quantity(float(m.group(1)), unit, kind)


# section -> key -> (kind, default). Kinds: int, float, str, bool, a unit
# kind, "<unit kind>?" (may be null), "<unit kind>[]" (list) or
# "<unit kind>grid" (list or {start, stop, num}).
SCHEMA = {
    "protocol": {
        "variant": ("str", "Z2"),
        "n_spins": ("int", 8),
        "n_cycles": ("int", 100),
        "omega_x": ("frequency", "54.6 MHz"),
        "omega_y": ("frequency?", "41.7 MHz"),
        "pulse_mode": ("str", "physical"),
        "hamiltonian": ("str", "full"),
        "initial_state": ("str", "plus_x"),
        "tilt": ("angle", "30.0 deg"),
        "envelope_t1rho": ("time?", None),
        "pulse_errors": ("bool", False),
        "angle_jitter": ("float", 0.0),
        "commensurate": ("bool", True),
    },
    "ensemble": {
        "r0": ("length", "8.0 nm"),
        "r_min": ("length", "3.0 nm"),
        "coupling_at_r0": ("frequency", "105.0 kHz"),
        "coupling_scale": ("float", 1.0),
        "W": ("frequency", "4.0 MHz"),
        "angular": ("str", "dipolar"),
    },
    "sweep": {
        "theta": ("angle[]", ["1.0 pi"]),
        "tau1": ("time[]", ["1.0 us"]),
        "seeds": ("int", 1),
        "master_seed": ("int", 0),
    },
    "analysis": {
        "window": ("window", [50, 100]),
        "stft_window": ("int", 20),
        "target_nu": ("str", "1/2"),
        "threshold": ("float", 0.1),
    },
    "meanfield": {
        "theta": ("anglegrid", {"start": "0.8 pi", "stop": "1.2 pi", "num": 81}),
        "tau1": ("time[]", ["0.1 us", "0.2 us", "0.4 us"]),
        "samples": ("int", 100),
        "n_spins": ("int", 1000),
        "jbar": ("frequency?", None),
        "onsite_disorder": ("bool", True),
        "omega_y": ("frequency?", "41.7 MHz"),
        "closure": ("str", "population"),
    },
}
TOP_LEVEL = {"output": ("str", "out"), "workers": ("int", 1)}

CHOICES = {
    ("protocol", "variant"): ("Z2", "Z3"),
    ("protocol", "pulse_mode"): ("ideal", "physical"),
    ("protocol", "hamiltonian"): ("full", "effective"),
    ("protocol", "initial_state"): ("plus_x", "tilted", "ms0"),
    ("ensemble", "angular"): ("dipolar", "isotropic"),
    ("analysis", "target_nu"): ("1/2", "1/3"),
    ("meanfield", "closure"): ("population", "independent"),
}


def _coerce(kind, raw, where):
    if kind == "int":
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise ConfigError(f"{where}: expected an integer, got {raw!r}")
        return raw
    if kind == "float":
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {raw!r}")
        return float(raw)
    if kind == "str":
        if not isinstance(raw, str):
            raise ConfigError(f"{where}: expected a string, got {raw!r}")
        return raw
    if kind == "bool":
        if not isinstance(raw, bool):
            raise ConfigError(f"{where}: expected true/false, got {raw!r}")
        return raw
    if kind == "window":
        if (not isinstance(raw, (list, tuple)) or len(raw) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in raw)):
            raise ConfigError(f"{where}: expected [n_start, n_end] cycle indices")
        return [int(raw[0]), int(raw[1])]
    if kind.endswith("?"):
        return None if raw is None else _coerce(kind[:-1], raw, where)
    if kind.endswith("[]"):
        if not isinstance(raw, list) or not raw:
            raise ConfigError(f"{where}: expected a non-empty list")
        return [parse_quantity(v, kind[:-2], f"{where}[{i}]") for i, v in enumerate(raw)]
    if kind.endswith("grid"):
        base = kind[:-4]
        if isinstance(raw, dict):
            if set(raw) != {"start", "stop", "num"}:
                raise ConfigError(f"{where}: grid needs exactly start, stop, num")
            num = _coerce("int", raw["num"], f"{where}.num")
            if num < 2:
                raise ConfigError(f"{where}.num must be >= 2")
            return {"start": parse_quantity(raw["start"], base, f"{where}.start"),
                    "stop": parse_quantity(raw["stop"], base, f"{where}.stop"), "num": num}
        return _coerce(base + "[]", raw, where)
    return parse_quantity(raw, kind, where)


def _dump(v):
    if isinstance(v, Quantity):
        return str(v)
    if isinstance(v, list):
        return [_dump(x) for x in v]
    if isinstance(v, dict):
        return {k: _dump(x) for k, x in v.items()}
    return v


def _values(v):
    if isinstance(v, Quantity):
        return v.value
    if isinstance(v, list):
        return [_values(x) for x in v]
    if isinstance(v, dict):
        if set(v) == {"start", "stop", "num"}:
            return [float(x) for x in np.linspace(_values(v["start"]), _values(v["stop"]), v["num"])]
        return {k: _values(x) for k, x in v.items()}
    return v


class Section:
    """Attribute access to one config block; quantities resolve to SI-like
    internal units (rad/us, us, rad, nm)."""

    def __init__(self, name, data):
        self._name = name
        self._data = data

    def __getattr__(self, key):
        try:
            return _values(self._data[key])
        except KeyError:
            raise AttributeError(f"{self._name} has no field {key!r}") from None

    def raw(self, key):
        return self._data[key]


class SweepConfig:
    """Parsed and validated sweep configuration."""

    def __init__(self, data):
        self._data = data
        for name in SCHEMA:
            setattr(self, name, Section(name, data[name]))

    @property
    def output(self):
        return self._data["output"]

    @property
    def workers(self):
        return self._data["workers"]

    def to_dict(self):
        return _dump(self._data)

    def serialize(self):
        return yaml.safe_dump(self.to_dict(), sort_keys=True, allow_unicode=True)

    def config_hash(self):
        return hashlib.sha256(self.serialize().encode()).hexdigest()

    def replace(self, **overrides):
        """Copy with top-level or ``section__key`` overrides (values in file syntax)."""
        d = copy.deepcopy(self.to_dict())
        for k, v in overrides.items():
            if "__" in k:
                sec, key = k.split("__", 1)
                d[sec][key] = v
            else:
                d[k] = v
        return parse_config(d)


def parse_config(raw) -> SweepConfig:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a mapping")
    unknown = set(raw) - set(SCHEMA) - set(TOP_LEVEL)
    if unknown:
        raise ConfigError(f"unknown sections: {sorted(unknown)}")
    data = {}
    for name, fields in SCHEMA.items():
        block = raw.get(name)
        block = {} if block is None else block
        if not isinstance(block, dict):
            raise ConfigError(f"{name}: expected a mapping")
        extra = set(block) - set(fields)
        if extra:
            raise ConfigError(f"{name}: unknown fields {sorted(extra)}")
        data[name] = {}
        for key, (kind, default) in fields.items():
            value = _coerce(kind, block.get(key, default), f"{name}.{key}")
            allowed = CHOICES.get((name, key))
            if allowed and value not in allowed:
                raise ConfigError(f"{name}.{key}: {value!r} not in {allowed}")
            data[name][key] = value
    for key, (kind, default) in TOP_LEVEL.items():
        data[key] = _coerce(kind, raw.get(key, default), key)
    _validate(data)
    return SweepConfig(data)


def _validate(d):
    p, s, a, m = d["protocol"], d["sweep"], d["analysis"], d["meanfield"]
    if p["n_spins"] < 1 or p["n_cycles"] < 1:
        raise ConfigError("protocol.n_spins and protocol.n_cycles must be >= 1")
    if p["variant"] == "Z3" and p["initial_state"] != "ms0":
        raise ConfigError("Z3 runs start from initial_state ms0")
    if p["variant"] == "Z2" and p["initial_state"] == "ms0":
        raise ConfigError("Z2 runs start from plus_x or tilted")
    if p["variant"] == "Z2" and p["pulse_mode"] == "physical" and p["omega_y"] is None:
        raise ConfigError("physical pulses need protocol.omega_y")
    if s["seeds"] < 1:
        raise ConfigError("sweep.seeds must be >= 1")
    if any(q.value <= 0 for q in s["tau1"]):
        raise ConfigError("sweep.tau1 values must be positive")
    if not 0 < a["threshold"] < 1:
        raise ConfigError("analysis.threshold must lie in (0, 1)")
    n0, n1 = a["window"]
    if not -1 <= n0 < n1 <= p["n_cycles"]:
        raise ConfigError(f"analysis.window ({n0}, {n1}] outside 0..{p['n_cycles']}")
    div = 2 if a["target_nu"] == "1/2" else 3
    if (n1 - n0) % div:
        raise ConfigError(f"analysis.window length {n1 - n0} has no nu={a['target_nu']} bin")
    if a["stft_window"] % div:
        raise ConfigError(f"analysis.stft_window {a['stft_window']} has no nu={a['target_nu']} bin")
    if a["stft_window"] < 2:
        raise ConfigError("analysis.stft_window must be >= 2")
    if m["samples"] < 1 or m["n_spins"] < 1:
        raise ConfigError("meanfield.samples and meanfield.n_spins must be >= 1")
    if d["workers"] < 1:
        raise ConfigError("workers must be >= 1")
    if d["ensemble"]["r_min"].value >= d["ensemble"]["r0"].value:
        raise ConfigError("ensemble.r_min must be below ensemble.r0")


def load_config(path) -> SweepConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    return parse_config(raw)
