"""Experiment configuration: an INI-style file of ``[section]`` blocks with ``key = value`` lines.

Grammar (parsed with :mod:`configparser`):

* Section names are ``system``, ``drive``, ``dissipation``, ``grid``,
  ``sweep``, ``output``, ``readout`` and ``transmon``; every key is addressed
  as ``section.key`` in error messages.
* ``#`` and ``;`` start comment lines.  Keys are case-sensitive.
* Keys ending in ``_GHz`` are linear frequencies and are multiplied by 2*pi
  on load (rad/ns internally); ``_ns`` keys are times in ns.
* Unknown sections or keys are rejected; missing keys take defaults, and
  the defaulted keys are listed in :attr:`ExperimentConfig.defaults_applied`.
* ``none`` (any case) marks an unset optional value.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from .circuits import TWO_PI
from .errors import ConfigError

REFERENCE_SET = "reference parameter set"
REPO_DEFAULT = "repo default"

# section -> key -> (type, default, provenance)
SCHEMA = {
    "system": {
        "omega_R_GHz": (float, 7.0, REFERENCE_SET),
        "omega_T_GHz": (float, 5.0, REFERENCE_SET),
        "g_GHz": (float, 0.2, REFERENCE_SET),
        "N": (int, 10, REFERENCE_SET),
        "qubit_levels": (int, 2, REPO_DEFAULT),
    },
    "drive": {
        "A_GHz": (float, 0.16, REFERENCE_SET),
        "omega_d_GHz": (float, None, REPO_DEFAULT),  # none -> qubit frequency
        "envelope": (str, "rectangular", REPO_DEFAULT),
        "start_ns": (float, 0.0, REPO_DEFAULT),
        "stop_ns": (float, None, REPO_DEFAULT),  # none -> resonant pi-pulse length
        "mode": (str, "off", REPO_DEFAULT),
        "target": (str, "qubit", REPO_DEFAULT),
    },
    "dissipation": {
        "kappa_GHz": (float, 0.1, REPO_DEFAULT),
        "gamma_GHz": (float, 0.05, REPO_DEFAULT),
        "n_th": (float, 0.0, REPO_DEFAULT),
    },
    "grid": {
        "t_end_ns": (float, 10.0, REPO_DEFAULT),
        "points": (int, 256, REFERENCE_SET),
        "substeps": (int, 64, REPO_DEFAULT),
    },
    "sweep": {
        "delta_min_GHz": (float, -1.0, REPO_DEFAULT),
        "delta_max_GHz": (float, 1.0, REPO_DEFAULT),
        "delta_points": (int, 41, REPO_DEFAULT),
    },
    "output": {
        "directory": (str, "out", REPO_DEFAULT),
        "format": (str, "csv", REPO_DEFAULT),
    },
    "readout": {
        "kappa_c_GHz": (float, 0.05, REPO_DEFAULT),
        "probe_points": (int, 401, REPO_DEFAULT),
        "probe_span_kappa": (float, 10.0, REPO_DEFAULT),
        "b_in": (float, 1.0, REPO_DEFAULT),
        "t_end_ns": (float, 200.0, REPO_DEFAULT),
        "points": (int, 256, REPO_DEFAULT),
        "substeps": (int, 16, REPO_DEFAULT),
    },
    "transmon": {
        "E_C_GHz": (float, 0.3, REPO_DEFAULT),
        "E_J_GHz": (float, 15.0, REPO_DEFAULT),
        "n_cut": (int, 20, REPO_DEFAULT),
        "ratio_min": (float, 10.0, REPO_DEFAULT),
        "ratio_max": (float, 1000.0, REPO_DEFAULT),
        "ratio_points": (int, 41, REPO_DEFAULT),
    },
}

DRIVE_MODES = ("off", "during", "prep")
ENVELOPES = ("constant", "rectangular")
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class SystemConfig:
    omega_R: float
    omega_T: float
    g: float
    N: int
    qubit_levels: int

    @property
    def dims(self) -> tuple[int, int]:
        return (self.N, self.qubit_levels)


@dataclass(frozen=True)
class DriveConfig:
    A: float
    omega_d: float | None  # None tracks the qubit frequency
    envelope: str
    start_ns: float
    stop_ns: float
    mode: str
    target: str


@dataclass(frozen=True)
class DissipationConfig:
    kappa: float
    gamma: float
    n_th: float


@dataclass(frozen=True)
class GridConfig:
    t_end_ns: float
    points: int
    substeps: int


@dataclass(frozen=True)
class SweepConfig:
    delta_min: float
    delta_max: float
    delta_points: int


@dataclass(frozen=True)
class OutputConfig:
    directory: str
    format: str


@dataclass(frozen=True)
class ReadoutConfig:
    kappa_c: float
    probe_points: int
    probe_span_kappa: float
    b_in: float
    t_end_ns: float
    points: int
    substeps: int


@dataclass(frozen=True)
class TransmonConfig:
    E_C: float
    E_J: float
    n_cut: int
    ratio_min: float
    ratio_max: float
    ratio_points: int


@dataclass(frozen=True)
class ExperimentConfig:
    system: SystemConfig
    drive: DriveConfig
    dissipation: DissipationConfig
    grid: GridConfig
    sweep: SweepConfig
    output: OutputConfig
    readout: ReadoutConfig
    transmon: TransmonConfig
    resolved: dict = field(repr=False)
    defaults_applied: dict = field(repr=False)

    def echo(self) -> dict:
        """Fully resolved configuration in file units plus default provenance."""
        return {"config": self.resolved, "defaults_applied": self.defaults_applied}


def _convert(kind, raw: str, path: str):
    text = raw.strip()
    if text.lower() == "none":
        return None
    try:
        if kind is int:
            return int(text)
        if kind is float:
            value = float(text)
            if not math.isfinite(value):
                raise ValueError
            return value
    except ValueError:
        raise ConfigError(f"expected {kind.__name__}, got {raw!r}", path) from None
    return text


def _resolve(parser: configparser.ConfigParser) -> tuple[dict, dict]:
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", section)
        for key in parser[section]:
            if key not in SCHEMA[section]:
                raise ConfigError("unknown key", f"{section}.{key}")
    resolved, defaults = {}, {}
    for section, keys in SCHEMA.items():
        values = {}
        for key, (kind, default, provenance) in keys.items():
            path = f"{section}.{key}"
            if parser.has_option(section, key):
                values[key] = _convert(kind, parser[section][key], path)
            else:
                values[key] = default
                defaults[path] = provenance
        resolved[section] = values
    return resolved, defaults


def _check(cond: bool, message: str, path: str):
    if not cond:
        raise ConfigError(message, path)


def _build(r: dict, defaults: dict) -> ExperimentConfig:
    s = r["system"]
    for key in ("omega_R_GHz", "omega_T_GHz"):
        _check(s[key] is not None and s[key] > 0, "must be a positive frequency", f"system.{key}")
    _check(s["g_GHz"] is not None, "is required", "system.g_GHz")
    _check(s["N"] is not None and s["N"] >= 2, "Fock truncation must be >= 2", "system.N")
    _check(s["qubit_levels"] == 2, "only a two-level qubit is supported", "system.qubit_levels")
    system = SystemConfig(TWO_PI * s["omega_R_GHz"], TWO_PI * s["omega_T_GHz"], TWO_PI * s["g_GHz"], s["N"], 2)

    d = r["drive"]
    _check(d["A_GHz"] is not None and d["A_GHz"] >= 0, "must be >= 0", "drive.A_GHz")
    _check(d["envelope"] in ENVELOPES, f"must be one of {ENVELOPES}", "drive.envelope")
    _check(d["mode"] in DRIVE_MODES, f"must be one of {DRIVE_MODES}", "drive.mode")
    _check(d["target"] in ("cavity", "qubit"), "must be 'cavity' or 'qubit'", "drive.target")
    _check(d["start_ns"] is not None and d["start_ns"] >= 0, "must be >= 0", "drive.start_ns")
    if d["stop_ns"] is None:
        # resonant pi pulse for A(b^dag + b): Rabi frequency 2A
        d["stop_ns"] = d["start_ns"] + (1 / (4 * d["A_GHz"]) if d["A_GHz"] > 0 else 0.0)
    if d["envelope"] == "rectangular":
        _check(d["stop_ns"] is not None and d["stop_ns"] >= d["start_ns"], "must be >= drive.start_ns", "drive.stop_ns")
    _check(d["mode"] != "prep" or d["envelope"] == "rectangular", "prep mode needs a rectangular envelope", "drive.envelope")
    omega_d = None if d["omega_d_GHz"] is None else TWO_PI * d["omega_d_GHz"]
    drive = DriveConfig(TWO_PI * d["A_GHz"], omega_d, d["envelope"], d["start_ns"], d["stop_ns"], d["mode"], d["target"])

    x = r["dissipation"]
    for key in ("kappa_GHz", "gamma_GHz", "n_th"):
        _check(x[key] is not None and x[key] >= 0, "must be >= 0", f"dissipation.{key}")
    dissipation = DissipationConfig(TWO_PI * x["kappa_GHz"], TWO_PI * x["gamma_GHz"], x["n_th"])

    gr = r["grid"]
    _check(gr["t_end_ns"] is not None and gr["t_end_ns"] > 0, "must be positive", "grid.t_end_ns")
    _check(gr["points"] is not None and gr["points"] >= 2, "must be >= 2", "grid.points")
    _check(gr["substeps"] is not None and gr["substeps"] >= 1, "must be >= 1", "grid.substeps")
    grid = GridConfig(gr["t_end_ns"], gr["points"], gr["substeps"])

    sw = r["sweep"]
    _check(sw["delta_min_GHz"] is not None and sw["delta_max_GHz"] is not None, "sweep bounds are required", "sweep")
    _check(sw["delta_min_GHz"] <= sw["delta_max_GHz"], "must not exceed sweep.delta_max_GHz", "sweep.delta_min_GHz")
    _check(sw["delta_points"] is not None and sw["delta_points"] >= 1, "must be >= 1", "sweep.delta_points")
    sweep = SweepConfig(TWO_PI * sw["delta_min_GHz"], TWO_PI * sw["delta_max_GHz"], sw["delta_points"])

    o = r["output"]
    _check(o["format"] in FORMATS, f"must be one of {FORMATS}", "output.format")
    output = OutputConfig(o["directory"] or "out", o["format"])

    ro = r["readout"]
    _check(ro["kappa_c_GHz"] is not None and ro["kappa_c_GHz"] > 0, "must be positive", "readout.kappa_c_GHz")
    _check(ro["probe_points"] is not None and ro["probe_points"] >= 3, "must be >= 3", "readout.probe_points")
    _check(ro["probe_span_kappa"] is not None and ro["probe_span_kappa"] > 0, "must be positive", "readout.probe_span_kappa")
    _check(ro["b_in"] is not None, "is required", "readout.b_in")
    _check(ro["t_end_ns"] is not None and ro["t_end_ns"] > 0, "must be positive", "readout.t_end_ns")
    _check(ro["points"] is not None and ro["points"] >= 2, "must be >= 2", "readout.points")
    _check(ro["substeps"] is not None and ro["substeps"] >= 1, "must be >= 1", "readout.substeps")
    readout = ReadoutConfig(
        TWO_PI * ro["kappa_c_GHz"], ro["probe_points"], ro["probe_span_kappa"], ro["b_in"],
        ro["t_end_ns"], ro["points"], ro["substeps"],
    )

    t = r["transmon"]
    for key in ("E_C_GHz", "E_J_GHz", "ratio_min"):
        _check(t[key] is not None and t[key] > 0, "must be positive", f"transmon.{key}")
    _check(t["n_cut"] is not None and t["n_cut"] >= 5, "must be >= 5", "transmon.n_cut")
    _check(t["ratio_max"] is not None and t["ratio_max"] >= t["ratio_min"], "must be >= transmon.ratio_min", "transmon.ratio_max")
    _check(t["ratio_points"] is not None and t["ratio_points"] >= 2, "must be >= 2", "transmon.ratio_points")
    transmon = TransmonConfig(TWO_PI * t["E_C_GHz"], TWO_PI * t["E_J_GHz"], t["n_cut"], t["ratio_min"], t["ratio_max"], t["ratio_points"])

    return ExperimentConfig(system, drive, dissipation, grid, sweep, output, readout, transmon, r, defaults)


def validate_config(text: str) -> ExperimentConfig:
    """Parse and validate configuration text; raises :class:`ConfigError`."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse configuration: {exc}") from None
    return _build(*_resolve(parser))


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read configuration file: {exc}") from None
    return validate_config(text)
