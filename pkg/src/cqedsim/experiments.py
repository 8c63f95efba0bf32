"""Config-driven experiments and their delimited/JSON outputs.

Each ``run_*`` function computes its data, writes the tables into ``out``
and returns the summary dictionary that was written alongside them.
"""

from __future__ import annotations

import csv
import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circuits import (
    TWO_PI,
    DriveParams,
    TransmonParams,
    drive_term,
    jc_hamiltonian,
    transmon_frequencies,
)
from .config import ExperimentConfig
from .dynamics import (
    TRUNCATION_LIMIT,
    EvolutionResult,
    TimeGrid,
    collapse_set,
    evolve_master,
    evolve_schrodinger,
)
from .errors import ContractError, RegimeWarning
from .jc import dispersive_shift, jc_block
from .operators import product_state
from .readout import (
    ReadoutParams,
    conditioned_cavity_trajectory,
    conditioned_fixed_point,
    dispersive_reflection_sweep,
    readout_separation,
)

PROBABILITY_SLACK = 1e-8


@dataclass(frozen=True)
class SweepGrid:
    """Excited-state population indexed ``[delta][time]``."""

    delta_values: np.ndarray
    times: np.ndarray
    p_excited: np.ndarray

    def __post_init__(self):
        if self.p_excited.shape != (len(self.delta_values), len(self.times)):
            raise ContractError("sweep grid shape does not match its axes")


# -- output helpers ----------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % value


def write_table(out: Path, name: str, columns: dict, fmt: str = "csv") -> Path:
    """Write equal-length columns as ``name.csv`` (17 significant digits) or ``name.json``."""
    out.mkdir(parents=True, exist_ok=True)
    keys = list(columns)
    data = [np.asarray(columns[k]) for k in keys]
    if fmt == "json":
        path = out / f"{name}.json"
        payload = {k: [float(x) for x in col] for k, col in zip(keys, data)}
        path.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")
        return path
    path = out / f"{name}.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(keys)
        for row in zip(*data):
            writer.writerow([_fmt(x) for x in row])
    return path


def write_summary(out: Path, name: str, summary: dict) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.json"
    path.write_text(json.dumps(summary, indent=2, default=float) + "\n", encoding="utf-8")
    return path


def _grid(cfg: ExperimentConfig) -> TimeGrid:
    return TimeGrid(0.0, cfg.grid.t_end_ns, cfg.grid.points, cfg.grid.substeps)


def _guard(result: EvolutionResult, label: str, N: int):
    top = result.diagnostics.get("max_top_population", 0.0)
    if top >= TRUNCATION_LIMIT:
        raise ContractError(f"{label}: top-Fock population {top:.3g} exceeds {TRUNCATION_LIMIT}")
    p = result.series["p_excited"]
    n = result.series["n_cavity"]
    if p.min() < -PROBABILITY_SLACK or p.max() > 1 + PROBABILITY_SLACK:
        raise ContractError(f"{label}: excited population left [0, 1]")
    if n.min() < -PROBABILITY_SLACK or n.max() > N - 1 + PROBABILITY_SLACK:
        raise ContractError(f"{label}: cavity occupation left [0, N-1]")


def _diagnostics(result: EvolutionResult) -> dict:
    return {k: float(v) for k, v in result.diagnostics.items()}


# -- spectral estimate -------------------------------------------------------


def dominant_frequency(times, signal, pad: int = 64) -> float:
    """Strongest non-DC frequency (cycles per time unit) of a uniformly sampled signal.

    Hann-windowed, zero-padded FFT with a three-point log-parabolic peak
    refinement.
    """
    times = np.asarray(times, dtype=float)
    x = np.asarray(signal, dtype=float)
    x = (x - x.mean()) * np.hanning(len(x))
    n = len(x) * pad
    spectrum = np.abs(np.fft.rfft(x, n))
    df = 1.0 / (n * (times[1] - times[0]))
    k = int(np.argmax(spectrum[1:])) + 1
    if k + 1 >= len(spectrum) or spectrum[k] == 0:
        return k * df
    a, b, c = np.log(spectrum[k - 1 : k + 2] + 1e-300)
    denom = a - 2 * b + c
    shift = 0.5 * (a - c) / denom if denom != 0 else 0.0
    return (k + shift) * df


# -- baseline ----------------------------------------------------------------


def baseline_data(cfg: ExperimentConfig) -> tuple[dict, dict]:
    s = cfg.system
    dims = s.dims
    grid = _grid(cfg)
    psi0 = product_state(dims, (1, 0))
    coupled = evolve_schrodinger(jc_hamiltonian(s.omega_R, s.omega_T, s.g, s.N), psi0, grid)
    uncoupled = evolve_schrodinger(jc_hamiltonian(s.omega_R, s.omega_T, 0.0, s.N), psi0, grid)
    d = cfg.dissipation
    dissipative = evolve_master(
        jc_hamiltonian(s.omega_R, s.omega_T, s.g, s.N), psi0, collapse_set(d.kappa, d.gamma, d.n_th, dims), grid
    )
    runs = {"coupled": coupled, "uncoupled": uncoupled, "dissipative": dissipative}
    columns = {"t_ns": grid.times}
    for label, r in runs.items():
        _guard(r, f"baseline {label}", s.N)
        columns[f"n_cavity_{label}"] = r["n_cavity"]
        columns[f"p_excited_{label}"] = r["p_excited"]

    block = jc_block(0, s.omega_R, s.omega_T, s.g)
    summary = {
        "experiment": "baseline",
        "initial_state": "one cavity photon, qubit ground",
        "predicted_peak_p_excited": block.excited_swap_amplitude,
        "observed_peak_p_excited": float(coupled["p_excited"].max()),
        "final_n_cavity": {k: float(r["n_cavity"][-1]) for k, r in runs.items()},
        "diagnostics": {k: _diagnostics(r) for k, r in runs.items()},
        **cfg.echo(),
    }
    return columns, summary


def run_baseline(cfg: ExperimentConfig, out, fmt: str | None = None) -> dict:
    out = Path(out)
    columns, summary = baseline_data(cfg)
    write_table(out, "baseline", columns, fmt or cfg.output.format)
    write_summary(out, "baseline_summary", summary)
    return summary


# -- chevron -----------------------------------------------------------------


def _drive_params(cfg: ExperimentConfig, omega_T: float) -> DriveParams:
    d = cfg.drive
    return DriveParams(d.A, omega_T if d.omega_d is None else d.omega_d, d.envelope, d.start_ns, d.stop_ns)


def _prepare_excited(cfg: ExperimentConfig, omega_T: float):
    """Drive the decoupled qubit from ground over the rectangular window."""
    s = cfg.system
    dims = s.dims
    stop = cfg.drive.stop_ns
    psi0 = product_state(dims, (0, 0))
    if stop <= 0 or cfg.drive.A == 0:
        return psi0
    h = cfg.grid.t_end_ns / ((cfg.grid.points - 1) * cfg.grid.substeps)
    grid = TimeGrid(0.0, stop, 2, max(1, math.ceil(stop / h)))
    H = jc_hamiltonian(s.omega_R, omega_T, 0.0, s.N)
    H = H.with_terms(drive_term(_drive_params(cfg, omega_T), cfg.drive.target, dims))
    return evolve_schrodinger(H, psi0, grid).final_state


def chevron_point(cfg: ExperimentConfig, delta: float) -> EvolutionResult:
    """Closed JC evolution at detuning ``delta = omega_R - omega_T``."""
    s = cfg.system
    dims = s.dims
    omega_T = s.omega_R - delta
    H = jc_hamiltonian(s.omega_R, omega_T, s.g, s.N)
    if cfg.drive.mode == "prep":
        psi0 = _prepare_excited(cfg, omega_T)
    else:
        psi0 = product_state(dims, (0, 1))
    if cfg.drive.mode == "during":
        H = H.with_terms(drive_term(_drive_params(cfg, omega_T), cfg.drive.target, dims))
    result = evolve_schrodinger(H, psi0, _grid(cfg))
    _guard(result, f"chevron delta={delta / TWO_PI:.6g} GHz", s.N)
    return result


def chevron_sweep(cfg: ExperimentConfig, threads: int | None = None) -> SweepGrid:
    sw = cfg.sweep
    deltas = np.linspace(sw.delta_min, sw.delta_max, sw.delta_points)
    workers = max(1, threads or os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda d: chevron_point(cfg, d), deltas))
    grid = np.array([r["p_excited"] for r in results])
    return SweepGrid(deltas, results[0].times, grid)


def chevron_data(cfg: ExperimentConfig, threads: int | None = None) -> tuple[SweepGrid, dict, dict]:
    sweep = chevron_sweep(cfg, threads)
    g = cfg.system.g
    rows_delta, rows_t, rows_p = [], [], []
    per_delta = []
    for delta, p in zip(sweep.delta_values, sweep.p_excited):
        rows_delta.append(np.full(len(sweep.times), delta / TWO_PI))
        rows_t.append(sweep.times)
        rows_p.append(p)
        per_delta.append(
            {
                "delta_GHz": delta / TWO_PI,
                "dominant_frequency_GHz": dominant_frequency(sweep.times, p),
                "generalized_rabi_GHz": math.hypot(delta, 2 * g) / TWO_PI,
            }
        )
    freqs = [row["dominant_frequency_GHz"] for row in per_delta]
    argmin = int(np.argmin(freqs))
    columns = {
        "delta_GHz": np.concatenate(rows_delta),
        "t_ns": np.concatenate(rows_t),
        "p_excited": np.concatenate(rows_p),
    }
    summary = {
        "experiment": "chevron",
        "initial_state": "prepared by drive" if cfg.drive.mode == "prep" else "cavity vacuum, qubit excited",
        "drive_mode": cfg.drive.mode,
        "per_delta": per_delta,
        "min_frequency_delta_GHz": per_delta[argmin]["delta_GHz"],
        **cfg.echo(),
    }
    return sweep, columns, summary


def run_chevron(cfg: ExperimentConfig, out, fmt: str | None = None, threads: int | None = None) -> dict:
    out = Path(out)
    _, columns, summary = chevron_data(cfg, threads)
    write_table(out, "chevron", columns, fmt or cfg.output.format)
    write_summary(out, "chevron_summary", summary)
    return summary


# -- readout -----------------------------------------------------------------


def readout_data(cfg: ExperimentConfig) -> tuple[dict, dict, dict]:
    s, ro = cfg.system, cfg.readout
    detuning = s.omega_T - s.omega_R
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RegimeWarning)
        chi = dispersive_shift(s.g, detuning)
    half = ro.probe_span_kappa * ro.kappa_c / 2
    probe = np.linspace(s.omega_R - half, s.omega_R + half, ro.probe_points)
    sweep = {"omega_probe_GHz": probe / TWO_PI}
    for state in ("g", "e"):
        R = dispersive_reflection_sweep(probe, s.omega_R, ro.kappa_c, chi, state)
        sweep[f"re_R_{state}"] = R.real
        sweep[f"im_R_{state}"] = R.imag
        sweep[f"abs_R_{state}"] = np.abs(R)
        sweep[f"phase_R_{state}"] = np.angle(R)

    params = ReadoutParams(s.omega_R, ro.kappa_c, chi)
    grid = TimeGrid(0.0, ro.t_end_ns, ro.points, ro.substeps)
    b_in = ro.b_in
    traces = {st: conditioned_cavity_trajectory(params, st, lambda t: b_in, grid) for st in ("g", "e")}
    separation = readout_separation(traces["g"], traces["e"])
    trajectory = {
        "t_ns": grid.times,
        "re_a_g": traces["g"].values.real,
        "im_a_g": traces["g"].values.imag,
        "re_a_e": traces["e"].values.real,
        "im_a_e": traces["e"].values.imag,
        "separation": separation,
    }
    phase_gap = np.abs(np.angle(np.exp(1j * (sweep["phase_R_g"] - sweep["phase_R_e"]))))
    fixed = {st: conditioned_fixed_point(params, st, b_in) for st in ("g", "e")}
    summary = {
        "experiment": "readout",
        "chi_GHz": chi / TWO_PI,
        "qubit_resonator_detuning_GHz": detuning / TWO_PI,
        "dispersive_regime": not caught,
        "max_abs_R_deviation": float(max(np.max(np.abs(sweep[f"abs_R_{st}"] - 1)) for st in "ge")),
        "peak_phase_difference_GHz": float(probe[int(np.argmax(phase_gap))] / TWO_PI),
        "fixed_point": {st: [v.real, v.imag] for st, v in fixed.items()},
        "final_amplitude": {st: [tr.values[-1].real, tr.values[-1].imag] for st, tr in traces.items()},
        "final_separation": float(separation[-1]),
        **cfg.echo(),
    }
    return sweep, trajectory, summary


def run_readout(cfg: ExperimentConfig, out, fmt: str | None = None) -> dict:
    out = Path(out)
    sweep, trajectory, summary = readout_data(cfg)
    fmt = fmt or cfg.output.format
    write_table(out, "readout", sweep, fmt)
    write_table(out, "readout_trajectory", trajectory, fmt)
    write_summary(out, "readout_summary", summary)
    return summary


# -- transmon spectrum -------------------------------------------------------


def transmon_data(cfg: ExperimentConfig) -> tuple[dict, dict]:
    t = cfg.transmon
    ratios = np.geomspace(t.ratio_min, t.ratio_max, t.ratio_points)
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        for r in ratios:
            rows.append(transmon_frequencies(TransmonParams(r * t.E_C, t.E_C, t.n_cut)))
        point = transmon_frequencies(TransmonParams(t.E_J, t.E_C, t.n_cut))
    columns = {
        "EJ_over_EC": ratios,
        "omega01_numeric_GHz": np.array([f.omega_01_numeric for f in rows]) / TWO_PI,
        "omega01_asymptotic_GHz": np.array([f.omega_q_asymptotic for f in rows]) / TWO_PI,
        "anharmonicity_GHz": np.array([f.anharmonicity_numeric for f in rows]) / TWO_PI,
    }
    summary = {
        "experiment": "spectrum",
        "E_C_GHz": t.E_C / TWO_PI,
        "configured_point": {
            "EJ_over_EC": t.E_J / t.E_C,
            "omega01_numeric_GHz": point.omega_01_numeric / TWO_PI,
            "omega01_asymptotic_GHz": point.omega_q_asymptotic / TWO_PI,
            "anharmonicity_GHz": point.anharmonicity_numeric / TWO_PI,
        },
        **cfg.echo(),
    }
    return columns, summary


def run_transmon_spectrum(cfg: ExperimentConfig, out, fmt: str | None = None) -> dict:
    out = Path(out)
    columns, summary = transmon_data(cfg)
    write_table(out, "transmon", columns, fmt or cfg.output.format)
    write_summary(out, "transmon_summary", summary)
    return summary
