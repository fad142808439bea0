"""Named experiments run by the CLI.

Each scenario builds a list of independent grid points, evaluates them
(serially or on a process pool; results are gathered by grid index so the
worker count never changes the output) and returns tables, plots and a
JSON-ready summary.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .config import ScenarioConfig
from .lasing import (
    MeanFieldParams,
    NoMeanFieldSolution,
    TrajectoryEscaped,
    TrajectorySystem,
    instability_threshold,
    meanfield_steady,
    run_to_steady,
)
from .morse import MorseParams, position_matrix
from .optics import HybridParams, fano_extrema, make_spectrum, spectrum_single, SingleModeParams
from .output import csv_text, heatmap, line_plot
from .rates import BathConfig, DriveConfig, dressed_frequencies, linearized_params
from .steady_state import steady_state

__all__ = ["ScenarioOutput", "run_scenario", "map_points", "REGISTRY"]


@dataclass
class ScenarioOutput:
    files: dict = field(default_factory=dict)  # name -> text
    summary: dict = field(default_factory=dict)
    failures: int = 0
    report: str = ""


def map_points(fn: Callable, items: list, workers: int) -> list:
    """Evaluate fn over items, results in item order."""
    if workers <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=chunk))


def _status(results) -> tuple:
    failed = [i for i, r in enumerate(results) if r[-1] != "ok"]
    return failed, {str(i): results[i][-1] for i in failed}


# ------------------------------------------------------------ point workers


def _blockade_point(args):
    omega_b, dw, K, sp, omega_l, alpha2, g0, gamma, n_th = args
    try:
        m = MorseParams(omega_b, dw)
        K = min(K, m.n_bound)
        r = steady_state(m, make_spectrum(sp), DriveConfig.from_population(omega_l, alpha2, g0), BathConfig(gamma, n_th), K)
        return (r.n_x, r.g2_0, "ok")
    except (ArithmeticError, ValueError, IndexError) as exc:
        return (math.nan, math.nan, f"{type(exc).__name__}: {exc}")


def _amplification_point(args):
    omega_b, dw, Kmax, sp, omega_l, alpha2, g0, gamma, n_th = args
    b = BathConfig(gamma, n_th)
    d = DriveConfig.from_population(omega_l, alpha2, g0)
    spec = make_spectrum(sp)
    if dw == 0:
        m = MorseParams(omega_b, 0.0, max_levels=Kmax)
        try:
            mf = meanfield_steady(MeanFieldParams.from_linearized(linearized_params(m, spec, d), b)).n_x
        except NoMeanFieldSolution:
            mf = math.inf  # harmonic reference beyond threshold
        return (math.nan, mf, "ok")
    try:
        m = MorseParams(omega_b, dw)
        K = min(Kmax, m.n_bound)
        ladder = steady_state(m, spec, d, b, K).n_x
    except (ArithmeticError, ValueError, IndexError) as exc:
        return (math.nan, math.nan, f"{type(exc).__name__}: {exc}")
    try:
        mf = meanfield_steady(MeanFieldParams.from_linearized(linearized_params(m, spec, d), b)).n_x
    except NoMeanFieldSolution:
        mf = math.nan
    return (ladder, mf, "ok")


def _lasing_point(args):
    omega_b, dw, alpha2, g0, kappa, gamma, Delta, window, max_periods = args
    system = TrajectorySystem.from_population(alpha2, omega_b, dw, g0, kappa, gamma, Delta)
    try:
        r = run_to_steady(system, window_periods=window, max_periods=max_periods)
    except TrajectoryEscaped as exc:
        return (math.nan, math.nan, math.nan, False, f"escaped at tau={exc.tau:.6g}")
    return (r.sigma_x, r.x_mean, r.realized_population, r.converged, "ok")


# ---------------------------------------------------------------- helpers


def _spectrum_summary(cfg: ScenarioConfig) -> dict:
    sp = cfg.spectrum_params()
    if isinstance(sp, HybridParams):
        peak, trough = fano_extrema(make_spectrum(sp))
        return {"fano_peak_THz": peak, "fano_trough_THz": trough, "fano_width_THz": abs(peak - trough)}
    return {"cavity_peak_THz": sp.omega_1}


def _morse_summary(m: MorseParams, K: int) -> dict:
    return {"lambda": m.lam, "n_bound": m.n_bound, "K": K, "a_tilde": m.a_tilde}


def _blockade_sweep(cfg: ScenarioConfig, n_th_values):
    m = cfg.morse()
    K = cfg.truncation(m)
    sp = cfg.spectrum_params()
    W = cfg.omega_l_grid()
    items = [
        (m.omega_b, m.delta_omega_b, K, sp, float(w), cfg["drive.alpha2"], cfg["drive.g0"], cfg["bath.gamma"], nt)
        for nt in n_th_values
        for w in W
    ]
    res = map_points(_blockade_point, items, cfg.workers)
    return m, K, W, items, res


def _minima(W, n, g):
    out = {}
    if np.any(np.isfinite(n)):
        i = int(np.nanargmin(n))
        out.update(n_x_min=float(n[i]), omega_l_n_x_min=float(W[i]))
    if np.any(np.isfinite(g)):
        j = int(np.nanargmin(g))
        out.update(g2_min=float(g[j]), omega_l_g2_min=float(W[j]))
    if "omega_l_n_x_min" in out and "omega_l_g2_min" in out:
        out["separation_THz"] = out["omega_l_n_x_min"] - out["omega_l_g2_min"]
    return out


# --------------------------------------------------------------- scenarios


def blockade_laser_sweep(cfg: ScenarioConfig) -> ScenarioOutput:
    m, K, W, items, res = _blockade_sweep(cfg, [cfg["bath.n_th"]])
    n = np.array([r[0] for r in res])
    g = np.array([r[1] for r in res])
    failed, status = _status(res)
    d = DriveConfig.from_population(float(cfg["drive.omega_l"]), cfg["drive.alpha2"], cfg["drive.g0"])
    wt = dressed_frequencies(m, d, min(K, 3))
    summary = {
        "derived": {
            **_morse_summary(m, K),
            **_spectrum_summary(cfg),
            "dressed_spacings_THz": np.diff(wt).tolist(),
            "two_delta_omega_b_THz": 2 * m.delta_omega_b,
            **_minima(W, n, g),
        },
        "points": len(items),
        "failed_points": status,
    }
    out = ScenarioOutput(summary=summary, failures=len(failed))
    out.files["blockade_laser_sweep.csv"] = csv_text(["omega_l_THz", "n_x", "g2_0"], zip(W, n, g))
    out.files["blockade_laser_sweep.svg"] = line_plot(
        [("n_x", W, n), ("g2_0", W, g)],
        f"Blockade laser sweep (dw_b={m.delta_omega_b:g} THz, |alpha|^2={cfg['drive.alpha2']:g})",
        "laser frequency (THz)",
        "n_x, g2(0)",
    )
    return out


def thermal_sweep(cfg: ScenarioConfig) -> ScenarioOutput:
    nths = cfg["sweep.n_th_values"]
    m, K, W, items, res = _blockade_sweep(cfg, nths)
    failed, status = _status(res)
    rows, series_n, series_g, minima = [], [], [], {}
    for i, nt in enumerate(nths):
        chunk = res[i * len(W) : (i + 1) * len(W)]
        n = np.array([r[0] for r in chunk])
        g = np.array([r[1] for r in chunk])
        rows.extend((w, nt, a, b) for w, a, b in zip(W, n, g))
        series_n.append((f"n_x, n_th={nt:g}", W, n))
        series_g.append((f"g2_0, n_th={nt:g}", W, g))
        minima[f"{nt:g}"] = _minima(W, n, g)
    order = sorted(nths, reverse=True)
    nmins = [minima[f"{v:g}"].get("n_x_min", math.nan) for v in order]
    gmins = [minima[f"{v:g}"].get("g2_min", math.nan) for v in order]
    summary = {
        "derived": {
            **_morse_summary(m, K),
            **_spectrum_summary(cfg),
            "minima_by_n_th": minima,
            "n_x_min_deepens": bool(all(a > b for a, b in zip(nmins, nmins[1:]))),
            "g2_min_deepens": bool(all(a > b for a, b in zip(gmins, gmins[1:]))),
        },
        "points": len(items),
        "failed_points": status,
    }
    out = ScenarioOutput(summary=summary, failures=len(failed))
    out.files["thermal_sweep.csv"] = csv_text(["omega_l_THz", "n_th", "n_x", "g2_0"], rows)
    out.files["thermal_sweep_n_x.svg"] = line_plot(series_n, "Thermal sweep: populations", "laser frequency (THz)", "n_x")
    out.files["thermal_sweep_g2.svg"] = line_plot(series_g, "Thermal sweep: correlations", "laser frequency (THz)", "g2(0)")
    return out


def _blockade_map(cfg: ScenarioConfig, stem: str) -> ScenarioOutput:
    DW = cfg.delta_omega_b_grid()
    A2 = cfg.alpha2_grid()
    sp = cfg.spectrum_params()
    wl = cfg["drive.omega_l"]
    items = [
        (cfg["morse.omega_b"], float(dw), cfg["morse.K"], sp, wl, float(a2), cfg["drive.g0"], cfg["bath.gamma"], cfg["bath.n_th"])
        for a2 in A2
        for dw in DW
    ]
    res = map_points(_blockade_point, items, cfg.workers)
    failed, status = _status(res)
    N = np.array([r[0] for r in res]).reshape(len(A2), len(DW))
    G = np.array([r[1] for r in res]).reshape(len(A2), len(DW))
    sub = G < 1
    summary = {
        "derived": {
            **_spectrum_summary(cfg),
            "omega_l_THz": wl,
            "g2_min": float(np.nanmin(G)) if np.any(np.isfinite(G)) else None,
            "sub_poissonian_points": int(np.sum(sub)),
        },
        "points": len(items),
        "failed_points": status,
    }
    if np.any(np.isfinite(G)):
        i, j = np.unravel_index(int(np.nanargmin(G)), G.shape)
        summary["derived"].update(g2_min_alpha2=float(A2[i]), g2_min_delta_omega_b=float(DW[j]))
    if np.sum(sub) >= 3:
        # orientation of the sub-Poissonian region in the (dw_b, |alpha|^2) plane
        ii, jj = np.nonzero(sub)
        c = np.corrcoef(DW[jj], A2[ii])[0, 1]
        summary["derived"]["sub_poissonian_correlation"] = float(c) if math.isfinite(c) else None
    out = ScenarioOutput(summary=summary, failures=len(failed))
    rows = [(it[1], it[5], r[0], r[1]) for it, r in zip(items, res)]
    out.files[f"{stem}.csv"] = csv_text(["delta_omega_b_THz", "alpha2", "n_x", "g2_0"], rows)
    out.files[f"{stem}_g2.svg"] = heatmap(
        DW, A2, G, f"g2(0) at laser {wl:g} THz", "anharmonicity (THz)", "cavity population", "g2", vmin=0.0, vmax=2.0
    )
    out.files[f"{stem}_n_x.svg"] = heatmap(DW, A2, N, f"n_x at laser {wl:g} THz", "anharmonicity (THz)", "cavity population", "n_x")
    return out


def blockade_map(cfg: ScenarioConfig) -> ScenarioOutput:
    return _blockade_map(cfg, "blockade_map")


def laser_freq_alt(cfg: ScenarioConfig) -> ScenarioOutput:
    return _blockade_map(cfg, "laser_freq_alt")


def harmonic_threshold(cfg: ScenarioConfig) -> float:
    """Cavity population where Gamma_+ = gamma + Gamma_- for the harmonic ladder."""
    spec = make_spectrum(cfg.spectrum_params())
    wl, wb, g0 = cfg["drive.omega_l"], cfg["morse.omega_b"], cfg["drive.g0"]
    contrast = spec(wl - wb) - spec(wl + wb)
    if contrast <= 0:
        return math.inf
    return cfg["bath.gamma"] / (g0 * g0 * contrast)


def amplification(cfg: ScenarioConfig) -> ScenarioOutput:
    A2 = cfg.alpha2_grid()
    dws = [0.0] + [v for v in cfg["sweep.delta_omega_b_values"] if v > 0]
    sp = cfg.spectrum_params()
    items = [
        (cfg["morse.omega_b"], dw, cfg["morse.K"], sp, cfg["drive.omega_l"], float(a2), cfg["drive.g0"], cfg["bath.gamma"], cfg["bath.n_th"])
        for dw in dws
        for a2 in A2
    ]
    res = map_points(_amplification_point, items, cfg.workers)
    failed, status = _status(res)
    cols = {}
    for i, dw in enumerate(dws):
        chunk = res[i * len(A2) : (i + 1) * len(A2)]
        cols[dw] = (np.array([r[0] for r in chunk]), np.array([r[1] for r in chunk]))
    header = ["alpha2", "n_x_harmonic"]
    for dw in dws[1:]:
        header += [f"n_x_ladder_{dw:g}", f"n_x_meanfield_{dw:g}"]
    rows = []
    for j, a2 in enumerate(A2):
        row = [a2, cols[0.0][1][j]]
        for dw in dws[1:]:
            row += [cols[dw][0][j], cols[dw][1][j]]
        rows.append(row)
    th = harmonic_threshold(cfg)
    derived = {"harmonic_threshold_alpha2": th, "by_delta_omega_b": {}}
    for dw in dws[1:]:
        lad, mf = cols[dw]
        ok = np.isfinite(lad) & np.isfinite(mf) & (lad < 30)
        rel = np.abs(mf[ok] - lad[ok]) / lad[ok] if np.any(ok) else np.array([])
        m = MorseParams(cfg["morse.omega_b"], dw)
        derived["by_delta_omega_b"][f"{dw:g}"] = {
            **_morse_summary(m, min(cfg["morse.K"], m.n_bound)),
            "max_rel_meanfield_error_below_30": float(rel.max()) if rel.size else None,
            "n_x_max": float(np.nanmax(lad)) if np.any(np.isfinite(lad)) else None,
        }
    out = ScenarioOutput(
        summary={"derived": derived, "points": len(items), "failed_points": status}, failures=len(failed)
    )
    out.files["amplification.csv"] = csv_text(header, rows)
    series = [("harmonic", A2, np.where(np.isfinite(cols[0.0][1]), cols[0.0][1], np.nan))]
    for dw in dws[1:]:
        series += [(f"ladder dw={dw:g}", A2, cols[dw][0]), (f"mean field dw={dw:g}", A2, cols[dw][1])]
    clipped = [(lab, x, np.where(np.asarray(y) <= 200, y, np.nan)) for lab, x, y in series]
    out.files["amplification.svg"] = line_plot(clipped, "Amplification", "cavity population", "n_x")
    return out


def lasing_map(cfg: ScenarioConfig) -> ScenarioOutput:
    A2 = cfg.alpha2_grid()
    dws = cfg["sweep.delta_omega_b_values"]
    wb, g0, kappa, gamma = cfg["morse.omega_b"], cfg["drive.g0"], cfg["lasing.kappa"], cfg["bath.gamma"]
    Delta = cfg["optics.omega_1"] - cfg["drive.omega_l"]
    items = [
        (wb, float(dw), float(a2), g0, kappa, gamma, Delta, cfg["lasing.window_periods"], cfg["lasing.max_periods"])
        for dw in dws
        for a2 in A2
    ]
    res = map_points(_lasing_point, items, cfg.workers)
    failed, status = _status(res)
    thr = cfg["lasing.lasing_sigma"]
    rows, series, derived = [], [], {}
    S = np.full((len(dws), len(A2)), np.nan)
    for i, dw in enumerate(dws):
        chunk = res[i * len(A2) : (i + 1) * len(A2)]
        sig = np.array([r[0] for r in chunk])
        S[i] = sig
        for a2, r in zip(A2, chunk):
            rows.append((dw, a2, r[0], r[1], r[0] ** 2 / 4, r[2], r[3]))
        series.append((f"dw={dw:g}", A2, sig))
        above = np.nonzero(sig > thr)[0]
        try:
            hopf = instability_threshold(dw, omega_b=wb, g0=g0, kappa=kappa, gamma=gamma, Delta=Delta)
        except ArithmeticError:
            hopf = None
        derived[f"{dw:g}"] = {
            "hopf_threshold_alpha2": hopf,
            "trajectory_onset_alpha2": float(A2[above[0]]) if len(above) else None,
            "max_sigma_x": float(np.nanmax(sig)) if np.any(np.isfinite(sig)) else None,
            "max_n_coh": float(np.nanmax(sig) ** 2 / 4) if np.any(np.isfinite(sig)) else None,
            "unconverged_points": int(sum(1 for r in chunk if r[-1] == "ok" and not r[3])),
        }
    out = ScenarioOutput(
        summary={"derived": derived, "points": len(items), "failed_points": status}, failures=len(failed)
    )
    out.files["lasing_map.csv"] = csv_text(
        ["delta_omega_b_THz", "alpha2", "sigma_x", "x_mean", "n_coh", "realized_alpha2", "converged"], rows
    )
    out.files["lasing_map_sigma.svg"] = line_plot(series, "Lasing amplitude", "cavity population", "sigma_x / x_zpf")
    out.files["lasing_map.svg"] = heatmap(
        A2, np.asarray(dws, dtype=float), S, "Lasing map", "cavity population", "anharmonicity (THz)", "sigma_x"
    )
    return out


def validate(cfg: ScenarioConfig) -> ScenarioOutput:
    from .validation import run_checks

    checks = run_checks(cfg.workers)
    rows = [(c.name, c.value, c.tolerance, c.passed) for c in checks]
    npass = sum(c.passed for c in checks)
    width = max(len(c.name) for c in checks)
    lines = [f"{'check'.ljust(width)}  {'value':>14}  {'tolerance':>10}  result"]
    for c in checks:
        lines.append(f"{c.name.ljust(width)}  {c.value:14.6g}  {c.tolerance:10.3g}  {'PASS' if c.passed else 'FAIL'}")
    lines.append(f"{npass}/{len(checks)} checks passed")
    out = ScenarioOutput(
        summary={"checks": {c.name: {"value": c.value, "tolerance": c.tolerance, "passed": c.passed} for c in checks}},
        failures=len(checks) - npass,
        report="\n".join(lines),
    )
    out.files["validate.csv"] = csv_text(["check", "value", "tolerance", "passed"], rows)
    return out


REGISTRY = {
    "blockade-laser-sweep": blockade_laser_sweep,
    "blockade-map": blockade_map,
    "thermal-sweep": thermal_sweep,
    "laser-freq-alt": laser_freq_alt,
    "amplification": amplification,
    "lasing-map": lasing_map,
    "validate": validate,
}


def run_scenario(cfg: ScenarioConfig) -> ScenarioOutput:
    out = REGISTRY[cfg.name](cfg)
    out.summary = {"scenario": cfg.name, "config": cfg.echo(), **out.summary}
    return out
