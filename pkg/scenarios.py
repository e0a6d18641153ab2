# File: scenarios.py
"""
Scenario runners behind `main.py run`.

Each runner turns a validated RunConfig into a ResultTable: one row per grid
point plus comment lines for derived quantities (spectral peaks, saturation
point, fitted rates, thresholds). `run_scenario` prepends the configuration
echo so every CSV is self-describing.
"""

import logging
from typing import Callable, Dict, List, Optional

import numpy as np

import config
from analytic import (free_decay_rates, saturation_expansion_coefficients, threshold_gamma_star,
                      threshold_rabi, Excitation)
from coupling import NotAchievableError, coupling_sweep, distance_for_coupling
from dynamics import (FitError, FreeEvolution, fit_biexponential, fit_decay_rate, g1_spectrum,
                      has_dip_then_peak, independent_reference, n_exc_trajectory, spectrogram_peaks)
from liouvillian import NumericalError
from model import NamedState, SystemParams
from results import ResultTable, format_value
from run_config import RunConfig, render_config
from stationary import (SATURATED_N_EXC, excitation_spectrum, find_spectral_peaks, g2_zero_map,
                        quadratic_sign_flip, saturation_coefficients_numeric, saturation_curve)

logger = logging.getLogger(__name__)


def _fmt(value) -> str:
    return format_value(float(value))


def _fmt_list(values) -> str:
    return ", ".join(_fmt(v) for v in values) if len(values) else "none"


def _gamma_star_values(cfg: RunConfig) -> np.ndarray:
    if cfg.has_grid("gamma_star"):
        return cfg.grid("gamma_star")
    return np.array([cfg.params.gamma_star])


def _free(p: SystemParams) -> SystemParams:
    return p.replace(rabi=0.0)


def header_comments(cfg: RunConfig) -> List[str]:
    """Version line followed by the rendered configuration."""
    return [f"dimer-dephasing {config.VERSION}"] + render_config(cfg).splitlines()


# --- Steady-state scenarios ---
def run_spectrum(cfg: RunConfig, threads: Optional[int] = None) -> ResultTable:
    table = ResultTable(["gamma_star", "rabi", "detuning", "n_exc"])
    detuning = cfg.grid("detuning")
    if cfg.has_grid("rabi"):
        sweeps = [cfg.params.replace(rabi=float(r)) for r in cfg.grid("rabi")]
    else:
        sweeps = [cfg.params.replace(gamma_star=float(g)) for g in _gamma_star_values(cfg)]

    for p in sweeps:
        result = excitation_spectrum(p, detuning, threads)
        table.rows.extend((p.gamma_star, p.rabi_mean, d, n) for d, n in zip(result.axis, result.values))
        peaks = find_spectral_peaks(result)
        table.add_comment(f"peaks gamma_star={_fmt(p.gamma_star)} rabi={_fmt(p.rabi_mean)}: {_fmt_list(peaks)}")
    return table


def run_saturation(cfg: RunConfig, threads: Optional[int] = None) -> ResultTable:
    table = ResultTable(["gamma_star", "rabi", "intensity", "intensity_over_saturation",
                         "n_exc", "log_slope", "linear_order"])
    table.add_comment(f"I_sat: intensity where n_exc first reaches {_fmt(0.5 * SATURATED_N_EXC)} "
                      "(half the infinite-drive value), log-log interpolated")
    for gamma_star in _gamma_star_values(cfg):
        p = cfg.params.replace(gamma_star=float(gamma_star))
        result = saturation_curve(p, cfg.grid("rabi"), threads)
        linear, _ = saturation_coefficients_numeric(p)
        for row in zip(result.rabi, result.intensity, result.intensity_over_saturation,
                       result.n_exc, result.log_slope):
            rabi, intensity, normalized, n, slope = row
            table.rows.append((p.gamma_star, rabi, intensity, normalized, n, slope, linear * intensity))

        below = result.n_exc < 0.5 * SATURATED_N_EXC
        max_slope = float(np.nanmax(result.log_slope[below])) if np.any(below) else float("nan")
        table.add_comment(f"saturation gamma_star={_fmt(p.gamma_star)}: I_sat={_fmt(result.saturation_intensity)}"
                          f" max_log_slope={_fmt(max_slope)} linear_coefficient={_fmt(linear)}"
                          f" linear_coefficient_delta0={_fmt(saturation_expansion_coefficients(p)[0])}")
    return table


def run_g2map(cfg: RunConfig, threads: Optional[int] = None) -> ResultTable:
    table = ResultTable(["gamma_star", "rabi", "g2_zero"])
    geom = cfg.detection_geometries()[0]
    result = g2_zero_map(cfg.params, cfg.grid("rabi"), cfg.grid("gamma_star"), cfg.excitation, geom, threads)
    for i, gamma_star in enumerate(result.gamma_star_grid):
        for j, rabi in enumerate(result.rabi_grid):
            table.rows.append((gamma_star, rabi, result.values[i, j]))
    if cfg.params.omega12 != 0.0:
        table.add_comment(f"thresholds ({cfg.excitation.value}): "
                          f"gamma_star_lim={_fmt(threshold_gamma_star(cfg.params, cfg.excitation))} "
                          f"rabi_lim={_fmt(threshold_rabi(cfg.params, cfg.excitation))}")
    return table


def run_thresholds(cfg: RunConfig, threads: Optional[int] = None) -> ResultTable:
    table = ResultTable(["quantity", "excitation", "value"])
    p = cfg.params
    for quantity, formula in (("gamma_star_lim", threshold_gamma_star), ("rabi_lim", threshold_rabi)):
        for excitation in Excitation:
            table.rows.append((quantity, excitation.value, formula(p, excitation)))
    try:
        flip = quadratic_sign_flip(p.replace(laser_detuning=0.0))
    except NumericalError as e:
        logger.warning("Numeric two-photon threshold not found: %s; writing nan", e)
        flip = float("nan")
    table.rows.append(("gamma_star_lim_numeric", Excitation.TWO_PHOTON.value, flip))
    return table


# --- Free-evolution scenarios ---
def _decay_fit_comment(p: SystemParams, state: NamedState, t: np.ndarray, n: np.ndarray) -> str:
    label = f"fit gamma_star={_fmt(p.gamma_star)}"
    try:
        if state in (NamedState.S, NamedState.A) and p.gamma_star > 0.0:
            rates, amplitudes = fit_biexponential(t, n, free_decay_rates(p))
            return f"{label}: rates {_fmt_list(rates)} amplitudes {_fmt_list(amplitudes)}"
        rate = fit_decay_rate(t, n, (0.5 * (t[0] + t[-1]), t[-1]))
        return f"{label}: late rate {_fmt(rate)}"
    except FitError as e:
        logger.warning("Decay fit failed for gamma_star=%s: %s", p.gamma_star, e)
        return f"{label}: failed ({e})"


def run_decay(cfg: RunConfig, threads: Optional[int] = None) -> ResultTable:
    header = ["gamma_star", "t", "n_exc"]
    if cfg.independent_reference:
        header.append("n_exc_independent")
    table = ResultTable(header)
    t = cfg.grid("time")
    for gamma_star in _gamma_star_values(cfg):
        p = _free(cfg.params.replace(gamma_star=float(gamma_star)))
        n = n_exc_trajectory(p, cfg.initial_state, t)
        columns = [np.full(t.shape, p.gamma_star), t, n]
        if cfg.independent_reference:
            columns.append(n_exc_trajectory(independent_reference(p), cfg.initial_state, t))
        table.rows.extend(zip(*columns))
        table.add_comment(_decay_fit_comment(p, cfg.initial_state, t, n))
    return table


def run_g1spec(cfg: RunConfig, threads: Optional[int] = None) -> ResultTable:
    table = ResultTable(["t", "omega", "g1_spectrum"])
    geometries = cfg.detection_geometries()
    if len(geometries) > 1:
        logger.warning("g1spec uses the first detection phase only (phi=%s)", geometries[0].phi)
    spec = g1_spectrum(_free(cfg.params), cfg.initial_state, geometries[0], cfg.grid("time"), cfg.grid("omega"))
    for i, t in enumerate(spec.t_grid):
        table.rows.extend((t, omega, value) for omega, value in zip(spec.omega_grid, spec.values[i]))
    for index in sorted({0, spec.t_grid.size - 1}):
        table.add_comment(f"peaks t={_fmt(spec.t_grid[index])}: {_fmt_list(spectrogram_peaks(spec, index))}")
    return table


def _g2_block(evolution: FreeEvolution, state: NamedState, geom, times: np.ndarray, taus: np.ndarray):
    t_mesh, tau_mesh = np.meshgrid(times, taus, indexing="ij")
    intensity = evolution.intensity(state, geom, t_mesh)
    g2 = evolution.g2(state, geom, t_mesh, tau_mesh, undefined="nan")
    undefined = int(np.count_nonzero(np.isnan(g2)))
    if undefined:
        logger.warning("g2 undefined at %d of %d points for phi=%s (vanishing intensity); writing nan",
                       undefined, g2.size, geom.phi)
    return t_mesh, tau_mesh, intensity, g2


def run_g2time(cfg: RunConfig, threads: Optional[int] = None) -> ResultTable:
    header = ["gamma_star", "phi", "t", "tau", "intensity", "g2"]
    if cfg.independent_reference:
        header += ["intensity_independent", "g2_independent"]
    table = ResultTable(header)
    times = cfg.grid("time")
    taus = cfg.grid("tau") if cfg.has_grid("tau") else np.zeros(1)

    for gamma_star in _gamma_star_values(cfg):
        p = _free(cfg.params.replace(gamma_star=float(gamma_star)))
        evolution = FreeEvolution(p)
        reference = FreeEvolution(independent_reference(p)) if cfg.independent_reference else None
        for geom in cfg.detection_geometries():
            t_mesh, tau_mesh, intensity, g2 = _g2_block(evolution, cfg.initial_state, geom, times, taus)
            columns = [np.full(t_mesh.size, p.gamma_star), np.full(t_mesh.size, geom.phi),
                       t_mesh.ravel(), tau_mesh.ravel(), intensity.ravel(), g2.ravel()]
            if reference is not None:
                _, _, ref_intensity, ref_g2 = _g2_block(reference, cfg.initial_state, geom, times, taus)
                columns += [ref_intensity.ravel(), ref_g2.ravel()]
            table.rows.extend(zip(*columns))
            if taus[0] == 0.0:
                shape = has_dip_then_peak(g2[:, 0])
                defined = g2[:, 0][~np.isnan(g2[:, 0])]
                low, high = (defined.min(), defined.max()) if defined.size else (float("nan"), float("nan"))
                table.add_comment(f"g2(t, t) gamma_star={_fmt(p.gamma_star)} phi={_fmt(geom.phi)}: "
                                  f"dip_then_peak={'yes' if shape else 'no'} min={_fmt(low)} max={_fmt(high)}")
    return table


# --- Geometry ---
def run_coupling(cfg: RunConfig, threads: Optional[int] = None) -> ResultTable:
    table = ResultTable(["separation_over_lambda", "kr", "green_re", "green_im", "omega12", "gamma12"])
    p = cfg.params
    if cfg.has_grid("separation"):
        separations = cfg.grid("separation")
    else:
        separations = [cfg.geometry.separation_over_lambda]
    table.rows.extend(coupling_sweep(cfg.geometry, separations, p.alpha, p.gamma0))
    try:
        distance = distance_for_coupling(p.omega12, cfg.geometry, p.alpha, p.gamma0)
        table.add_comment(f"separation for omega12={_fmt(p.omega12)}: {_fmt(distance)}")
    except NotAchievableError as e:
        table.add_comment(f"separation for omega12={_fmt(p.omega12)}: not achievable ({e})")
    return table


RUNNERS: Dict[str, Callable[[RunConfig, Optional[int]], ResultTable]] = {
    "spectrum": run_spectrum,
    "saturation": run_saturation,
    "g2map": run_g2map,
    "decay": run_decay,
    "g1spec": run_g1spec,
    "g2time": run_g2time,
    "thresholds": run_thresholds,
    "coupling": run_coupling,
}


def run_scenario(cfg: RunConfig, threads: Optional[int] = None) -> ResultTable:
    """
    Runs the scenario named in the configuration.

    Returns:
        ResultTable whose first comment lines echo the version and configuration.
    """
    logger.info("Running scenario '%s'", cfg.scenario)
    table = RUNNERS[cfg.scenario](cfg, threads)
    table.comments[:0] = header_comments(cfg)
    logger.info("Scenario '%s' produced %d rows", cfg.scenario, len(table.rows))
    return table
