"""Experiment runners behind the CLI: deterministic CSV/JSON emission.

All numeric CSV fields use 9 significant digits and LF line endings so a
fixed configuration reproduces byte-identical output. Every run also emits
a ``meta.json`` holding the raw configuration, its SI resolution and the
pulse-width metric in use.
"""

import json
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .compensator import (
    CompensatorSpec,
    band_residual,
    compensate,
    compensation_latency,
    match_pcf,
)
from .config import ConfigError, ExperimentConfig
from .convergence import stable, z_max
from .fiber import FiberParams, propagate
from .signal import (
    Envelope,
    FrequencyGrid,
    WIDTH_METRIC,
    broadening_factor,
    make_gaussian_pulse,
    make_sinc_pulse,
)

REGION_CSV_HEADER = "B_hz,z_max_m,alpha,beta2_si"
SWEEP_CSV_HEADER = "xi,alpha,K,broadening_factor,residual_max"
ENVELOPE_CSV_HEADER = "t_s,re,im"


class DivergenceError(RuntimeError):
    """The requested operating point lies outside the convergence region."""


def fmt(x: float) -> str:
    return f"{float(x):.9g}"


def _write_text(path: Path, lines) -> None:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_meta(outdir: Path, command: str, cfg: ExperimentConfig, extra: dict) -> None:
    meta = {
        "command": command,
        "version": __version__,
        "config": cfg.raw,
        "resolved_si": cfg.resolved(),
        "width_metric": WIDTH_METRIC,
    }
    meta.update(extra)
    text = json.dumps(meta, indent=2, sort_keys=True) + "\n"
    (outdir / "meta.json").write_text(text, encoding="utf-8", newline="\n")


def build_grid(cfg: ExperimentConfig) -> FrequencyGrid:
    return FrequencyGrid(cfg.n_samples, cfg.grid_dt())


def build_pulse(cfg: ExperimentConfig, grid: FrequencyGrid) -> Envelope:
    if cfg.pulse == "sinc":
        return make_sinc_pulse(
            grid, cfg.pulse_width_s(), carrier_wavelength=cfg.lambda0_m
        )
    return make_gaussian_pulse(
        grid, cfg.pulse_width_s(), carrier_wavelength=cfg.lambda0_m
    )


def transmission_fiber(cfg: ExperimentConfig, z_m: float) -> FiberParams:
    return FiberParams((0.0, 0.0, cfg.fiber_beta2), z_m, label="transmission")


def dispersion_strength(beta2: float, z_m: float, bandwidth_hz: float) -> float:
    """Dimensionless |beta2| * z * (2*pi*B)^2."""
    return abs(beta2) * z_m * (2.0 * math.pi * bandwidth_hz) ** 2


def run_region(cfg: ExperimentConfig, outdir: Path) -> int:
    """Emit the stability boundary z_max(B) per alpha as region.csv."""
    if cfg.region_bandwidths_hz is None:
        raise ConfigError("region.bandwidths_hz is required for the region command")
    lines = [REGION_CSV_HEADER]
    for b in cfg.region_bandwidths_hz:
        for alpha in sorted(cfg.alphas):
            z = z_max(b, alpha, cfg.fiber_beta2)
            lines.append(
                f"{fmt(b)},{fmt(z)},{fmt(alpha)},{fmt(cfg.fiber_beta2)}"
            )
    _write_text(outdir / "region.csv", lines)
    write_meta(outdir, "region", cfg, {"rows": len(lines) - 1})
    return 0


def _sweep_pair_rows(params: dict) -> list:
    """Rows for one (xi, alpha) pair; module-level so worker pools can pickle it."""
    xi = params["xi"]
    alpha = params["alpha"]
    beta2 = params["fiber_beta2"]
    bandwidth = params["bandwidth_hz"]
    z_m = xi / (abs(beta2) * (2.0 * math.pi * bandwidth) ** 2)
    grid = FrequencyGrid(params["n_samples"], params["dt_s"])
    fiber = FiberParams((0.0, 0.0, beta2), z_m, label="transmission")
    sub = match_pcf(fiber, params["pcf_beta2"], alpha=alpha)
    inside = stable(alpha, beta2, bandwidth, z_m)
    rows = []
    if not inside:
        for k in params["k_list"]:
            spec = CompensatorSpec(sub, k, params["gain_override"])
            residual = band_residual(spec, grid, bandwidth)
            rows.append(f"{fmt(xi)},{fmt(alpha)},{k},diverged,{fmt(residual)}")
        return rows
    tx = make_sinc_pulse(
        grid, params["width_s"], carrier_wavelength=params["lambda0_m"]
    )
    rx = propagate(tx, fiber)
    for k in params["k_list"]:
        spec = CompensatorSpec(sub, k, params["gain_override"])
        out = compensate(rx, spec)
        factor = broadening_factor(tx, out)
        residual = band_residual(spec, grid, bandwidth)
        rows.append(f"{fmt(xi)},{fmt(alpha)},{k},{fmt(factor)},{fmt(residual)}")
    return rows


def run_sweep(cfg: ExperimentConfig, outdir: Path, jobs: int = 1) -> int:
    """Broadening factor against stage count for each (xi, alpha) pair."""
    if cfg.pcf_beta2 is None:
        raise ConfigError("pcf section is required for the sweep-k command")
    if cfg.pulse != "sinc":
        raise ConfigError("sweep-k runs on sinc pulses")
    bandwidth = cfg.signal_bandwidth_hz()
    pair_params = [
        {
            "xi": xi,
            "alpha": alpha,
            "fiber_beta2": cfg.fiber_beta2,
            "pcf_beta2": cfg.pcf_beta2,
            "bandwidth_hz": bandwidth,
            "width_s": cfg.pulse_width_s(),
            "lambda0_m": cfg.lambda0_m,
            "n_samples": cfg.n_samples,
            "dt_s": cfg.grid_dt(),
            "k_list": cfg.k_list,
            "gain_override": cfg.gain_override,
        }
        for xi in cfg.xi_values
        for alpha in sorted(cfg.alphas)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            row_blocks = list(pool.map(_sweep_pair_rows, pair_params))
    else:
        row_blocks = [_sweep_pair_rows(p) for p in pair_params]
    lines = [SWEEP_CSV_HEADER]
    for block in row_blocks:
        lines.extend(block)
    _write_text(outdir / "sweep.csv", lines)
    diverged = sum(1 for line in lines if ",diverged," in line)
    write_meta(
        outdir, "sweep-k", cfg, {"rows": len(lines) - 1, "diverged_rows": diverged}
    )
    return 0


def run_scenario(cfg: ExperimentConfig, outdir: Path) -> int:
    """Single-link design report: strength, matched lengths, stage search."""
    if cfg.z_m is None:
        raise ConfigError("fiber.z_km is required for the scenario command")
    if cfg.pcf_beta2 is None:
        raise ConfigError("pcf section is required for the scenario command")
    if cfg.pulse != "sinc":
        raise ConfigError("scenario runs on sinc pulses")
    bandwidth = cfg.signal_bandwidth_hz()
    alpha = cfg.alphas[0]
    if not stable(alpha, cfg.fiber_beta2, bandwidth, cfg.z_m):
        raise DivergenceError(
            f"(B={bandwidth:.6g} Hz, z={cfg.z_m:.6g} m, alpha={alpha:.6g}) lies "
            "outside the convergence region"
        )
    xi = dispersion_strength(cfg.fiber_beta2, cfg.z_m, bandwidth)
    fiber = transmission_fiber(cfg, cfg.z_m)
    sub = match_pcf(fiber, cfg.pcf_beta2, alpha=alpha)
    grid = build_grid(cfg)
    tx = build_pulse(cfg, grid)
    rx = propagate(tx, fiber)
    k_table = []
    required_k = None
    for k in cfg.k_list:
        spec = CompensatorSpec(sub, k, cfg.gain_override)
        out = compensate(rx, spec)
        factor = broadening_factor(tx, out)
        k_table.append(
            {
                "k": k,
                "broadening_factor": factor,
                "residual_max": band_residual(spec, grid, bandwidth),
            }
        )
        if required_k is None and factor <= cfg.target_broadening:
            required_k = k
    report = {
        "scenario": cfg.scenario,
        "inputs": {
            "bandwidth_hz": bandwidth,
            "lambda0_m": cfg.lambda0_m,
            "z_m": cfg.z_m,
            "fiber_beta2_s2_m": cfg.fiber_beta2,
            "pcf_beta2_s2_m": cfg.pcf_beta2,
            "alpha": alpha,
        },
        "dispersion_strength": {
            "value": xi,
            "formula": "|beta2_fib| * z * (2*pi*B)^2",
        },
        "matched_subsystem": {
            "length_m": sub.length_m,
            "formula": "L = beta2_fib * z / beta2_pcf",
        },
        "stage_search": {
            "target_broadening": cfg.target_broadening,
            "k_table": k_table,
            "required_k": required_k,
        },
        "width_metric": WIDTH_METRIC,
    }
    if required_k is not None:
        spec = CompensatorSpec(sub, required_k, cfg.gain_override)
        report["compensator_path"] = {
            "length_m": required_k * sub.length_m,
            "formula": "K * L",
            "latency_s": compensation_latency(spec),
            "latency_formula": "K * L * beta1_smf",
        }
    if cfg.dcf_beta2 is not None:
        dcf = {
            "beta2_s2_m": cfg.dcf_beta2,
            "path_m": cfg.z_m * abs(cfg.fiber_beta2) / abs(cfg.dcf_beta2),
            "formula": "z * |beta2_fib| / |beta2_dcf|",
        }
        if cfg.dcf_quoted_path_m is not None:
            dcf["quoted_path_m"] = cfg.dcf_quoted_path_m
        report["dcf_comparison"] = dcf
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    (outdir / "scenario.json").write_text(text, encoding="utf-8", newline="\n")
    write_meta(outdir, "scenario", cfg, {"required_k": required_k})
    return 0


def _envelope_csv(path: Path, e: Envelope) -> None:
    t = e.grid.time_axis
    lines = [ENVELOPE_CSV_HEADER]
    lines.extend(
        f"{fmt(t[i])},{fmt(e.samples[i].real)},{fmt(e.samples[i].imag)}"
        for i in range(e.grid.n_samples)
    )
    _write_text(path, lines)


def run_propagate(cfg: ExperimentConfig, outdir: Path) -> int:
    """Debug dump of the envelopes before/after the fiber (and compensator)."""
    if cfg.z_m is None:
        raise ConfigError("fiber.z_km is required for the propagate command")
    grid = build_grid(cfg)
    tx = build_pulse(cfg, grid)
    fiber = transmission_fiber(cfg, cfg.z_m)
    rx = propagate(tx, fiber)
    _envelope_csv(outdir / "envelope_input.csv", tx)
    _envelope_csv(outdir / "envelope_dispersed.csv", rx)
    extra = {"compensated": False}
    if cfg.pcf_beta2 is not None:
        sub = match_pcf(fiber, cfg.pcf_beta2, alpha=cfg.alphas[0])
        spec = CompensatorSpec(sub, cfg.k_list[-1], cfg.gain_override)
        _envelope_csv(outdir / "envelope_compensated.csv", compensate(rx, spec))
        extra = {"compensated": True, "k_stages": cfg.k_list[-1]}
    write_meta(outdir, "propagate", cfg, extra)
    return 0
