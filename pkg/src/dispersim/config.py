"""Experiment configuration: one UTF-8 JSON document, validated fail-closed.

Unknown keys are rejected everywhere so typos cannot silently fall back to
defaults. Physical values use conventional units at this boundary (D in
ps/nm/km, beta2 in ps^2/km, lengths in km) and are resolved to SI here.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .fiber import d_to_beta2


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


_BETA2_CONVENTIONAL = 1e-27  # ps^2/km in s^2/m

_TOP_KEYS = {
    "scenario",
    "fiber",
    "pcf",
    "dcf",
    "compensator",
    "signal",
    "sweep",
    "region",
    "output",
}


def _check_keys(section: dict, allowed: set, path: str) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {path}: {', '.join(unknown)}")


def _section(doc: dict, name: str) -> dict:
    value = doc.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"{name} must be an object")
    return value


def _number(value, path: str, positive: bool = False, nonnegative: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path} must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{path} must be finite")
    if positive and value <= 0:
        raise ConfigError(f"{path} must be positive")
    if nonnegative and value < 0:
        raise ConfigError(f"{path} must be non-negative")
    return value


def _integer(value, path: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path} must be an integer")
    if value < minimum:
        raise ConfigError(f"{path} must be >= {minimum}")
    return value


def _beta2_from(section: dict, path: str, lambda0_m: float) -> float:
    has_d = "d_ps_nm_km" in section
    has_b = "beta2_ps2_km" in section
    if has_d == has_b:
        raise ConfigError(
            f"{path} must give exactly one of d_ps_nm_km or beta2_ps2_km"
        )
    if has_d:
        return d_to_beta2(_number(section["d_ps_nm_km"], f"{path}.d_ps_nm_km"), lambda0_m)
    return (
        _number(section["beta2_ps2_km"], f"{path}.beta2_ps2_km")
        * _BETA2_CONVENTIONAL
    )


def _bandwidth_axis(spec, path: str) -> tuple:
    if isinstance(spec, list):
        values = tuple(_number(v, path, positive=True) for v in spec)
        if len(values) == 0:
            raise ConfigError(f"{path} must not be empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError(f"{path} must be strictly increasing")
        return values
    if isinstance(spec, dict):
        _check_keys(spec, {"min", "max", "count", "spacing"}, path)
        lo = _number(spec.get("min"), f"{path}.min", positive=True)
        hi = _number(spec.get("max"), f"{path}.max", positive=True)
        count = _integer(spec.get("count"), f"{path}.count", minimum=2)
        spacing = spec.get("spacing", "linear")
        if spacing not in ("linear", "log"):
            raise ConfigError(f"{path}.spacing must be 'linear' or 'log'")
        if hi <= lo:
            raise ConfigError(f"{path}.max must exceed {path}.min")
        if spacing == "log":
            return tuple(np.geomspace(lo, hi, count))
        return tuple(np.linspace(lo, hi, count))
    raise ConfigError(f"{path} must be a list or a min/max/count object")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated configuration with SI-resolved physical values."""

    scenario: str
    fiber_beta2: float
    lambda0_m: float
    z_m: float | None
    pcf_beta2: float | None
    dcf_beta2: float | None
    dcf_quoted_path_m: float | None
    alphas: tuple
    k_list: tuple
    gain_override: float | None
    target_broadening: float
    pulse: str
    bandwidth_hz: float | None
    width_s: float | None
    n_samples: int
    dt_s: float | None
    window_factor: float
    xi_values: tuple
    region_bandwidths_hz: tuple | None
    output_dir: str
    raw: dict

    def pulse_width_s(self) -> float:
        """Zero-to-zero width for sinc, 1/e-intensity half-width for gaussian."""
        if self.width_s is not None:
            return self.width_s
        if self.pulse == "sinc" and self.bandwidth_hz is not None:
            return 2.0 / self.bandwidth_hz
        raise ConfigError("signal section must define a pulse width or bandwidth")

    def signal_bandwidth_hz(self) -> float:
        if self.pulse != "sinc":
            raise ConfigError("bandwidth is only defined for the sinc pulse")
        if self.bandwidth_hz is not None:
            return self.bandwidth_hz
        return 2.0 / self.width_s

    def grid_dt(self) -> float:
        if self.dt_s is not None:
            return self.dt_s
        return self.window_factor * self.pulse_width_s() / self.n_samples

    def resolved(self) -> dict:
        """SI view of the configuration, for meta emission."""
        out = {
            "fiber_beta2_s2_m": self.fiber_beta2,
            "lambda0_m": self.lambda0_m,
            "z_m": self.z_m,
            "pcf_beta2_s2_m": self.pcf_beta2,
            "dcf_beta2_s2_m": self.dcf_beta2,
            "dcf_quoted_path_m": self.dcf_quoted_path_m,
            "alphas": list(self.alphas),
            "k_list": list(self.k_list),
            "gain_override": self.gain_override,
            "target_broadening": self.target_broadening,
            "pulse": self.pulse,
            "n_samples": self.n_samples,
            "window_factor": self.window_factor,
            "xi_values": list(self.xi_values),
            "output_dir": self.output_dir,
        }
        try:
            out["pulse_width_s"] = self.pulse_width_s()
            out["dt_s"] = self.grid_dt()
        except ConfigError:
            out["pulse_width_s"] = None
            out["dt_s"] = self.dt_s
        if self.pulse == "sinc" and (
            self.bandwidth_hz is not None or self.width_s is not None
        ):
            out["bandwidth_hz"] = self.signal_bandwidth_hz()
        else:
            out["bandwidth_hz"] = None
        if self.region_bandwidths_hz is not None:
            out["region_bandwidths_hz"] = list(self.region_bandwidths_hz)
        return out


def parse_config(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration root must be a JSON object")
    _check_keys(doc, _TOP_KEYS, "configuration")

    scenario = doc.get("scenario")
    if not isinstance(scenario, str) or not scenario:
        raise ConfigError("scenario must be a non-empty string")

    if "fiber" not in doc:
        raise ConfigError("fiber section is required")
    fiber = _section(doc, "fiber")
    _check_keys(fiber, {"d_ps_nm_km", "beta2_ps2_km", "lambda0_m", "z_km"}, "fiber")
    lambda0_m = _number(fiber.get("lambda0_m", 1.55e-6), "fiber.lambda0_m", positive=True)
    fiber_beta2 = _beta2_from(fiber, "fiber", lambda0_m)
    z_m = None
    if "z_km" in fiber:
        z_m = _number(fiber["z_km"], "fiber.z_km", nonnegative=True) * 1e3

    pcf_beta2 = None
    if "pcf" in doc:
        pcf = _section(doc, "pcf")
        _check_keys(pcf, {"d_ps_nm_km", "beta2_ps2_km"}, "pcf")
        pcf_beta2 = _beta2_from(pcf, "pcf", lambda0_m)

    dcf_beta2 = None
    dcf_quoted_path_m = None
    if "dcf" in doc:
        dcf = _section(doc, "dcf")
        _check_keys(dcf, {"d_ps_nm_km", "beta2_ps2_km", "quoted_path_km"}, "dcf")
        dcf_beta2 = _beta2_from(dcf, "dcf", lambda0_m)
        if "quoted_path_km" in dcf:
            dcf_quoted_path_m = (
                _number(dcf["quoted_path_km"], "dcf.quoted_path_km", positive=True)
                * 1e3
            )

    comp = _section(doc, "compensator")
    _check_keys(
        comp,
        {"alphas", "k_max", "k_list", "gain", "target_broadening"},
        "compensator",
    )
    alphas_raw = comp.get("alphas", [1.0])
    if not isinstance(alphas_raw, list) or not alphas_raw:
        raise ConfigError("compensator.alphas must be a non-empty list")
    alphas = tuple(_number(a, "compensator.alphas[]") for a in alphas_raw)
    if any(not (0 < a <= 1) for a in alphas):
        raise ConfigError("compensator.alphas values must lie in (0, 1]")
    if "k_max" in comp and "k_list" in comp:
        raise ConfigError("compensator must give at most one of k_max or k_list")
    if "k_list" in comp:
        k_raw = comp["k_list"]
        if not isinstance(k_raw, list) or not k_raw:
            raise ConfigError("compensator.k_list must be a non-empty list")
        k_list = tuple(_integer(k, "compensator.k_list[]") for k in k_raw)
        if any(b <= a for a, b in zip(k_list, k_list[1:])):
            raise ConfigError("compensator.k_list must be strictly increasing")
    else:
        k_max = _integer(comp.get("k_max", 12), "compensator.k_max")
        k_list = tuple(range(k_max + 1))
    gain_override = None
    if "gain" in comp:
        gain_override = _number(comp["gain"], "compensator.gain", positive=True)
    target_broadening = _number(
        comp.get("target_broadening", 1.1), "compensator.target_broadening",
        positive=True,
    )

    signal = _section(doc, "signal")
    _check_keys(
        signal,
        {"pulse", "bandwidth_hz", "width_s", "n_samples", "dt_s", "window_factor"},
        "signal",
    )
    pulse = signal.get("pulse", "sinc")
    if pulse not in ("sinc", "gaussian"):
        raise ConfigError("signal.pulse must be 'sinc' or 'gaussian'")
    bandwidth_hz = None
    width_s = None
    if pulse == "sinc":
        has_b = "bandwidth_hz" in signal
        has_w = "width_s" in signal
        if "signal" in doc and has_b == has_w:
            raise ConfigError(
                "signal must give exactly one of bandwidth_hz or width_s"
            )
        if has_b:
            bandwidth_hz = _number(signal["bandwidth_hz"], "signal.bandwidth_hz", positive=True)
        if has_w:
            width_s = _number(signal["width_s"], "signal.width_s", positive=True)
    else:
        if "bandwidth_hz" in signal:
            raise ConfigError("signal.bandwidth_hz is not defined for gaussian pulses")
        if "width_s" not in signal:
            raise ConfigError("signal.width_s is required for gaussian pulses")
        width_s = _number(signal["width_s"], "signal.width_s", positive=True)
    n_samples = _integer(signal.get("n_samples", 16384), "signal.n_samples", minimum=2)
    if n_samples & (n_samples - 1):
        raise ConfigError("signal.n_samples must be a power of two")
    dt_s = None
    if "dt_s" in signal:
        dt_s = _number(signal["dt_s"], "signal.dt_s", positive=True)
    window_factor = _number(
        signal.get("window_factor", 64.0), "signal.window_factor", positive=True
    )

    sweep = _section(doc, "sweep")
    _check_keys(sweep, {"xi"}, "sweep")
    xi_raw = sweep.get("xi", [0.5, 1.0, 2.0])
    if not isinstance(xi_raw, list) or not xi_raw:
        raise ConfigError("sweep.xi must be a non-empty list")
    xi_values = tuple(_number(x, "sweep.xi[]", positive=True) for x in xi_raw)
    if any(b <= a for a, b in zip(xi_values, xi_values[1:])):
        raise ConfigError("sweep.xi must be strictly increasing")

    region_bandwidths = None
    if "region" in doc:
        region = _section(doc, "region")
        _check_keys(region, {"bandwidths_hz"}, "region")
        if "bandwidths_hz" not in region:
            raise ConfigError("region.bandwidths_hz is required")
        region_bandwidths = _bandwidth_axis(
            region["bandwidths_hz"], "region.bandwidths_hz"
        )

    output = _section(doc, "output")
    _check_keys(output, {"dir"}, "output")
    output_dir = output.get("dir", "out")
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError("output.dir must be a non-empty string")

    return ExperimentConfig(
        scenario=scenario,
        fiber_beta2=fiber_beta2,
        lambda0_m=lambda0_m,
        z_m=z_m,
        pcf_beta2=pcf_beta2,
        dcf_beta2=dcf_beta2,
        dcf_quoted_path_m=dcf_quoted_path_m,
        alphas=alphas,
        k_list=k_list,
        gain_override=gain_override,
        target_broadening=target_broadening,
        pulse=pulse,
        bandwidth_hz=bandwidth_hz,
        width_s=width_s,
        n_samples=n_samples,
        dt_s=dt_s,
        window_factor=window_factor,
        xi_values=xi_values,
        region_bandwidths_hz=region_bandwidths,
        output_dir=output_dir,
        raw=doc,
    )


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return parse_config(doc)
