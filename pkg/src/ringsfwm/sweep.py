"""Coupling-grid sweeps, optimum reports, and CSV/JSON emission.

A sweep evaluates requested observables on a 1-D or 2-D grid of coupling
rates (in units of gamma_c).  Every emitted number is obtainable from a
direct library call with the same inputs; the sweep machinery only organizes
evaluation order, parallel dispatch, and serialization.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._version import __version__ as _pkg_version
from .core import (
    TWO_PI,
    CouplingConfig,
    Geometry,
    PumpMode,
    PumpSpec,
    RingParams,
    prob_scale_p0,
    rate_scale_R0,
)
from .cw import cw_accidentals_and_car, cw_pair_rate, cw_single_rate
from .optimize import (
    Objective,
    OptimizationTarget,
    PumpRegime,
    analytic_optimum,
    config_from_point,
    coupling_parameter_names,
)
from .pulsed import pulsed_pair_prob, pulsed_single_prob
from .schmidt import discretize_wavepacket, schmidt_spectrum

__all__ = [
    "SweepAxis",
    "SweepSpec",
    "SweepResult",
    "run_sweep",
    "emit",
    "render",
    "optima_table",
    "report_optima",
    "algaas_example",
]

_CW_OUTPUTS = {"Rs", "Rsi", "CAR"}
_PULSED_OUTPUTS = {"ps", "psi", "K"}
_ALL_OUTPUTS = _CW_OUTPUTS | _PULSED_OUTPUTS


@dataclass(frozen=True)
class SweepAxis:
    """One coupling axis of a sweep, in units of gamma_c."""

    name: str
    start: float
    stop: float
    n_points: int
    scale: str = "log"

    def __post_init__(self) -> None:
        if self.start <= 0.0 or self.stop <= self.start:
            raise ValueError(
                f"SweepAxis {self.name!r} requires 0 < start < stop, got "
                f"[{self.start}, {self.stop}]"
            )
        if self.n_points < 2:
            raise ValueError(f"SweepAxis {self.name!r} requires n_points >= 2")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"SweepAxis scale must be 'linear' or 'log', got {self.scale!r}")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.n_points)
        return np.linspace(self.start, self.stop, self.n_points)


@dataclass(frozen=True)
class SweepSpec:
    """Grid sweep request: geometry, axes, outputs, ring and pump."""

    geometry: Geometry
    axis1: SweepAxis
    axis2: Optional[SweepAxis]
    outputs: tuple[str, ...]
    ring: RingParams
    pump: PumpSpec
    gamma_c: float
    tgamma_c: Optional[float] = None
    coincidence_window: Optional[float] = None
    schmidt_points: int = 192
    t_max_over_gamma: float = 20.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if not self.outputs:
            raise ValueError("SweepSpec requires at least one output")
        unknown = [o for o in self.outputs if o not in _ALL_OUTPUTS]
        if unknown:
            raise ValueError(f"unknown sweep outputs {unknown!r}; valid: {sorted(_ALL_OUTPUTS)}")
        if self.pump.mode is PumpMode.CW:
            bad = [o for o in self.outputs if o in _PULSED_OUTPUTS]
            if bad:
                raise ValueError(f"outputs {bad!r} require a pulsed pump")
        else:
            bad = [o for o in self.outputs if o in _CW_OUTPUTS]
            if bad:
                raise ValueError(f"outputs {bad!r} require a CW pump")
        if "CAR" in self.outputs and self.coincidence_window is None:
            raise ValueError("CAR output requires a coincidence_window [s]")
        if self.gamma_c <= 0.0 or not math.isfinite(self.gamma_c):
            raise ValueError(f"gamma_c must be positive, got {self.gamma_c!r}")

        names = coupling_parameter_names(self.geometry)
        if self.axis1.name != names[0]:
            raise ValueError(
                f"axis1 for {self.geometry.value} must sweep {names[0]!r}, "
                f"got {self.axis1.name!r}"
            )
        if len(names) == 1:
            if self.axis2 is not None:
                raise ValueError(f"{self.geometry.value} has a single coupling knob; axis2 must be None")
        else:
            if self.axis2 is None:
                raise ValueError(f"{self.geometry.value} needs axis2 sweeping {names[1]!r}")
            if self.axis2.name != names[1]:
                raise ValueError(
                    f"axis2 for {self.geometry.value} must sweep {names[1]!r}, "
                    f"got {self.axis2.name!r}"
                )

    @property
    def pump_regime(self) -> PumpRegime:
        return PumpRegime.CW if self.pump.mode is PumpMode.CW else PumpRegime.BROADBAND_PULSE

    def to_dict(self) -> dict:
        axis = lambda a: None if a is None else {  # noqa: E731
            "name": a.name, "start": a.start, "stop": a.stop,
            "n_points": a.n_points, "scale": a.scale,
        }
        pump = {"mode": self.pump.mode.value}
        if self.pump.mode is PumpMode.CW:
            pump["power_w"] = self.pump.power
        else:
            pump["pulse_energy_j"] = self.pump.energy
            if self.pump.bandwidth_factor is not None:
                pump["bandwidth_factor"] = self.pump.bandwidth_factor
            if self.pump.delta_omega is not None:
                pump["delta_omega_rad_per_s"] = self.pump.delta_omega
        return {
            "geometry": self.geometry.value,
            "axis1": axis(self.axis1),
            "axis2": axis(self.axis2),
            "outputs": list(self.outputs),
            "gamma_c_rad_per_s": self.gamma_c,
            "tgamma_c_rad_per_s": self.tgamma_c,
            "ring": {
                "n2_m2_per_w": self.ring.n2,
                "vg_m_per_s": self.ring.vg,
                "area_m2": self.ring.area,
                "circumference_m": self.ring.circumference,
                "omega0_rad_per_s": self.ring.omega0,
            },
            "pump": pump,
            "coincidence_window_s": self.coincidence_window,
            "schmidt_points": self.schmidt_points,
            "t_max_over_gamma": self.t_max_over_gamma,
        }


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    columns: tuple[str, ...]
    rows: tuple[dict, ...]
    meta: dict = field(compare=False)

    def to_json_dict(self) -> dict:
        return {"meta": self.meta, "rows": list(self.rows)}


def _config_at(spec: SweepSpec, point: tuple[float, ...]) -> CouplingConfig:
    return config_from_point(spec.geometry, point, spec.gamma_c, spec.tgamma_c)


def _evaluate_point(spec: SweepSpec, point: tuple[float, ...], output: str) -> float:
    cfg = _config_at(spec, point)
    if output == "Rs":
        return cw_single_rate(spec.ring, cfg, spec.pump.power)
    if output == "Rsi":
        return cw_pair_rate(spec.ring, cfg, spec.pump.power)
    if output == "CAR":
        return cw_accidentals_and_car(
            spec.ring, cfg, spec.pump.power, spec.coincidence_window
        )[1]
    delta_omega = spec.pump.delta_omega_for(cfg.tgamma)
    if output == "ps":
        return pulsed_single_prob(spec.ring, cfg, spec.pump.energy, delta_omega)
    if output == "psi":
        return pulsed_pair_prob(spec.ring, cfg, spec.pump.energy, delta_omega)
    if output == "K":
        grid = discretize_wavepacket(
            spec.ring, cfg, spec.pump, spec.schmidt_points, spec.t_max_over_gamma
        )
        return schmidt_spectrum(grid).K
    raise ValueError(f"unknown output {output!r}")


def _evaluate_row(spec: SweepSpec, point: tuple[float, ...]) -> dict:
    names = coupling_parameter_names(spec.geometry)
    row = {f"{n}_over_gamma_c": p for n, p in zip(names, point)}
    error = None
    for output in spec.outputs:
        try:
            row[output] = _evaluate_point(spec, point, output)
        except Exception as exc:  # noqa: BLE001 - flagged per point, sweep continues
            row[output] = float("nan")
            error = f"{output}: {exc}" if error is None else f"{error}; {output}: {exc}"
        if output == "K":
            # companion column for log-scale closeness-to-separable plots
            row["K_minus_1"] = row["K"] - 1.0
    row["error"] = error
    return row


def _grid_points(spec: SweepSpec) -> list[tuple[float, ...]]:
    v1 = spec.axis1.values()
    if spec.axis2 is None:
        return [(float(x),) for x in v1]
    v2 = spec.axis2.values()
    # axis2-major ordering: axis2 varies slowest.
    return [(float(x1), float(x2)) for x2 in v2 for x1 in v1]


def _refine_maximum(
    spec: SweepSpec,
    output: str,
    start_point: tuple[float, ...],
    start_value: float,
    axes: list[SweepAxis],
    iterations: int = 3,
    sub_points: int = 17,
) -> tuple[tuple[float, ...], float]:
    """Local log-space grid refinement of an observed maximum.

    Each pass re-grids a +-1-cell window (in the current resolution) around
    the best point and keeps the new argmax, shrinking the cell by roughly
    sub_points/2 per pass.
    """
    best_point, best_value = start_point, start_value
    ratios = []
    for ax in axes:
        vals = ax.values()
        ratios.append((vals[-1] / vals[0]) ** (1.0 / (ax.n_points - 1)))
    for _ in range(iterations):
        windows = []
        for k, ax in enumerate(axes):
            lo = max(best_point[k] / ratios[k], ax.start)
            hi = min(best_point[k] * ratios[k], ax.stop)
            windows.append(np.geomspace(lo, hi, sub_points))
        if len(axes) == 1:
            candidates = [(float(x),) for x in windows[0]]
        else:
            candidates = [(float(a), float(b)) for b in windows[1] for a in windows[0]]
        for point in candidates:
            try:
                val = _evaluate_point(spec, point, output)
            except Exception:  # noqa: BLE001 - skip failed refinement points
                continue
            if val > best_value:
                best_value = val
                best_point = point
        ratios = [r ** (2.0 / (sub_points - 1)) for r in ratios]
    return best_point, best_value


def run_sweep(
    spec: SweepSpec, threads: Optional[int] = None, refine: bool = False
) -> SweepResult:
    """Evaluate every requested output on the coupling grid.

    Rows are ordered axis2-major and the result is independent of the worker
    count.  Per-point failures land in the ``error`` column without aborting
    the sweep.  With ``refine=True`` the observed maxima reported in the
    metadata are sharpened by local grid refinement around the best cell.
    """
    points = _grid_points(spec)
    if threads is None:
        threads = os.cpu_count() or 1
    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(
                pool.map(lambda p: _evaluate_row(spec, p), points, chunksize=64)
            )
    else:
        rows = [_evaluate_row(spec, p) for p in points]

    names = coupling_parameter_names(spec.geometry)
    axis_cols = tuple(f"{n}_over_gamma_c" for n in names)
    out_cols = []
    for output in spec.outputs:
        out_cols.append(output)
        if output == "K":
            out_cols.append("K_minus_1")
    columns = axis_cols + tuple(out_cols) + ("error",)

    axes = [spec.axis1] + ([spec.axis2] if spec.axis2 is not None else [])
    observed = {}
    for output in spec.outputs:
        values = np.array([row[output] for row in rows], dtype=float)
        if np.all(np.isnan(values)):
            observed[output] = None
            continue
        k = int(np.nanargmax(values))
        best_point = tuple(rows[k][c] for c in axis_cols)
        best_value = float(values[k])
        if refine:
            best_point, best_value = _refine_maximum(
                spec, output, best_point, best_value, axes
            )
        observed[output] = {
            "point_over_gamma_c": list(best_point),
            "value": best_value,
        }

    meta = {
        "version": _pkg_version,
        "spec": spec.to_dict(),
        "refined": bool(refine),
        "coupling_parameters": list(names),
        "observed_maxima": observed,
        "optima": _analytic_optima_meta(spec),
    }
    return SweepResult(spec=spec, columns=columns, rows=tuple(rows), meta=meta)


def _analytic_optima_meta(spec: SweepSpec) -> dict:
    """Analytic optimum locations/values for the swept geometry and regime."""
    regime = spec.pump_regime
    if regime is PumpRegime.CW:
        scale = rate_scale_R0(spec.ring, spec.pump.power, spec.gamma_c)
        scale_name = "R0_per_s"
        out_names = {Objective.ONE_PHOTON: "Rs", Objective.TWO_PHOTON: "Rsi"}
    else:
        if spec.pump.bandwidth_factor is not None:
            scale = prob_scale_p0(
                spec.ring, spec.pump.energy, spec.pump.bandwidth_factor, spec.gamma_c
            )
        else:
            scale = None  # absolute-bandwidth pump: p0 is not defined
        scale_name = "p0"
        out_names = {Objective.ONE_PHOTON: "ps", Objective.TWO_PHOTON: "psi"}
    optima = {"scale_name": scale_name, "scale_value": scale,
              "plot_normalization": None if scale is None else 0.5 * scale}
    for obj, out in out_names.items():
        rec = analytic_optimum(spec.geometry, OptimizationTarget(obj, regime))
        optima[out] = {
            "couplings_over_gamma_c": list(rec.couplings),
            "peak_normalized": rec.peak_value,
            "peak_absolute": None if scale is None else rec.peak_value * scale,
        }
    return optima


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def render(result: SweepResult, fmt: str) -> str:
    """Serialize a sweep result: 'csv' (rows only) or 'json' (meta + rows)."""
    if fmt == "csv":
        lines = [",".join(result.columns)]
        for row in result.rows:
            lines.append(",".join(_format_cell(row[c]) for c in result.columns))
        return "\n".join(lines) + "\n"
    if fmt == "json":
        return json.dumps(result.to_json_dict(), indent=2) + "\n"
    raise ValueError(f"unknown emit format {fmt!r}; expected 'csv' or 'json'")


def emit(result: SweepResult, fmt: str, path) -> None:
    """Write a sweep result to ``path``; I/O failures carry the path context."""
    text = render(result, fmt)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"failed to write sweep output to {path!s}: {exc}") from exc


def optima_table(
    ring: RingParams,
    gamma_c: float,
    power: Optional[float] = None,
    energy: Optional[float] = None,
    bandwidth_factor: Optional[float] = None,
) -> list[dict]:
    """All 12 analytic optima with absolute values for the supplied drive.

    CW rows get absolute rates when ``power`` is given; pulsed rows get
    absolute per-pulse probabilities when ``energy`` and ``bandwidth_factor``
    are given.
    """
    r0 = rate_scale_R0(ring, power, gamma_c) if power is not None else None
    p0 = (
        prob_scale_p0(ring, energy, bandwidth_factor, gamma_c)
        if (energy is not None and bandwidth_factor is not None)
        else None
    )
    rows = []
    for regime in PumpRegime:
        scale = r0 if regime is PumpRegime.CW else p0
        for geometry in Geometry:
            for objective in Objective:
                rec = analytic_optimum(geometry, OptimizationTarget(objective, regime))
                rows.append(
                    {
                        "regime": regime.value,
                        "geometry": geometry.value,
                        "objective": objective.value,
                        "coupling_names": list(coupling_parameter_names(geometry)),
                        "couplings_over_gamma_c": list(rec.couplings),
                        "peak_normalized": rec.peak_value,
                        "scale_unit": "R0" if regime is PumpRegime.CW else "p0",
                        "peak_absolute": None if scale is None else rec.peak_value * scale,
                        "absolute_unit": "1/s" if regime is PumpRegime.CW else "per pulse",
                    }
                )
    return rows


def report_optima(
    ring: RingParams,
    gamma_c: float,
    power: Optional[float] = None,
    energy: Optional[float] = None,
    bandwidth_factor: Optional[float] = None,
) -> str:
    """Human-readable table of all 12 optimal coupling conditions."""
    rows = optima_table(ring, gamma_c, power, energy, bandwidth_factor)
    lines = []
    qc = ring.omega0 / gamma_c
    lines.append(
        f"ring: Qc = {qc:.3g}, FSR = {ring.fsr / 1e9:.4g} GHz, "
        f"gamma_c/2pi = {gamma_c / TWO_PI / 1e6:.4g} MHz"
    )
    if power is not None:
        lines.append(f"CW scale: R0 = {rate_scale_R0(ring, power, gamma_c):.4g} 1/s")
    if energy is not None and bandwidth_factor is not None:
        lines.append(
            f"pulse scale: p0 = {prob_scale_p0(ring, energy, bandwidth_factor, gamma_c):.4g}"
        )
    header = (
        f"{'regime':>15s}  {'geometry':>20s}  {'objective':>10s}  "
        f"{'couplings/gamma_c':>22s}  {'peak':>15s}  {'absolute':>20s}"
    )
    lines.append(header)
    lines.append("-" * len(header))
    for row in rows:
        couplings = ", ".join(f"{c:.4g}" for c in row["couplings_over_gamma_c"])
        peak = f"{row['peak_normalized']:.6g} {row['scale_unit']}"
        absolute = (
            "-"
            if row["peak_absolute"] is None
            else f"{row['peak_absolute']:.4g} {row['absolute_unit']}"
        )
        lines.append(
            f"{row['regime']:>15s}  {row['geometry']:>20s}  {row['objective']:>10s}  "
            f"{couplings:>22s}  {peak:>15s}  {absolute:>20s}"
        )
    return "\n".join(lines)


def algaas_example() -> tuple[RingParams, float]:
    """AlGaAs microring example (ring parameters, gamma_c) used by the canned
    figure commands: n2 = 2.6e-17 m^2/W, vg = 8.57e7 m/s, S = 0.330 um^2,
    L = 2*pi*143 um, lambda = 1550 nm, gamma_c/2pi = 71.1 MHz."""
    ring = RingParams.from_wavelength(
        n2=2.6e-17,
        vg=8.57e7,
        area=0.330e-12,
        circumference=TWO_PI * 143e-6,
        wavelength=1550e-9,
    )
    return ring, TWO_PI * 71.1e6
