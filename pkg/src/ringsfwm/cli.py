"""Command-line front end.

Subcommands: ``rates`` (single design point), ``sweep`` (coupling grids),
``optimize`` (optimum report), ``schmidt`` (Schmidt numbers), ``validate``
(analytic-vs-numeric cross check), and ``figure2``/``figure3`` (canned AlGaAs
coupling scans for CW and broadband-pulse pumping).

Exit codes: 0 success, 1 validation error, 2 computation failure,
3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .config import (
    coincidence_window_from_config,
    load_config,
    loss_rates_from_config,
    point_config_from_config,
    pump_from_config,
    ring_from_config,
    sweep_spec_from_config,
)
from .core import Geometry, PumpMode, PumpSpec, quality_factors, rate_scale_R0, prob_scale_p0
from .cw import cw_accidentals_and_car, cw_observables
from .optimize import OptimizationError, cross_validate_optima
from .pulsed import QuadratureError, pulsed_observables
from .schmidt import DecompositionError, discretize_wavepacket, schmidt_spectrum
from .sweep import SweepAxis, SweepSpec, algaas_example, emit, render, report_optima, run_sweep

_FIGURE_RANGE = (0.05, 5.0)
_FIGURE_K_GRID = 25


class _CliValidationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        raise _CliValidationError(message)


def _add_common(sub: argparse.ArgumentParser, config_required: bool) -> None:
    sub.add_argument("--config", required=config_required, help="INI config file")
    sub.add_argument("--out", default=None, help="output file (default: stdout)")
    sub.add_argument("--format", default=None, choices=("csv", "json"))
    sub.add_argument("--threads", type=int, default=None, help="worker threads")
    sub.add_argument("--grid", type=int, default=None, help="override grid points per axis")
    sub.add_argument(
        "--refine", action="store_true",
        help="refine reported maxima by local grid zoom",
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="ringsfwm", description=__doc__)
    parser.add_argument("--version", action="version", version=f"ringsfwm {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    for name, handler, config_required, help_text in (
        ("rates", _cmd_rates, True, "rates/probabilities at a single design point"),
        ("sweep", _cmd_sweep, True, "evaluate outputs on a coupling grid"),
        ("optimize", _cmd_optimize, True, "report all optimal coupling conditions"),
        ("schmidt", _cmd_schmidt, True, "Schmidt number at a point or on a grid"),
        ("validate", _cmd_validate, False, "cross-validate analytic vs numeric optima"),
        ("figure2", _cmd_figure2, False, "canned CW coupling scans (AlGaAs example)"),
        ("figure3", _cmd_figure3, False, "canned pulsed coupling scans (AlGaAs example)"),
    ):
        sub = subs.add_parser(name, help=help_text)
        _add_common(sub, config_required)
        sub.set_defaults(handler=handler)
    return parser


def _write_text(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    except OSError as exc:
        raise OSError(f"failed to write output to {out!s}: {exc}") from exc


def _emit_result(result, args) -> None:
    fmt = args.format or "json"
    if args.out is None:
        sys.stdout.write(render(result, fmt))
    else:
        emit(result, fmt, args.out)


def _cmd_rates(args) -> int:
    cp = load_config(args.config)
    ring = ring_from_config(cp)
    cfg = point_config_from_config(cp)
    pump = pump_from_config(cp)
    qc, q = quality_factors(ring, cfg)
    report = {
        "geometry": cfg.geometry.value,
        "couplings_rad_per_s": {
            "gamma_a": cfg.gamma_a, "gamma_b": cfg.gamma_b, "gamma_c": cfg.gamma_c,
            "tgamma_a": cfg.tgamma_a, "tgamma_b": cfg.tgamma_b, "tgamma_c": cfg.tgamma_c,
        },
        "quality_factors": {"Qc": qc, "Q": q},
        "fsr_hz": ring.fsr,
        "heralding_efficiency": cfg.heralding_efficiency,
    }
    if pump.mode is PumpMode.CW:
        obs = cw_observables(ring, cfg, pump.power)
        report["cw"] = {
            "power_w": pump.power,
            "Rs_per_s": obs.Rs,
            "Ri_per_s": obs.Ri,
            "Rsi_per_s": obs.Rsi,
            "R0_per_s": rate_scale_R0(ring, pump.power, cfg.gamma_c),
        }
        window = coincidence_window_from_config(cp)
        if window is not None:
            r_acc, car = cw_accidentals_and_car(ring, cfg, pump.power, window)
            report["cw"]["coincidence_window_s"] = window
            report["cw"]["R_acc_per_s"] = r_acc
            report["cw"]["CAR"] = car
    else:
        delta_omega = pump.delta_omega_for(cfg.tgamma)
        obs = pulsed_observables(ring, cfg, pump.energy, delta_omega)
        report["pulsed"] = {
            "pulse_energy_j": pump.energy,
            "delta_omega_rad_per_s": delta_omega,
            "ps_per_pulse": obs.ps,
            "pi_per_pulse": obs.pi,
            "psi_per_pulse": obs.psi_pair,
            "p_acc_per_pulse": obs.ps * obs.pi,
        }
        if pump.bandwidth_factor is not None:
            report["pulsed"]["p0"] = prob_scale_p0(
                ring, pump.energy, pump.bandwidth_factor, cfg.gamma_c
            )
    _write_text(json.dumps(report, indent=2), args.out)
    return 0


def _cmd_sweep(args) -> int:
    cp = load_config(args.config)
    spec = sweep_spec_from_config(cp)
    if args.grid is not None:
        spec = _with_grid(spec, args.grid)
    result = run_sweep(spec, threads=args.threads, refine=args.refine)
    _emit_result(result, args)
    return 0


def _with_grid(spec: SweepSpec, n: int) -> SweepSpec:
    axis1 = SweepAxis(spec.axis1.name, spec.axis1.start, spec.axis1.stop, n, spec.axis1.scale)
    axis2 = spec.axis2
    if axis2 is not None:
        axis2 = SweepAxis(axis2.name, axis2.start, axis2.stop, n, axis2.scale)
    return SweepSpec(
        geometry=spec.geometry, axis1=axis1, axis2=axis2, outputs=spec.outputs,
        ring=spec.ring, pump=spec.pump, gamma_c=spec.gamma_c, tgamma_c=spec.tgamma_c,
        coincidence_window=spec.coincidence_window,
        schmidt_points=spec.schmidt_points, t_max_over_gamma=spec.t_max_over_gamma,
    )


def _cmd_optimize(args) -> int:
    cp = load_config(args.config)
    ring = ring_from_config(cp)
    gamma_c, _ = loss_rates_from_config(cp)
    pump = pump_from_config(cp)
    power = pump.power if pump.mode is PumpMode.CW else None
    energy = pump.energy if pump.mode is PumpMode.PULSED else None
    bandwidth = pump.bandwidth_factor if pump.mode is PumpMode.PULSED else None
    if args.format == "json":
        from .sweep import optima_table

        table = optima_table(ring, gamma_c, power, energy, bandwidth)
        _write_text(json.dumps({"optima": table}, indent=2), args.out)
    else:
        _write_text(report_optima(ring, gamma_c, power, energy, bandwidth), args.out)
    return 0


def _cmd_schmidt(args) -> int:
    cp = load_config(args.config)
    if cp.has_section("sweep"):
        spec = sweep_spec_from_config(cp)
        if "K" not in spec.outputs:
            raise ValueError("[sweep] outputs must include K for the schmidt command")
        if args.grid is not None:
            spec = _with_grid(spec, args.grid)
        result = run_sweep(spec, threads=args.threads, refine=False)
        _emit_result(result, args)
        return 0
    ring = ring_from_config(cp)
    cfg = point_config_from_config(cp)
    pump = pump_from_config(cp)
    grid = discretize_wavepacket(ring, cfg, pump)
    res = schmidt_spectrum(grid)
    report = {
        "geometry": cfg.geometry.value,
        "K": res.K,
        "K_minus_1": res.K - 1.0,
        "weighted_norm": res.norm,
        "leading_schmidt_coefficients": [float(v) for v in res.lambdas[:8]],
        "n_points": grid.n_points,
    }
    _write_text(json.dumps(report, indent=2), args.out)
    return 0


def _cmd_validate(args) -> int:
    report = cross_validate_optima()
    _write_text(str(report), args.out)
    return 0 if report.passed else 2


def _figure_axis(name: str, n: int) -> SweepAxis:
    return SweepAxis(name, _FIGURE_RANGE[0], _FIGURE_RANGE[1], n, "log")


def _figure_panels(pump: PumpSpec, outputs: tuple[str, ...], n: int) -> dict[str, SweepSpec]:
    ring, gamma_c = algaas_example()
    return {
        "a": SweepSpec(
            geometry=Geometry.ALL_PASS_IDENTICAL,
            axis1=_figure_axis("gamma_a", n), axis2=None,
            outputs=outputs, ring=ring, pump=pump, gamma_c=gamma_c,
        ),
        "b": SweepSpec(
            geometry=Geometry.ADD_DROP_IDENTICAL,
            axis1=_figure_axis("gamma_a", n), axis2=_figure_axis("gamma_b", n),
            outputs=outputs, ring=ring, pump=pump, gamma_c=gamma_c,
        ),
        "c": SweepSpec(
            geometry=Geometry.ADD_DROP_DISTINCT,
            axis1=_figure_axis("tgamma_a", n), axis2=_figure_axis("gamma_b", n),
            outputs=outputs, ring=ring, pump=pump, gamma_c=gamma_c,
        ),
    }


def _run_figure(args, pump: PumpSpec, outputs: tuple[str, ...], prefix: str,
                schmidt_panel: bool) -> int:
    n = args.grid or 200
    fmt = args.format or "json"
    panels = _figure_panels(pump, outputs, n)
    stem = args.out or prefix
    written = []
    for label, spec in panels.items():
        result = run_sweep(spec, threads=args.threads, refine=args.refine)
        path = f"{stem}_{label}.{fmt}"
        emit(result, fmt, path)
        written.append(path)
    if schmidt_panel:
        spec = _figure_panels(pump, ("K",), min(n, _FIGURE_K_GRID))["c"]
        result = run_sweep(spec, threads=args.threads, refine=False)
        path = f"{stem}_c_schmidt.{fmt}"
        emit(result, fmt, path)
        written.append(path)
    sys.stdout.write("\n".join(written) + "\n")
    return 0


def _cmd_figure2(args) -> int:
    if args.config is not None:
        cp = load_config(args.config)
        pump = pump_from_config(cp)
    else:
        pump = PumpSpec.cw(10e-6)
    return _run_figure(args, pump, ("Rs", "Rsi"), "figure2", schmidt_panel=False)


def _cmd_figure3(args) -> int:
    if args.config is not None:
        cp = load_config(args.config)
        pump = pump_from_config(cp)
    else:
        pump = PumpSpec.pulsed(1e-12, bandwidth_factor=10.0)
    return _run_figure(args, pump, ("ps", "psi"), "figure3", schmidt_panel=True)


_COMPUTE_ERRORS = (
    OptimizationError,
    QuadratureError,
    DecompositionError,
    np.linalg.LinAlgError,
    ArithmeticError,
    RuntimeError,
)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _CliValidationError as exc:
        print(f"ringsfwm: error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"ringsfwm: validation error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"ringsfwm: I/O error: {exc}", file=sys.stderr)
        return 3
    except _COMPUTE_ERRORS as exc:
        print(f"ringsfwm: computation failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
