"""Observables for a pulse-pumped microring photon-pair source.

Broadband closed forms
----------------------
For a flattop pump spectrum much wider than the pump resonance
(``delta_omega >> tgamma``) the effective two-pump lineshape collapses to a
single Lorentzian,

    ``f_p(w) = (2*pi/delta_omega) / (tgamma - i*w)``,   w = Omega_s + Omega_i,

and the joint temporal amplitude has the closed form (``u`` = unit step,
``Y = 2*pi*n2*vg^2*omega0*E / (c*S*L*delta_omega)``):

    ``psi(ts, ti) = tgamma_a*gamma_mu/(tgamma - gamma) * Y
                    * exp(-gamma*(ts+ti)/2) * [1 - exp(-(tgamma-gamma)*min(ts,ti))]
                    * u(ts) * u(ti)``.

Its squared norm gives the per-pulse pair probability

    ``p_si = tgamma_a^2*gamma_mu^2 / (tgamma*gamma^2*(tgamma+gamma)) * Y^2``

and the per-pulse singles probability is

    ``p_s = p_i = tgamma_a^2*gamma_mu / (tgamma*gamma*(tgamma+gamma)) * Y^2``,

again with ``p_si = (gamma_mu/gamma) * p_s`` exactly.  When the pump and
biphoton linewidths coincide the quotient degenerates to
``min(ts, ti)`` (handled automatically below).

Arbitrary spectra
-----------------
For tabulated pump spectra the lineshape integral and the per-pulse singles
probability are evaluated by adaptive quadrature
(:func:`effective_pump_lineshape`, :func:`pulsed_single_prob_numeric`).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .core import (
    TWO_PI,
    BroadbandAssumptionWarning,
    C_VACUUM,
    CouplingConfig,
    RingParams,
    _positive_finite,
)

__all__ = [
    "EPS_DEGENERATE",
    "PulsedMethod",
    "PulsedObservables",
    "QuadratureError",
    "TabulatedSpectrum",
    "effective_pump_lineshape",
    "flattop_lineshape_broadband",
    "load_spectrum",
    "save_spectrum",
    "pulsed_wavepacket",
    "pulsed_single_prob",
    "pulsed_pair_prob",
    "pulsed_observables",
    "pulsed_accidental_prob",
    "pulsed_single_prob_numeric",
]

# Relative pump/biphoton linewidth split below which the degenerate-limit
# wavepacket (bracket -> min(ts, ti)) replaces the generic quotient.
EPS_DEGENERATE = 1e-6

# Adaptive-quadrature subdivision budget per axis.
_SUBDIV_LIMIT = 10_000


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge within its subdivision budget."""


class PulsedMethod(enum.Enum):
    BROADBAND_CLOSED_FORM = "broadband-closed-form"
    NUMERIC_QUADRATURE = "numeric-quadrature"


@dataclass(frozen=True)
class PulsedObservables:
    """Per-pulse one- and two-photon extraction probabilities."""

    ps: float
    pi: float
    psi_pair: float
    method: PulsedMethod

    def __post_init__(self) -> None:
        if self.ps != self.pi:
            raise ValueError("PulsedObservables requires ps == pi")
        if not 0.0 <= self.psi_pair <= self.ps <= 1.0:
            raise ValueError(
                "PulsedObservables requires 0 <= psi_pair <= ps <= 1, got "
                f"psi_pair={self.psi_pair!r}, ps={self.ps!r}"
            )
        if self.ps > 0.1:
            warnings.warn(
                f"per-pulse probability ps = {self.ps:.3g} > 0.1: the "
                "single-pair (perturbative) assumption is strained",
                UserWarning,
                stacklevel=2,
            )


@dataclass(frozen=True, eq=False)
class TabulatedSpectrum:
    """Sampled pump spectral amplitude A_p(Omega) on a frequency grid.

    ``omega`` is relative to the pump carrier [rad/s], strictly increasing;
    ``amplitude`` is complex with units (rad/s)^(-1/2).  The spectrum must be
    normalized, ``integral |A_p|^2 dOmega = 1`` (trapezoid rule on the given
    grid, relative tolerance 1e-9); an identically zero amplitude is also
    accepted and represents a switched-off pump.  Values between samples are
    linearly interpolated and zero outside the grid.
    """

    omega: np.ndarray
    amplitude: np.ndarray

    def __post_init__(self) -> None:
        omega = np.asarray(self.omega, dtype=float)
        amplitude = np.asarray(self.amplitude, dtype=complex)
        if omega.ndim != 1 or omega.size < 2:
            raise ValueError("TabulatedSpectrum requires a 1-D grid of >= 2 frequencies")
        if amplitude.shape != omega.shape:
            raise ValueError(
                f"TabulatedSpectrum grid/amplitude shape mismatch: {omega.shape} vs {amplitude.shape}"
            )
        if not np.all(np.isfinite(omega)) or not np.all(np.isfinite(amplitude)):
            raise ValueError("TabulatedSpectrum requires finite samples")
        if not np.all(np.diff(omega) > 0.0):
            raise ValueError("TabulatedSpectrum omega grid must be strictly increasing")
        norm = float(np.trapezoid(np.abs(amplitude) ** 2, omega))
        if norm != 0.0 and abs(norm - 1.0) > 1e-9:
            raise ValueError(
                f"TabulatedSpectrum must satisfy integral |A_p|^2 dOmega = 1, got {norm!r}"
            )
        omega.setflags(write=False)
        amplitude.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "amplitude", amplitude)

    @property
    def support(self) -> tuple[float, float]:
        return (float(self.omega[0]), float(self.omega[-1]))

    def __call__(self, omega):
        """Linearly interpolated complex amplitude, zero outside the grid."""
        re = np.interp(omega, self.omega, self.amplitude.real, left=0.0, right=0.0)
        im = np.interp(omega, self.omega, self.amplitude.imag, left=0.0, right=0.0)
        return re + 1j * im

    @classmethod
    def flattop(cls, delta_omega: float, n_samples: int = 2001) -> "TabulatedSpectrum":
        """Constant amplitude 1/sqrt(delta_omega) on [-delta_omega/2, +delta_omega/2]."""
        delta_omega = _positive_finite("TabulatedSpectrum", "delta_omega", delta_omega)
        grid = np.linspace(-delta_omega / 2.0, delta_omega / 2.0, int(n_samples))
        amp = np.full(grid.shape, 1.0 / math.sqrt(delta_omega), dtype=complex)
        return cls(grid, amp)


def save_spectrum(spectrum: TabulatedSpectrum, path) -> None:
    """Write a spectrum as three numeric columns: Omega [rad/s], Re A_p, Im A_p."""
    data = np.column_stack(
        [spectrum.omega, spectrum.amplitude.real, spectrum.amplitude.imag]
    )
    np.savetxt(
        path,
        data,
        header="pump spectral amplitude samples\ncolumns: omega_rad_per_s  re_amplitude  im_amplitude",
        fmt="%.17g",
    )


def load_spectrum(path) -> TabulatedSpectrum:
    """Read a spectrum written by :func:`save_spectrum` ('#' lines are comments)."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 3:
        raise ValueError(
            f"spectrum file {path!s} must have 3 numeric columns (omega, re, im), "
            f"got {data.shape[1]}"
        )
    return TabulatedSpectrum(data[:, 0], data[:, 1] + 1j * data[:, 2])


def _quad_complex(f, a: float, b: float, points=None, epsrel: float = 1e-9) -> complex:
    """Adaptive quadrature of a complex integrand over [a, b].

    The absolute floor is keyed to a coarse probe of the integrand magnitude so
    that components that integrate to ~0 (e.g. the imaginary part of a
    Hermitian-symmetric integrand) do not stall the relative test.
    """
    probe = np.abs(f(np.linspace(a, b, 33)))
    scale = float(np.max(probe)) * (b - a)
    epsabs = max(scale * 1e-13, 1e-300)
    parts = []
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        for component in (np.real, np.imag):
            try:
                val, _ = quad(
                    lambda x: component(f(x)),
                    a,
                    b,
                    points=points,
                    limit=_SUBDIV_LIMIT,
                    epsabs=epsabs,
                    epsrel=epsrel,
                )
            except IntegrationWarning as exc:
                raise QuadratureError(
                    f"lineshape quadrature did not converge on [{a:g}, {b:g}]: {exc}"
                ) from exc
            parts.append(val)
    return complex(parts[0], parts[1])


def effective_pump_lineshape(
    spectrum: TabulatedSpectrum, tgamma: float, omega_sum: float, epsrel: float = 1e-9
) -> complex:
    """Two-pump effective lineshape f_p(omega_sum) for a tabulated spectrum.

    Evaluates the convolution-style integral over pump offsets Omega_p of

        ``A_p(Omega_p) * A_p(omega_sum - Omega_p)
          / ((tgamma/2 - i*Omega_p) * (tgamma/2 - i*(omega_sum - Omega_p)))``

    by adaptive quadrature (relative target 1e-8).  The integrand has compact
    support because the tabulated amplitude vanishes outside its grid.
    """
    tgamma = _positive_finite("effective_pump_lineshape", "tgamma", tgamma)
    lo, hi = spectrum.support
    a = max(lo, omega_sum - hi)
    b = min(hi, omega_sum - lo)
    if b <= a:
        return 0.0 + 0.0j

    def integrand(x):
        return (
            spectrum(x)
            * spectrum(omega_sum - x)
            / ((tgamma / 2.0 - 1j * x) * (tgamma / 2.0 - 1j * (omega_sum - x)))
        )

    interior = [p for p in (lo, hi, omega_sum - lo, omega_sum - hi, 0.0, omega_sum) if a < p < b]
    return _quad_complex(integrand, a, b, points=sorted(set(interior)) or None, epsrel=epsrel)


def _require_broadband(tgamma: float, delta_omega: float) -> None:
    if not delta_omega >= 5.0 * tgamma:
        raise ValueError(
            f"broadband forms require delta_omega >= 5*tgamma, got "
            f"delta_omega/tgamma = {delta_omega / tgamma:.3g}"
        )
    if delta_omega < 10.0 * tgamma:
        warnings.warn(
            f"delta_omega = {delta_omega / tgamma:.3g}*tgamma < 10*tgamma: "
            "broadband closed forms are marginal here",
            BroadbandAssumptionWarning,
            stacklevel=3,
        )


def flattop_lineshape_broadband(
    tgamma: float, delta_omega: float, omega_sum
) -> complex:
    """Broadband-limit lineshape ``(2*pi/delta_omega) / (tgamma - i*omega_sum)``.

    Valid for a flattop pump much broader than the pump resonance; rejects
    ``delta_omega < 5*tgamma`` and warns below ``10*tgamma``.
    """
    tgamma = _positive_finite("flattop_lineshape_broadband", "tgamma", tgamma)
    delta_omega = _positive_finite("flattop_lineshape_broadband", "delta_omega", delta_omega)
    _require_broadband(tgamma, delta_omega)
    return (TWO_PI / delta_omega) / (tgamma - 1j * np.asarray(omega_sum))


def _drive_pulsed(ring: RingParams, energy: float, delta_omega: float) -> float:
    """Pulse strength 2*pi*n2*vg^2*omega0*E/(c*S*L*delta_omega) [1/s]."""
    return (
        TWO_PI * ring.n2 * ring.vg**2 * ring.omega0 * energy
        / (C_VACUUM * ring.area * ring.circumference * delta_omega)
    )


def pulsed_wavepacket(
    ring: RingParams,
    cfg: CouplingConfig,
    energy: float,
    delta_omega: float,
    t_signal,
    t_idler,
):
    """Joint temporal amplitude psi(t_s, t_i) [1/s] for a broadband flattop pump.

    Vanishes for negative times (the broadband pump acts like a delta kick at
    t = 0), is symmetric under exchange of the two times, and is returned real
    and non-negative.  Scalar or broadcastable array times are accepted.
    """
    _require_broadband(cfg.tgamma, delta_omega)
    y = _drive_pulsed(ring, energy, delta_omega)
    gamma, tgamma = cfg.gamma, cfg.tgamma
    ts = np.asarray(t_signal, dtype=float)
    ti = np.asarray(t_idler, dtype=float)
    causal = (ts >= 0.0) & (ti >= 0.0)
    # Clip to the causal quadrant before exponentiating so that out-of-domain
    # points cannot overflow; they are zeroed below anyway.
    m = np.maximum(np.minimum(ts, ti), 0.0)
    log_env = -gamma * np.clip(ts + ti, 0.0, None) / 2.0
    split = tgamma - gamma
    if abs(split) < EPS_DEGENERATE * gamma:
        core = np.exp(log_env) * m
    else:
        # envelope*(1 - exp(-split*m))/split, assembled so that neither
        # exponent can overflow: log_env <= 0, and log_env - split*m <= 0 too
        # (for split < 0, |split| = gamma - tgamma < gamma while
        # m <= (ts + ti)/2; for split > 0 the term only gets more negative).
        u = split * m
        protected = np.abs(u) <= 1.0  # expm1 path where cancellation matters
        core_near = np.exp(log_env) * (-np.expm1(-np.where(protected, u, 0.0)))
        core_far = np.exp(log_env) - np.exp(log_env - np.where(protected, 0.0, u))
        core = np.where(protected, core_near, core_far) / split
    out = cfg.tgamma_a * cfg.gamma_mu * y * core
    out = np.where(causal, out, 0.0)
    if np.ndim(out) == 0:
        return float(out)
    return out


def pulsed_single_prob(
    ring: RingParams, cfg: CouplingConfig, energy: float, delta_omega: float
) -> float:
    """Per-pulse one-photon extraction probability (broadband closed form)."""
    _require_broadband(cfg.tgamma, delta_omega)
    y = _drive_pulsed(ring, energy, delta_omega)
    g, tg = cfg.gamma, cfg.tgamma
    return cfg.tgamma_a**2 * cfg.gamma_mu / (tg * g * (tg + g)) * y * y


def pulsed_pair_prob(
    ring: RingParams, cfg: CouplingConfig, energy: float, delta_omega: float
) -> float:
    """Per-pulse pair extraction probability (broadband closed form)."""
    _require_broadband(cfg.tgamma, delta_omega)
    y = _drive_pulsed(ring, energy, delta_omega)
    g, tg = cfg.gamma, cfg.tgamma
    return cfg.tgamma_a**2 * cfg.gamma_mu**2 / (tg * g * g * (tg + g)) * y * y


def pulsed_observables(
    ring: RingParams, cfg: CouplingConfig, energy: float, delta_omega: float
) -> PulsedObservables:
    ps = pulsed_single_prob(ring, cfg, energy, delta_omega)
    return PulsedObservables(
        ps=ps,
        pi=ps,
        psi_pair=pulsed_pair_prob(ring, cfg, energy, delta_omega),
        method=PulsedMethod.BROADBAND_CLOSED_FORM,
    )


def pulsed_accidental_prob(
    ring: RingParams, cfg: CouplingConfig, energy: float, delta_omega: float
) -> float:
    """Per-pulse accidental-coincidence probability p_acc = p_s * p_i."""
    ps = pulsed_single_prob(ring, cfg, energy, delta_omega)
    return ps * ps


def pulsed_single_prob_numeric(
    ring: RingParams,
    cfg: CouplingConfig,
    energy: float,
    spectrum: TabulatedSpectrum,
    epsrel: float = 1e-6,
) -> float:
    """Per-pulse one-photon probability for an arbitrary tabulated pump spectrum.

    Evaluates the double spectral integral of ``|f_p(Omega_s + Omega_i)|^2``
    against the two biphoton Lorentzians, using the change of variables
    ``w = Omega_s + Omega_i`` so the lineshape is evaluated once per outer
    node:

        outer over w (finite support of f_p)
        inner over Omega_s of 1 / ((gamma^2/4 + Omega_s^2) * (gamma^2/4 + (w - Omega_s)^2))

    Relative accuracy target 1e-5.  Raises :class:`QuadratureError` when the
    adaptive rule does not converge within its subdivision budget.
    """
    energy = _positive_finite("pulsed_single_prob_numeric", "energy", energy)
    if np.all(spectrum.amplitude == 0.0):
        return 0.0
    gamma = cfg.gamma
    tgamma = cfg.tgamma
    quarter = gamma * gamma / 4.0
    # Nested rules only need to out-resolve the outer target.
    eps_nested = max(min(epsrel * 1e-2, 1e-4), 1e-9)

    def s_of(x: float) -> float:
        # Inverse of the rational map x = gamma*s/(1-s^2) on s in (-1, 1).
        if x == 0.0:
            return 0.0
        return (-gamma + math.hypot(gamma, 2.0 * x)) / (2.0 * x)

    def inner(w: float) -> float:
        # Two Lorentzians peaked at 0 and w; the rational map turns the
        # infinite range into (-1, 1) with the slow x^-4 tails integrated
        # exactly in the endpoint limit.
        def g(s: float) -> float:
            one = 1.0 - s * s
            x = gamma * s / one
            jac = gamma * (1.0 + s * s) / (one * one)
            return jac / ((quarter + x * x) * (quarter + (w - x) ** 2))

        pts = [p for p in sorted({0.0, s_of(w)}) if -1.0 < p < 1.0]
        val, _ = quad(
            g, -1.0, 1.0, points=pts, limit=_SUBDIV_LIMIT, epsabs=0.0, epsrel=eps_nested
        )
        return val

    def outer_integrand(w: float) -> float:
        fp = effective_pump_lineshape(spectrum, tgamma, w, epsrel=eps_nested)
        if fp == 0.0:
            return 0.0
        return (fp.real**2 + fp.imag**2) * inner(w)

    lo, hi = spectrum.support
    w_lo, w_hi = 2.0 * lo, 2.0 * hi
    # Breakpoint ladder resolving the Lorentzian-like core of |f_p|^2 without
    # forcing fine panels across the whole (wide) support.
    ladder = [k * tgamma for k in (1.0, 3.0, 10.0, 30.0, 100.0)]
    pts = [p for p in [0.0, *ladder, *(-q for q in ladder)] if w_lo < p < w_hi]
    pts.sort()
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            kernel, _ = quad(
                outer_integrand,
                w_lo,
                w_hi,
                points=pts or None,
                limit=_SUBDIV_LIMIT,
                epsabs=0.0,
                epsrel=epsrel,
            )
        except IntegrationWarning as exc:
            raise QuadratureError(
                f"singles-probability quadrature did not converge: {exc}"
            ) from exc

    drive = (
        ring.n2 * ring.vg**2 * ring.omega0 * energy
        / (C_VACUUM * ring.area * ring.circumference)
    )
    prefactor = cfg.tgamma_a**2 * cfg.gamma_mu * gamma / (4.0 * math.pi**2) * drive * drive
    return prefactor * kernel
