"""Closed-form observables for a CW-pumped microring photon-pair source.

With pump strength ``D = n2*vg^2*omega0*P/(c*S*L)`` and total linewidths
``gamma`` (biphoton) and ``tgamma`` (pump), the stationary rates are

* one-photon rate     ``Rs = Ri = 32 * tgamma_a^2*gamma_mu / (tgamma^4*gamma^2) * D^2``
* biphoton wavepacket ``psi(tau) = 4 * tgamma_a*gamma_mu / (tgamma^2*gamma) * D * exp(-gamma*|tau|/2)``
* pair rate           ``Rsi = 32 * tgamma_a^2*gamma_mu^2 / (tgamma^4*gamma^3) * D^2``

where ``gamma_mu`` is the biphoton coupling into the collection port and
``tau = t_signal - t_idler``.  The identity ``Rsi = (gamma_mu/gamma) * Rs``
holds exactly: a pair is extracted iff the partner photon also escapes into
the same port.  Global unimodular phases are dropped throughout, so the
wavepacket is returned real and non-negative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .core import (
    CouplingConfig,
    RingParams,
    _drive_cw,
    _positive_finite,
    _UNIT_RING,
)

__all__ = [
    "CwObservables",
    "cw_single_rate",
    "cw_pair_rate",
    "cw_wavepacket",
    "cw_observables",
    "cw_pump_buildup",
    "cw_accidentals_and_car",
    "tolerance_band",
]


@dataclass(frozen=True)
class CwObservables:
    """One-photon rates, pair rate, and heralding efficiency for one design."""

    Rs: float
    Ri: float
    Rsi: float
    heralding_efficiency: float

    def __post_init__(self) -> None:
        if self.Rs != self.Ri:
            raise ValueError("CwObservables requires Rs == Ri")
        if not 0.0 <= self.Rsi <= self.Rs:
            raise ValueError(
                f"CwObservables requires 0 <= Rsi <= Rs, got Rsi={self.Rsi!r}, Rs={self.Rs!r}"
            )
        if not 0.0 <= self.heralding_efficiency <= 1.0:
            raise ValueError(
                f"CwObservables requires heralding efficiency in [0, 1], got {self.heralding_efficiency!r}"
            )


def cw_single_rate(ring: RingParams, cfg: CouplingConfig, power: float) -> float:
    """One-photon (singles) rate Rs = Ri [1/s] extracted at the collection port."""
    d = _drive_cw(ring, power)
    return 32.0 * cfg.tgamma_a**2 * cfg.gamma_mu / (cfg.tgamma**4 * cfg.gamma**2) * d * d


def cw_pair_rate(ring: RingParams, cfg: CouplingConfig, power: float) -> float:
    """Photon-pair rate Rsi [1/s]: both photons exit the collection port."""
    d = _drive_cw(ring, power)
    return 32.0 * cfg.tgamma_a**2 * cfg.gamma_mu**2 / (cfg.tgamma**4 * cfg.gamma**3) * d * d


def cw_wavepacket(ring: RingParams, cfg: CouplingConfig, power: float, tau):
    """Biphoton wavepacket amplitude psi(tau) [1/s] at delay tau = t_s - t_i.

    Real and non-negative (global phase dropped); accepts scalar or array tau.
    """
    d = _drive_cw(ring, power)
    peak = 4.0 * cfg.tgamma_a * cfg.gamma_mu / (cfg.tgamma**2 * cfg.gamma) * d
    tau_arr = np.asarray(tau, dtype=float)
    out = peak * np.exp(-cfg.gamma * np.abs(tau_arr) / 2.0)
    if np.isscalar(tau) or tau_arr.ndim == 0:
        return float(out)
    return out


def cw_observables(ring: RingParams, cfg: CouplingConfig, power: float) -> CwObservables:
    rs = cw_single_rate(ring, cfg, power)
    return CwObservables(
        Rs=rs,
        Ri=rs,
        Rsi=cw_pair_rate(ring, cfg, power),
        heralding_efficiency=cfg.heralding_efficiency,
    )


def cw_pump_buildup(cfg: CouplingConfig, detuning: float = 0.0) -> float:
    """Normalized intracavity pump buildup at offset ``detuning`` [rad/s].

    Returns ``4*tgamma_a*gamma_c / (tgamma^2 + 4*detuning^2)``, the
    coupling-dependent factor of the intracavity pump flux, scaled by
    ``gamma_c`` so the on-resonance critically coupled single-bus ring
    (``tgamma_a = gamma_c``, ``tgamma_b = 0``) gives exactly 1.  At fixed
    detuning the buildup peaks at
    ``tgamma_a = sqrt((tgamma_b + tgamma_c)^2 + 4*detuning^2)``.
    """
    return 4.0 * cfg.tgamma_a * cfg.gamma_c / (cfg.tgamma**2 + 4.0 * detuning**2)


def cw_accidentals_and_car(
    ring: RingParams, cfg: CouplingConfig, power: float, coincidence_window: float
) -> tuple[float, float]:
    """Accidental-coincidence rate and coincidence-to-accidental ratio.

    ``R_acc = T_R * Rs * Ri`` for coincidence window ``T_R`` [s], and
    ``CAR = Rsi / R_acc``.  Raises :class:`ValueError` when the singles rate
    vanishes (CAR undefined).
    """
    coincidence_window = _positive_finite(
        "cw_accidentals_and_car", "coincidence_window", coincidence_window
    )
    rs = cw_single_rate(ring, cfg, power)
    r_acc = coincidence_window * rs * rs
    if r_acc == 0.0:
        raise ValueError("CAR is undefined: the one-photon rate is zero for this design")
    return r_acc, cw_pair_rate(ring, cfg, power) / r_acc


def _normalized_allpass_rates(gamma_a: float) -> tuple[float, float]:
    """All-pass (Rs/R0, Rsi/R0) at coupling gamma_a in units of gamma_c."""
    cfg = CouplingConfig.all_pass(gamma_a, 1.0)
    return (
        cw_single_rate(_UNIT_RING, cfg, 1.0),
        cw_pair_rate(_UNIT_RING, cfg, 1.0),
    )


def tolerance_band(
    frac: float = 0.5, search_range: tuple[float, float] = (1e-3, 1e3)
) -> tuple[float, float]:
    """Coupling interval over which an all-pass ring keeps BOTH CW rates high.

    Returns ``(lo, hi)`` in units of ``gamma_c``: the set of ``gamma_a`` where
    the one-photon rate stays at or above ``frac`` of its own peak AND the
    pair rate stays at or above ``frac`` of its own peak.  Useful for judging
    fabrication tolerance of the coupling gap.
    """
    if not 0.0 < frac < 1.0:
        raise ValueError(f"tolerance_band requires 0 < frac < 1, got {frac!r}")
    lo_g, hi_g = search_range
    band_lo = lo_g
    band_hi = hi_g
    for which in (0, 1):
        rate = lambda g: _normalized_allpass_rates(g)[which]  # noqa: E731
        res = minimize_scalar(
            lambda g: -rate(g), bounds=(lo_g, hi_g), method="bounded",
            options={"xatol": 1e-12},
        )
        g_peak = res.x
        level = rate(g_peak) * frac
        left = brentq(lambda g: rate(g) - level, lo_g, g_peak, xtol=1e-13, rtol=1e-14)
        right = brentq(lambda g: rate(g) - level, g_peak, hi_g, xtol=1e-12, rtol=1e-14)
        band_lo = max(band_lo, left)
        band_hi = min(band_hi, right)
    return (band_lo, band_hi)
