"""Pulsed-pump lineshapes, wavepacket, and per-pulse probabilities."""

import math

import mpmath as mp
import numpy as np
import pytest

from ringsfwm import (
    BroadbandAssumptionWarning,
    CouplingConfig,
    TabulatedSpectrum,
    effective_pump_lineshape,
    flattop_lineshape_broadband,
    load_spectrum,
    prob_scale_p0,
    pulsed_accidental_prob,
    pulsed_observables,
    pulsed_pair_prob,
    pulsed_single_prob,
    pulsed_single_prob_numeric,
    pulsed_wavepacket,
    save_spectrum,
)
from ringsfwm.core import _UNIT_RING
from ringsfwm.pulsed import EPS_DEGENERATE

from conftest import pulsed_pair_prob_quadrature, random_coupling

ENERGY = 1e-12
B = 10.0


class TestTabulatedSpectrum:
    def test_rejects_unnormalized(self):
        grid = np.linspace(-1.0, 1.0, 64)
        amp = np.full(64, 1.01 / np.sqrt(2.0), dtype=complex)
        with pytest.raises(ValueError, match="dOmega = 1"):
            TabulatedSpectrum(grid, amp)

    def test_zero_amplitude_allowed(self):
        spec = TabulatedSpectrum(np.linspace(-1.0, 1.0, 16), np.zeros(16, complex))
        assert np.all(spec.amplitude == 0.0)

    def test_rejects_nonmonotonic_grid(self):
        grid = np.array([0.0, 1.0, 0.5])
        with pytest.raises(ValueError, match="increasing"):
            TabulatedSpectrum(grid, np.full(3, 1.0, dtype=complex))

    def test_file_round_trip(self, tmp_path):
        spec = TabulatedSpectrum.flattop(3.7e9, n_samples=257)
        path = tmp_path / "spectrum.txt"
        save_spectrum(spec, path)
        text = path.read_text()
        assert text.lstrip().startswith("#")
        back = load_spectrum(path)
        np.testing.assert_array_equal(back.omega, spec.omega)
        np.testing.assert_array_equal(back.amplitude, spec.amplitude)

    def test_interpolation_compact_support(self):
        spec = TabulatedSpectrum.flattop(2.0)
        assert spec(5.0) == 0.0
        assert spec(0.3) == pytest.approx(1.0 / np.sqrt(2.0), rel=1e-12)


class TestBroadbandLineshape:
    def test_on_axis_value_real(self):
        tg, dw = 2.0e9, 40.0e9
        fp = flattop_lineshape_broadband(tg, dw, 0.0)
        assert fp.imag == 0.0
        assert fp.real == pytest.approx(2.0 * np.pi / (dw * tg), rel=1e-12)

    def test_modulus_even(self):
        tg, dw = 1.7e9, 30.0e9
        w = np.linspace(0.1, 20.0, 13) * tg
        np.testing.assert_allclose(
            np.abs(flattop_lineshape_broadband(tg, dw, w)),
            np.abs(flattop_lineshape_broadband(tg, dw, -w)),
            rtol=1e-15,
        )

    def test_half_width(self):
        tg, dw = 1.0e9, 50.0e9
        f0 = abs(flattop_lineshape_broadband(tg, dw, 0.0))
        fh = abs(flattop_lineshape_broadband(tg, dw, math.sqrt(3.0) * tg))
        assert fh == pytest.approx(f0 / 2.0, rel=1e-12)

    def test_validity_guards(self):
        with pytest.raises(ValueError, match="5"):
            flattop_lineshape_broadband(1.0e9, 0.5e9, 0.0)
        with pytest.raises(ValueError):
            flattop_lineshape_broadband(1.0e9, 4.9e9, 0.0)
        with pytest.warns(BroadbandAssumptionWarning):
            flattop_lineshape_broadband(1.0e9, 7.0e9, 0.0)


class TestEffectivePumpLineshape:
    def test_wideband_flattop_matches_closed_forms(self):
        """Finite-support value is (4/(dw*tg))*atan(dw/tg); the broadband
        Lorentzian limit is approached with a 2/(pi*B) deficit."""
        tg = 2.0e9
        bw_factor = 100.0
        dw = bw_factor * tg
        fp = effective_pump_lineshape(TabulatedSpectrum.flattop(dw), tg, 0.0)
        exact = 4.0 / (dw * tg) * math.atan(bw_factor)
        assert fp.imag == pytest.approx(0.0, abs=abs(fp) * 1e-10)
        assert fp.real == pytest.approx(exact, rel=1e-8)
        broadband = 2.0 * np.pi / (dw * tg)
        deficit = (broadband - fp.real) / broadband
        assert deficit == pytest.approx(2.0 / (np.pi * bw_factor), rel=0.02)
        assert abs(fp.real - broadband) / broadband < 1e-2

    def test_hermitian_symmetry_real_spectrum(self):
        tg = 1.3e9
        spec = TabulatedSpectrum.flattop(20.0 * tg)
        for w in (0.0, 0.8 * tg, 5.0 * tg):
            f_plus = effective_pump_lineshape(spec, tg, w)
            f_minus = effective_pump_lineshape(spec, tg, -w)
            assert f_plus == pytest.approx(np.conj(f_minus), rel=1e-10)

    def test_narrowband_against_riemann_oracle(self):
        tg = 2.0e9
        dw = tg / 100.0
        fp = effective_pump_lineshape(TabulatedSpectrum.flattop(dw), tg, 0.0)
        x = np.linspace(-dw / 2.0, dw / 2.0, 1_000_001)
        integrand = (1.0 / dw) / ((tg / 2.0 - 1j * x) * (tg / 2.0 + 1j * x))
        oracle = np.trapezoid(integrand, x)
        assert fp == pytest.approx(complex(oracle), rel=1e-8)

    def test_disjoint_support_is_zero(self):
        spec = TabulatedSpectrum.flattop(2.0e9)
        assert effective_pump_lineshape(spec, 1.0e9, 10.0e9) == 0.0


class TestPulsedWavepacket:
    def _dw(self, cfg):
        return B * cfg.tgamma

    def test_causality(self, algaas):
        ring, gc = algaas
        cfg = CouplingConfig.all_pass(gc, gc)
        dw = self._dw(cfg)
        t = 1.0 / cfg.gamma
        assert pulsed_wavepacket(ring, cfg, ENERGY, dw, -t, t) == 0.0
        assert pulsed_wavepacket(ring, cfg, ENERGY, dw, t, -t) == 0.0
        assert pulsed_wavepacket(ring, cfg, ENERGY, dw, -t, -t) == 0.0
        assert pulsed_wavepacket(ring, cfg, ENERGY, dw, t, t) > 0.0

    def test_exchange_symmetry(self, algaas, rng):
        ring, gc = algaas
        for _ in range(5):
            cfg = random_coupling(rng, gamma_c=gc)
            dw = self._dw(cfg)
            ts = rng.uniform(0.0, 10.0, size=9) / cfg.gamma
            ti = rng.uniform(0.0, 10.0, size=9) / cfg.gamma
            np.testing.assert_array_equal(
                pulsed_wavepacket(ring, cfg, ENERGY, dw, ts, ti),
                pulsed_wavepacket(ring, cfg, ENERGY, dw, ti, ts),
            )

    def test_degenerate_branch_matches_series_oracle(self, algaas):
        """Pump linewidth one part in 1e9 above the biphoton linewidth:
        compare against an arbitrary-precision evaluation of the generic
        quotient."""
        ring, gc = algaas
        # distinct geometry with tgamma_a == gamma_b, so tgamma - gamma is set
        # purely by the loss split
        cfg_split = CouplingConfig.distinct(
            1.1 * gc, 1.1 * gc, gc, tgamma_c=gc + 1e-9 * (1.1 * gc + gc)
        )
        assert abs(cfg_split.tgamma - cfg_split.gamma) == pytest.approx(
            1e-9 * cfg_split.gamma, rel=1e-6
        )
        dw = self._dw(cfg_split)
        mp.mp.dps = 50
        for t_s, t_i in ((0.3, 0.9), (2.0, 1.0), (5.0, 5.0)):
            ts, ti = t_s / cfg_split.gamma, t_i / cfg_split.gamma
            got = pulsed_wavepacket(ring, cfg_split, ENERGY, dw, ts, ti)
            x = mp.mpf(cfg_split.tgamma) - mp.mpf(cfg_split.gamma)
            m = mp.mpf(min(ts, ti))
            bracket = (1 - mp.e**(-x * m)) / x
            envelope = mp.e**(-mp.mpf(cfg_split.gamma) * (mp.mpf(ts) + mp.mpf(ti)) / 2)
            drive = (
                2 * mp.pi * mp.mpf(ring.n2) * mp.mpf(ring.vg) ** 2 * mp.mpf(ring.omega0)
                * mp.mpf(ENERGY)
                / (mp.mpf("299792458") * mp.mpf(ring.area) * mp.mpf(ring.circumference)
                   * mp.mpf(dw))
            )
            oracle = float(
                mp.mpf(cfg_split.tgamma_a) * mp.mpf(cfg_split.gamma_mu)
                * drive * envelope * bracket
            )
            assert got == pytest.approx(oracle, rel=1e-6)

    def test_finite_at_extreme_times_with_narrow_pump(self, algaas):
        """With tgamma < gamma the quotient involves a growing exponential;
        far-out times must still underflow cleanly to zero, not NaN."""
        ring, gc = algaas
        cfg = CouplingConfig.distinct(0.3 * gc, 4.0 * gc, gc)  # tgamma << gamma
        assert cfg.tgamma < cfg.gamma
        dw = 20.0 * cfg.tgamma
        t_far = 5000.0 / cfg.gamma
        val = pulsed_wavepacket(ring, cfg, ENERGY, dw, t_far, t_far)
        assert val == 0.0
        grid = pulsed_wavepacket(
            ring, cfg, ENERGY, dw,
            np.array([0.1, 10.0, 5000.0]) / cfg.gamma,
            np.array([0.2, 5000.0, 5000.0]) / cfg.gamma,
        )
        assert np.all(np.isfinite(grid))

    def test_continuous_across_degenerate_switch(self, algaas):
        """Values just outside the two sides of the degenerate-limit switch
        agree; probed at early times where the genuine linewidth dependence
        is below the switch tolerance."""
        ring, gc = algaas
        t = (0.3, 0.45)
        dw = 20.0 * 2.0 * gc  # same absolute bandwidth on both sides
        values = []
        for sign in (-1.0, 1.0):
            # tgamma = gamma * (1 +- 2*EPS_DEGENERATE)
            cfg = CouplingConfig.distinct(
                1.0 * gc, 1.0 * gc, gc,
                tgamma_c=gc + sign * 2.0 * EPS_DEGENERATE * 2.0 * gc,
            )
            values.append(
                pulsed_wavepacket(ring, cfg, ENERGY, dw, t[0] / cfg.gamma, t[1] / cfg.gamma)
            )
        assert values[0] == pytest.approx(values[1], rel=1e-6)


class TestClosedFormProbabilities:
    def test_allpass_pair_optimum(self, algaas):
        ring, gc = algaas
        p0 = prob_scale_p0(ring, ENERGY, B, gc)
        cfg = CouplingConfig.all_pass(2.0 * gc, gc)
        got = pulsed_pair_prob(ring, cfg, ENERGY, B * cfg.tgamma)
        assert got == pytest.approx(8.0 / 729.0 * p0, rel=1e-12)

    def test_adddrop_pair_optimum(self, algaas):
        ring, gc = algaas
        p0 = prob_scale_p0(ring, ENERGY, B, gc)
        cfg = CouplingConfig.add_drop(gc, gc, gc)
        got = pulsed_pair_prob(ring, cfg, ENERGY, B * cfg.tgamma)
        assert got == pytest.approx(1.0 / 1458.0 * p0, rel=1e-12)

    def test_allpass_singles_optimum(self, algaas):
        ring, gc = algaas
        p0 = prob_scale_p0(ring, ENERGY, B, gc)
        cfg = CouplingConfig.all_pass(1.5 * gc, gc)
        got = pulsed_single_prob(ring, cfg, ENERGY, B * cfg.tgamma)
        assert got == pytest.approx(54.0 / 3125.0 * p0, rel=1e-12)

    def test_adddrop_singles_optimum(self, algaas):
        ring, gc = algaas
        p0 = prob_scale_p0(ring, ENERGY, B, gc)
        cfg = CouplingConfig.add_drop(gc, 0.5 * gc, gc)
        got = pulsed_single_prob(ring, cfg, ENERGY, B * cfg.tgamma)
        assert got == pytest.approx(8.0 / 3125.0 * p0, rel=1e-12)

    def test_zero_output_coupling(self, algaas):
        ring, gc = algaas
        cfg = CouplingConfig.add_drop(gc, 0.0, gc)
        assert pulsed_pair_prob(ring, cfg, ENERGY, B * cfg.tgamma) == 0.0

    def test_pair_singles_identity_random(self, rng):
        for _ in range(300):
            cfg = random_coupling(rng, lo=0.05, hi=8.0)
            dw = 20.0 * cfg.tgamma
            ps = pulsed_single_prob(_UNIT_RING, cfg, 1e-3, dw)
            psi = pulsed_pair_prob(_UNIT_RING, cfg, 1e-3, dw)
            assert psi == pytest.approx(cfg.gamma_mu / cfg.gamma * ps, rel=5e-14)

    def test_quadrature_recovers_pair_prob(self, algaas, rng):
        ring, gc = algaas
        for _ in range(10):
            cfg = random_coupling(rng, gamma_c=gc)
            dw = 20.0 * cfg.tgamma
            oracle = pulsed_pair_prob_quadrature(ring, cfg, ENERGY, dw)
            assert pulsed_pair_prob(ring, cfg, ENERGY, dw) == pytest.approx(oracle, rel=1e-5)

    def test_observables_bundle_and_accidentals(self, algaas):
        ring, gc = algaas
        cfg = CouplingConfig.all_pass(1.5 * gc, gc)
        obs = pulsed_observables(ring, cfg, 0.1 * ENERGY, B * cfg.tgamma)
        assert obs.ps == obs.pi
        assert obs.psi_pair == pytest.approx(cfg.gamma_mu / cfg.gamma * obs.ps, rel=1e-13)
        assert pulsed_accidental_prob(ring, cfg, 0.1 * ENERGY, B * cfg.tgamma) == obs.ps * obs.pi

    def test_perturbative_warning(self, algaas):
        ring, gc = algaas
        cfg = CouplingConfig.all_pass(1.5 * gc, gc)
        with pytest.warns(UserWarning, match="single-pair"):
            pulsed_observables(ring, cfg, ENERGY, B * cfg.tgamma)  # ps ~ 0.23 here


class TestNumericSinglesProbability:
    def test_matches_closed_form_at_large_bandwidth(self, algaas):
        """Finite flattop support costs ~4/(pi*B) relative to the broadband
        closed form; at B = 50 that is ~2.5e-2."""
        ring, gc = algaas
        cfg = CouplingConfig.all_pass(1.5 * gc, gc)
        bw = 50.0
        spec = TabulatedSpectrum.flattop(bw * cfg.tgamma)
        numeric = pulsed_single_prob_numeric(ring, cfg, ENERGY, spec, epsrel=1e-4)
        closed = pulsed_single_prob(ring, cfg, ENERGY, bw * cfg.tgamma)
        deviation = abs(numeric - closed) / closed
        assert deviation < 3e-2
        assert deviation == pytest.approx(4.0 / (np.pi * bw), rel=0.05)

    def test_converges_to_closed_form(self, algaas):
        ring, gc = algaas
        cfg = CouplingConfig.all_pass(1.2 * gc, gc)
        errors = []
        for bw in (10.0, 30.0, 100.0, 300.0):
            spec = TabulatedSpectrum.flattop(bw * cfg.tgamma)
            numeric = pulsed_single_prob_numeric(ring, cfg, ENERGY, spec, epsrel=1e-4)
            closed = pulsed_single_prob(ring, cfg, ENERGY, bw * cfg.tgamma)
            errors.append(abs(numeric - closed) / closed)
        assert all(e2 < e1 for e1, e2 in zip(errors, errors[1:]))

    def test_zero_spectrum_gives_zero(self, algaas):
        ring, gc = algaas
        cfg = CouplingConfig.all_pass(gc, gc)
        spec = TabulatedSpectrum(np.linspace(-1e10, 1e10, 32), np.zeros(32, complex))
        assert pulsed_single_prob_numeric(ring, cfg, ENERGY, spec) == 0.0
