import math

import numpy as np
import pytest

from kljnsim.circuit import (
    Branch,
    MomentSummary,
    analytic_moments,
    conditional_zc_variance,
    equilibrium_spectra,
    measure_moments,
    resultants,
    wire_observables,
)
from kljnsim.noise import BOLTZMANN, NoiseSpec, NoiseTrace, synthesize


def traced(resistance, mean_square, samples, fs=16000.0):
    return Branch(resistance, mean_square, NoiseTrace(np.asarray(samples, float), fs))


class TestWireObservables:
    def test_constant_divider(self):
        alice = traced(1.0, 1.0, [1.0, 1.0, 1.0])
        bob = traced(1.0, 0.0, [0.0, 0.0, 0.0])
        wire = wire_observables(alice, bob)
        assert np.allclose(wire.u_c, 0.5)
        assert np.allclose(wire.i_c, 0.5)

    def test_coincidence_identity(self):
        # equal generator voltages mean zero current and U_c == U_A
        samples = [0.3, -1.2, 0.7]
        wire = wire_observables(traced(100.0, 1.0, samples), traced(250.0, 1.0, samples))
        assert np.all(wire.i_c == 0.0)
        assert np.allclose(wire.u_c, samples)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            wire_observables(traced(1.0, 1.0, [1.0, 2.0]), traced(1.0, 1.0, [1.0]))

    def test_missing_trace(self):
        with pytest.raises(ValueError):
            wire_observables(Branch(1.0, 1.0), traced(1.0, 1.0, [0.0, 0.0]))

    def test_kirchhoff_pointwise_identity(self):
        fs = 16000.0
        a = Branch(278.0, 1.0, synthesize(NoiseSpec(1.0, 500.0, fs, 4096, 11)))
        b = Branch(100.0, 0.32, synthesize(NoiseSpec(0.32, 500.0, fs, 4096, 22)))
        wire = wire_observables(a, b)
        lhs_a = a.trace.samples - wire.i_c * a.resistance
        lhs_b = b.trace.samples + wire.i_c * b.resistance
        scale = np.max(np.abs(wire.u_c))
        assert np.max(np.abs(lhs_a - wire.u_c)) < 1e-12 * scale
        assert np.max(np.abs(lhs_b - wire.u_c)) < 1e-12 * scale

    def test_power_antisymmetry(self):
        a = Branch(278.0, 1.0, synthesize(NoiseSpec(1.0, 500.0, 16000.0, 4096, 1)))
        b = Branch(100.0, 0.5, synthesize(NoiseSpec(0.5, 500.0, 16000.0, 4096, 2)))
        fwd = wire_observables(a, b)
        rev = wire_observables(b, a)
        assert np.array_equal(fwd.i_c, -rev.i_c)
        m_fwd = measure_moments(fwd)
        m_rev = measure_moments(rev)
        assert m_fwd.p_ab == pytest.approx(-m_rev.p_ab, abs=1e-18)

    def test_sampled_moments_match_oracle_50_pairs(self):
        rng = np.random.default_rng(42)
        fs, n = 4000.0, 2**16
        n_eff = 2 * n * 500.0 / fs
        for trial in range(50):
            r_a, r_b = 10 ** rng.uniform(2, 5, size=2)
            u2_a, u2_b = 10 ** rng.uniform(-1, 1, size=2)
            a = Branch(r_a, u2_a, synthesize(NoiseSpec(u2_a, 500.0, fs, n, 1000 + trial)))
            b = Branch(r_b, u2_b, synthesize(NoiseSpec(u2_b, 500.0, fs, n, 2000 + trial)))
            sampled = measure_moments(wire_observables(a, b))
            oracle = analytic_moments(r_a, u2_a, r_b, u2_b)
            tol = 4.0 * math.sqrt(2.0 / n_eff)
            assert sampled.u2 == pytest.approx(oracle.u2, rel=tol, abs=0)
            assert sampled.i2 == pytest.approx(oracle.i2, rel=tol, abs=0)
            p_se = math.sqrt((oracle.u2 * oracle.i2 + oracle.p_ab**2) / n_eff)
            assert abs(sampled.p_ab - oracle.p_ab) < 4.0 * p_se


class TestAnalyticMoments:
    def test_classic_levels(self):
        m = analytic_moments(1e3, 1.0, 1e4, 10.0)
        assert m.u2 == pytest.approx(0.9091, rel=1e-3)
        assert m.i2 == pytest.approx(9.091e-8, rel=1e-3, abs=0)
        assert m.p_ab == 0.0

    def test_vmg_row(self):
        m = analytic_moments(278.0, 1.0, 278.0, 0.4766)
        assert m.u2 == pytest.approx(0.3691, rel=1e-3)
        assert m.i2 == pytest.approx(4.776e-6, rel=1e-3, abs=0)
        assert m.p_ab == pytest.approx(4.707e-4, rel=1e-3, abs=0)

    def test_symmetric_pair_has_zero_power(self):
        m = analytic_moments(778.0, 2.5, 778.0, 2.5)
        assert m.p_ab == 0.0
        assert m.rho == 0.0

    def test_equal_temperature_zero_power(self):
        # u2_a / r_a == u2_b / r_b is the equilibrium condition
        m = analytic_moments(200.0, 3.0, 500.0, 7.5)
        assert m.p_ab == 0.0

    def test_domain_error(self):
        with pytest.raises(ValueError):
            analytic_moments(0.0, 1.0, 1.0, 1.0)


class TestResultants:
    def test_values(self):
        r = resultants(1e3, 1e4)
        assert r["parallel"] == pytest.approx(909.09, rel=1e-4)
        assert r["serial"] == 11e3

    def test_equal(self):
        r = resultants(50.0, 50.0)
        assert r == {"parallel": 25.0, "serial": 100.0}

    def test_swap_symmetry(self):
        assert resultants(1e3, 1e4) == resultants(1e4, 1e3)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            resultants(-1.0, 1.0)


class TestEquilibriumSpectra:
    def test_equal_resistors(self):
        s = equilibrium_spectra(300.0, 1e3, 1e3)
        assert s["s_u"] == pytest.approx(2 * BOLTZMANN * 300.0 * 1e3, rel=1e-12, abs=0)
        assert s["s_i"] == pytest.approx(2 * BOLTZMANN * 300.0 / 1e3, rel=1e-12, abs=0)

    def test_room_temperature_pair(self):
        s = equilibrium_spectra(300.0, 1e3, 1e4)
        assert s["s_u"] == pytest.approx(1.506e-17, rel=1e-3, abs=0)

    def test_product_invariant_under_swap(self):
        a = equilibrium_spectra(123.0, 1e3, 1e4)
        b = equilibrium_spectra(123.0, 1e4, 1e3)
        assert a["s_u"] * a["s_i"] == pytest.approx(b["s_u"] * b["s_i"], rel=1e-12, abs=0)


class TestConditionalZcVariance:
    def test_equilibrium_returns_u2_exactly(self):
        m = MomentSummary(u2=0.908, i2=9.09e-8, p_ab=0.0, rho=0.0)
        assert conditional_zc_variance(m) == 0.908

    def test_vmg_row2_value(self):
        m = analytic_moments(278.0, 1.0, 278.0, 8311532.0 / 17440164.0)
        assert conditional_zc_variance(m) == pytest.approx(0.3228, abs=5e-5)

    def test_lh_hl_symmetry(self):
        # both secure pairings of the solved quadruple share the value
        lh = analytic_moments(278.0, 1.0, 278.0, 8311532.0 / 17440164.0)
        hl = analytic_moments(46416.0, 2172018104.0 / 210168.0, 100.0, 8279848.0 / 25652728.0)
        assert conditional_zc_variance(lh) == pytest.approx(conditional_zc_variance(hl), rel=1e-9)
