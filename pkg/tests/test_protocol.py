import math

import numpy as np
import pytest
from scipy.stats import chi2

from kljnsim.circuit import MomentSummary
from kljnsim.errors import ConfigurationError
from kljnsim.protocol import (
    BitCase,
    SessionConfig,
    _infer_partner,
    case_wire,
    classify_partner_choice,
    filter_secure_bits,
    run_session,
    secure_bit_value,
)
from kljnsim.schemes import classic_kljn, level_table


@pytest.fixture(scope="module")
def classic_scheme():
    return classic_kljn(1e3, 1e4, 1.0, 500.0)


class TestBitCase:
    def test_labels(self):
        assert BitCase("L", "H").label == "LH"
        assert BitCase("H", "L").label == "HL"

    def test_secure_flag(self):
        assert BitCase("L", "H").secure
        assert BitCase("H", "L").secure
        assert not BitCase("L", "L").secure
        assert not BitCase("H", "H").secure

    def test_validation(self):
        with pytest.raises(ValueError):
            BitCase("X", "L")


class TestSessionConfig:
    def test_invalid_counts(self, classic_scheme):
        with pytest.raises(ConfigurationError):
            SessionConfig(scheme=classic_scheme, bits_per_run=0)
        with pytest.raises(ConfigurationError):
            SessionConfig(scheme=classic_scheme, oversample=0.5)
        with pytest.raises(ConfigurationError):
            SessionConfig(scheme=classic_scheme, zc_mode="midpoint")

    def test_sample_rate(self, classic_scheme):
        cfg = SessionConfig(scheme=classic_scheme, oversample=16)
        assert cfg.sample_rate == 2 * 500.0 * 16


class TestCaseWire:
    def test_deterministic(self, classic_scheme):
        a = case_wire(classic_scheme, "LH", 1024, 16000.0, (9, 0, 0))
        b = case_wire(classic_scheme, "LH", 1024, 16000.0, (9, 0, 0))
        assert np.array_equal(a.u_c, b.u_c)
        assert np.array_equal(a.i_c, b.i_c)

    def test_cases_differ(self, classic_scheme):
        a = case_wire(classic_scheme, "LH", 1024, 16000.0, (9, 0, 0))
        b = case_wire(classic_scheme, "HL", 1024, 16000.0, (9, 0, 0))
        assert not np.array_equal(a.u_c, b.u_c)


class TestRunSession:
    def test_determinism(self, classic_scheme):
        cfg = SessionConfig(scheme=classic_scheme, samples_per_bit=2048,
                            bits_per_run=20, runs=2, master_seed=5)
        assert run_session(cfg) == run_session(cfg)

    def test_secure_fraction(self, classic_scheme):
        cfg = SessionConfig(scheme=classic_scheme, samples_per_bit=64, oversample=1,
                            bits_per_run=1000, runs=1, master_seed=17)
        res = run_session(cfg)[0]
        fraction = res.secure_count / 1000
        assert abs(fraction - 0.5) < 4 * math.sqrt(0.25 / 1000)

    def test_choice_independence_chi2(self, classic_scheme):
        # choices do not depend on trace length, so keep the traces tiny
        cfg = SessionConfig(scheme=classic_scheme, samples_per_bit=64, oversample=1,
                            bits_per_run=10_000, runs=1, master_seed=23)
        res = run_session(cfg)[0]
        counts = {c: 0 for c in ("LL", "LH", "HL", "HH")}
        for rec in res.records:
            counts[rec.case.label] += 1
        n = len(res.records)
        stat = sum((c - n / 4) ** 2 / (n / 4) for c in counts.values())
        assert stat < chi2.ppf(1 - 1e-3, df=3)

    def test_classification_accuracy(self, classic_scheme):
        cfg = SessionConfig(scheme=classic_scheme, samples_per_bit=16384, oversample=16,
                            bits_per_run=2000, runs=2, master_seed=31)
        results = run_session(cfg)
        bits = sum(len(r.records) for r in results)
        errors = sum(r.classification_error_count for r in results)
        assert errors / bits <= 1e-3

    def test_record_invariants(self, classic_scheme):
        cfg = SessionConfig(scheme=classic_scheme, samples_per_bit=2048,
                            bits_per_run=50, runs=1, master_seed=2)
        res = run_session(cfg)[0]
        assert res.secure_count == sum(r.secure for r in res.records)
        for rec in res.records:
            assert rec.secure == (rec.case.label in ("LH", "HL"))
            assert (rec.u_zc2 is None) == (rec.n_crossings == 0)

    def test_no_cross_bit_leakage(self, classic_scheme):
        cfg = SessionConfig(scheme=classic_scheme, samples_per_bit=2**14, oversample=4,
                            bits_per_run=6, runs=1, master_seed=77)
        n_eff = 2**14 / 4
        wires = [
            case_wire(classic_scheme, "LH", 2**14, cfg.sample_rate, (77, 0, bit))
            for bit in range(6)
        ]
        for w1, w2 in zip(wires, wires[1:]):
            corr = np.mean(w1.u_c * w2.u_c) / math.sqrt(
                np.mean(w1.u_c**2) * np.mean(w2.u_c**2)
            )
            assert abs(corr) < 4 / math.sqrt(n_eff)


class TestClassification:
    def test_exact_secure_level_with_own_h_means_partner_l(self, classic_scheme):
        lt = level_table(classic_scheme)
        inferred = _infer_partner("H", lt["HL"].u2, lt)
        assert inferred == "L"

    def test_tie_breaks_toward_l(self):
        def level(u2):
            return MomentSummary(u2=u2, i2=1.0, p_ab=0.0, rho=0.0)

        levels = {"LL": level(1.0), "LH": level(3.0), "HL": level(3.0), "HH": level(9.0)}
        assert _infer_partner("L", 2.0, levels) == "L"   # exact tie
        assert _infer_partner("H", 6.0, levels) == "L"   # exact tie, own H

    def test_degenerate_levels_warn_and_default_l(self):
        m = MomentSummary(u2=1.0, i2=1.0, p_ab=0.0, rho=0.0)
        levels = {"LL": m, "LH": m, "HL": m, "HH": m}
        with pytest.warns(UserWarning, match="degenerate"):
            assert _infer_partner("H", 1.0, levels) == "L"

    def test_classify_full_wire(self, classic_scheme):
        wire = case_wire(classic_scheme, "LH", 16384, 16000.0, (3, 0, 0))
        partner = classify_partner_choice("L", 1e3, wire, classic_scheme)
        assert partner == "H"

    def test_wrong_resistance_rejected(self, classic_scheme):
        wire = case_wire(classic_scheme, "LH", 1024, 16000.0, (3, 0, 0))
        with pytest.raises(ValueError, match="resistance"):
            classify_partner_choice("L", 555.0, wire, classic_scheme)


class TestSecureBitHandling:
    def test_filter_all_insecure(self, classic_scheme):
        cfg = SessionConfig(scheme=classic_scheme, samples_per_bit=512, oversample=1,
                            bits_per_run=30, runs=1, master_seed=8)
        records = run_session(cfg)[0].records
        hh_only = [r for r in records if r.case.label == "HH"]
        assert filter_secure_bits(hh_only) == []

    def test_filter_preserves_order_and_count(self, classic_scheme):
        cfg = SessionConfig(scheme=classic_scheme, samples_per_bit=512, oversample=1,
                            bits_per_run=200, runs=1, master_seed=8)
        records = run_session(cfg)[0].records
        secure = filter_secure_bits(records)
        assert len(secure) == sum(1 for r in records if r.case.label in ("LH", "HL"))
        indices = [records.index(r) for r in secure]
        assert indices == sorted(indices)

    def test_bit_value_convention(self):
        assert secure_bit_value("HL") == 1
        assert secure_bit_value("LH") == 0
        assert secure_bit_value("HL", hl_value=0) == 0
        assert secure_bit_value("LH", hl_value=0) == 1
        with pytest.raises(ValueError):
            secure_bit_value("HH")
