import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geoment.bounds import (
    ChainReport,
    computation_holds,
    conc_meas_constant,
    cor_main_lower,
    cor_main_valid,
    fraction_threshold,
    fraction_valid,
    sym_main_lower,
    sym_main_threshold,
    sym_qubit_lower,
    thm_main_c2_bound,
    thm_main_E_lower,
    thm_sym_c2_bound,
    verify_proof_chain,
)
from geoment.spectral import hopm, upper_bound_E
from geoment.symmetric import d_nm, upper_bound_E_sym
from geoment.tensor import random_unit_tensor


class TestClosedForms:
    def test_thm_main_hand_value(self):
        assert thm_main_c2_bound(2, 2, 0.5) == pytest.approx(2 * math.log(8) / (3 * 0.25), abs=1e-12)
        assert thm_main_c2_bound(2, 2, 0.5) == pytest.approx(5.5452, abs=1e-4)

    def test_thm_main_blows_up_near_one(self):
        assert thm_main_c2_bound(2, 2, 0.99) > 100 * thm_main_c2_bound(2, 2, 0.5)

    def test_thm_main_domain(self):
        for args in [(1, 3, 0.5), (2, 1, 0.5), (2, 3, 0.0), (2, 3, 1.0)]:
            with pytest.raises(ValueError):
                thm_main_c2_bound(*args)

    @given(st.integers(2, 6), st.integers(2, 300), st.floats(1e-6, 0.999))
    def test_log_form_is_stable(self, n, k, eps):
        E = thm_main_E_lower(n, k, eps)
        assert math.isfinite(E)
        if n**k < 1e250:
            c2 = thm_main_c2_bound(n, k, eps)
            if c2 > 0 and math.isfinite(c2):
                assert E == pytest.approx(-math.log2(c2), abs=1e-9 * max(1, abs(E)))

    @given(st.integers(2, 6), st.integers(2, 300), st.floats(1e-6, 0.999))
    def test_thm_main_below_upper_bound(self, n, k, eps):
        assert thm_main_E_lower(n, k, eps) <= upper_bound_E(n, k)

    def test_conc_meas_constant(self):
        assert conc_meas_constant(2, 10) == pytest.approx(thm_main_E_lower(2, 10, 0.5) - 9, abs=1e-12)

    def test_census_style_c2(self):
        sig = [hopm(random_unit_tensor(2, 3, s), num_starts=4).lower for s in range(500)]
        assert min(sig) ** 2 <= thm_main_c2_bound(2, 3, 0.3)

    def test_cor_main(self):
        expected = 20 - math.log2(21) - math.log2(math.log(21)) - 2
        assert cor_main_lower(2, 21) == pytest.approx(expected, abs=1e-12)
        assert cor_main_lower(2, 21) == pytest.approx(12.00, abs=0.01)
        assert cor_main_valid(21) and not cor_main_valid(20)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_cor_main_consistent(self, n):
        for k in range(21, 201):
            assert cor_main_lower(n, k) <= upper_bound_E(n, k)

    def test_fraction(self):
        assert fraction_threshold(10) == pytest.approx(2.4747, abs=1e-3)
        assert fraction_valid(4) and not fraction_valid(3)
        for k in range(4, 31):
            assert fraction_threshold(k) < upper_bound_E(2, k)

    def test_thm_sym(self):
        assert thm_sym_c2_bound(2, 4, 0.1) == pytest.approx(0.16 + math.log(40) / 4, abs=1e-12)
        assert thm_sym_c2_bound(2, 4, 0.1) == pytest.approx(1.0822, abs=1e-3)
        assert thm_sym_c2_bound(2, 4, 1e-300) > thm_sym_c2_bound(2, 4, 1e-10) > thm_sym_c2_bound(2, 4, 1e-3)

    def test_sym_qubit(self):
        assert sym_qubit_lower(100) == pytest.approx(math.log2(100) - math.log2(1 + math.log(4000)), abs=1e-12)
        assert sym_qubit_lower(100) == pytest.approx(3.428, abs=1e-3)
        m = np.arange(1, 10_001)
        assert all(sym_qubit_lower(int(x)) <= upper_bound_E_sym(2, int(x)) for x in m)

    def test_sym_main_vs_qubit_gap_is_bounded(self):
        gaps = [sym_main_lower(2, m) - sym_qubit_lower(m) for m in range(2, 10_001)]
        assert max(map(abs, gaps)) < 3

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_sym_main_consistent(self, n):
        for m in range(1, 2001):
            assert sym_main_lower(n, m) <= upper_bound_E_sym(n, m)

    def test_deterministic(self):
        vals = [thm_main_c2_bound(3, 7, 0.2), cor_main_lower(3, 40), sym_qubit_lower(77)]
        assert vals == [thm_main_c2_bound(3, 7, 0.2), cor_main_lower(3, 40), sym_qubit_lower(77)]


class TestChains:
    def test_cor_main_base_case(self):
        rep = verify_proof_chain("cor_main", n=2, k=21)
        assert rep.passed, rep.failed()
        assert len(rep.steps) >= 8

    def test_cor_main_fails_outside_range(self):
        rep = verify_proof_chain("cor_main", n=2, k=20)
        assert not rep.passed
        assert "ln k >= 3" in rep.failed()

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_cor_main_sweep(self, n):
        bad = [k for k in range(21, 201) if not verify_proof_chain("cor_main", n=n, k=k).passed]
        assert bad == []

    def test_fraction_base_case(self):
        rep = verify_proof_chain("fraction", k=10)
        assert rep.passed
        assert "log2(2^k - 1) >= k - 1/4" in [s.name for s in rep.steps]

    def test_fraction_sweep(self):
        assert all(verify_proof_chain("fraction", k=k).passed for k in range(4, 201))
        assert not verify_proof_chain("fraction", k=3).passed

    def test_sym_main_at_thousand(self):
        rep = verify_proof_chain("sym_main", n=2, m=1000)
        assert rep.passed
        step = next(s for s in rep.steps if s.name == "(computation)")
        assert step.holds

    def test_sym_main_threshold(self):
        th = sym_main_threshold(2)
        # the key inequality starts holding before every cruder step of the chain does
        assert th["m_star_computation"] <= th["m_star"]
        assert not verify_proof_chain("sym_main", n=2, m=th["m_star"] - 1).passed
        assert computation_holds(2, th["m_star_computation"])
        assert not computation_holds(2, th["m_star_computation"] - 1)

    @pytest.mark.parametrize("n", [2, 3])
    def test_sym_main_sweep(self, n):
        m_star = sym_main_threshold(n)["m_star"]
        assert all(verify_proof_chain("sym_main", n=n, m=m).passed for m in range(m_star, 10_001))

    def test_sym_qubit_sweep(self):
        assert all(verify_proof_chain("sym_qubit", m=m).passed for m in range(2, 10_001))

    def test_unknown(self):
        with pytest.raises(ValueError):
            verify_proof_chain("nope")

    def test_report_serializes(self):
        d = verify_proof_chain("fraction", k=12).as_dict()
        assert d["passed"] is True
        assert {"name", "lhs", "rhs", "relation", "holds"} <= set(d["steps"][0])

    def test_identity_relation_tolerance(self):
        rep = ChainReport("x", {})
        rep.add("close", 1.0, "==", 1.0 + 1e-12)
        rep.add("far", 1.0, "==", 1.0 + 1e-6)
        assert [s.holds for s in rep.steps] == [True, False]


class TestEdgeDomains:
    def test_log_log_needs_k_two(self):
        with pytest.raises(ValueError):
            cor_main_lower(2, 1)
        with pytest.raises(ValueError):
            fraction_threshold(1)

    def test_sym_domains(self):
        with pytest.raises(ValueError):
            sym_qubit_lower(0)
        with pytest.raises(ValueError):
            thm_sym_c2_bound(1, 3, 0.1)
        assert d_nm(2, 1) == 2
