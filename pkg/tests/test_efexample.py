import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from backflow.efexample import (
    SHARP_LIMIT,
    ExampleWidth,
    critical_width,
    example_sweep,
    husimi_slice,
    integral_I,
    integral_I_quadrature,
    scaled_effective_current,
)
from backflow.specfun import NoBracketError
from backflow.states import MomentumState, PhasePoint, PrecisionSpec, husimi


class TestIntegralI:
    def test_deep_negative_eta_underflows_cleanly(self):
        value = integral_I(-50.0, ExampleWidth(1.0))
        assert np.isfinite(value)
        assert abs(value) < 1e-300

    @pytest.mark.parametrize("eta,s", [(2.0, 1.0), (-3.0, 5.0)])
    def test_against_quadrature_oracle(self, eta, s):
        w = ExampleWidth(s)
        oracle = integral_I_quadrature(eta, w)
        assert integral_I(eta, w) == pytest.approx(oracle, rel=1e-10)

    def test_oracle_grid(self):
        # closed form vs direct quadrature across the full check grid
        for eta in (-20.0, -5.0, -1.0, 0.0, 1.0, 5.0, 20.0):
            for s in (0.5, 1.0, 5.0, 10.0):
                w = ExampleWidth(s)
                oracle = integral_I_quadrature(eta, w)
                if abs(oracle) < 1e-280:
                    continue  # both underflow; relative error meaningless
                assert integral_I(eta, w) == pytest.approx(oracle, rel=1e-8)

    @given(st.floats(-1e3, 1e3), st.floats(1e-2, 1e2))
    @settings(max_examples=200)
    def test_finite_everywhere(self, eta, s):
        assert np.isfinite(integral_I(eta, ExampleWidth(s)))

    def test_vectorized(self):
        w = ExampleWidth(2.0)
        etas = np.array([-3.0, 0.0, 4.0])
        vec = integral_I(etas, w)
        assert vec == pytest.approx([integral_I(e, w) for e in etas], rel=1e-15)


class TestHusimiSlice:
    @given(st.floats(-50.0, 50.0), st.floats(0.05, 20.0))
    def test_nonnegative(self, eta, s):
        assert husimi_slice(eta, ExampleWidth(s)) >= 0.0

    def test_matches_full_husimi(self):
        state = MomentumState.bm_example()
        rng = np.random.default_rng(11)
        for _ in range(10):
            eta = rng.uniform(-1.0, 4.0)
            s = rng.uniform(0.5, 3.0)
            direct = husimi(state, PrecisionSpec(sigma_tilde=s), PhasePoint(0.0, eta))
            slice_val = husimi_slice(eta, ExampleWidth(s))  # hbar-scaled
            assert slice_val == pytest.approx(direct, rel=1e-8)

    def test_large_width_finite_positive(self):
        value = husimi_slice(1.0, ExampleWidth(80.0))
        assert np.isfinite(value) and value > 0.0


class TestScaledEffectiveCurrent:
    def test_small_width_limit(self):
        value = scaled_effective_current(ExampleWidth(0.1))
        assert value == pytest.approx(SHARP_LIMIT, rel=0.01)

    def test_sign_change_region(self):
        assert scaled_effective_current(ExampleWidth(5.0)) < 0.0
        assert scaled_effective_current(ExampleWidth(6.5)) > 0.0

    def test_bare_term_structure(self):
        # with the smoothing moment switched off only the bare current
        # survives: -(18/35pi) * 2
        assert -(18.0 / (35.0 * np.pi)) * 2.0 == pytest.approx(SHARP_LIMIT, rel=1e-15)

    def test_lower_bound(self):
        # the (negative) moment can only raise the value above the
        # sharp-limit floor
        for s in (0.05, 0.5, 1.0, 3.0, 5.6, 8.0, 20.0):
            assert scaled_effective_current(ExampleWidth(s)) >= SHARP_LIMIT - 1e-12

    def test_near_zero_width_limit(self):
        assert abs(scaled_effective_current(ExampleWidth(0.05)) + 0.327404) <= 0.005

    def test_moment_integrand_sign(self):
        # eta <= 0 and I^2 >= 0 make the moment nonpositive for every s
        for s in (0.3, 1.0, 5.0, 10.0):
            w = ExampleWidth(s)
            etas = np.linspace(-12 * s, 0.0, 200)
            assert np.all(etas * integral_I(etas, w) ** 2 <= 0.0)


class TestCriticalWidth:
    def test_value_in_band(self):
        s_star = critical_width(1e-6)
        assert 5.2 <= s_star <= 6.0

    def test_sign_on_both_sides(self):
        s_star = critical_width(1e-6)
        assert scaled_effective_current(ExampleWidth(s_star - 0.5)) < 0.0
        assert scaled_effective_current(ExampleWidth(s_star + 0.5)) > 0.0

    def test_rejects_bad_tol(self):
        with pytest.raises(ValueError):
            critical_width(0.0)

    def test_no_bracket_after_widening(self):
        with pytest.raises(NoBracketError):
            critical_width(1e-4, lo=20.0, hi=21.0)


class TestExampleSweep:
    def test_negative_region(self):
        sweep = example_sweep([0.5, 1.0, 2.0])
        assert all(v < 0 for v in sweep.values())

    def test_positive_region(self):
        sweep = example_sweep([7.0, 8.0, 9.0])
        assert all(v > 0 for v in sweep.values())

    def test_single_point_consistency(self):
        sweep = example_sweep([1.0])
        assert sweep.values()[0] == scaled_effective_current(ExampleWidth(1.0))

    def test_monotone_on_default_range(self):
        values = example_sweep(np.linspace(0.1, 10.0, 25)).values()
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            example_sweep([2.0, 1.0])

    def test_csv_shape(self):
        text = example_sweep([0.5, 1.5]).to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == "s,J_scaled,converged"
        assert len(lines) == 3
        cell = lines[1].split(",")[1]
        assert len(cell.lstrip("-").replace(".", "").replace("e", "").replace("-", "")) >= 16

    def test_deterministic_and_worker_invariant(self):
        s_values = [0.5, 1.0, 3.0, 6.0]
        a = example_sweep(s_values).to_csv()
        b = example_sweep(s_values).to_csv()
        c = example_sweep(s_values, max_workers=4).to_csv()
        assert a == b == c
