import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poissonmimo.errors import ParameterError
from poissonmimo.specfun import (
    _near_one_transform,
    _series,
    csc_2pi_over_alpha,
    gauss_2f1,
    sin_2pi_over_alpha,
)


def series_oracle(a, b, c, z, dps=50, max_terms=200_000):
    """Extended-precision summation of the defining power series."""
    with mpmath.workdps(dps):
        a, b, c, z = map(mpmath.mpf, (a, b, c, z))
        term = mpmath.mpf(1)
        total = mpmath.mpf(1)
        for n in range(max_terms):
            term *= (a + n) * (b + n) / ((c + n) * (1 + n)) * z
            total += term
            if abs(term) < mpmath.mpf(10) ** (-dps + 10) * abs(total):
                break
        return float(total)


class TestGauss2F1:
    def test_unit_at_zero(self):
        assert gauss_2f1(0.6, 0.6, 1.6, 0.0) == 1.0

    def test_log_closed_form(self):
        # 2F1(1,1;2;z) = -ln(1-z)/z
        assert gauss_2f1(1.0, 1.0, 2.0, 0.5) == pytest.approx(2.0 * math.log(2.0), rel=1e-12)

    @pytest.mark.parametrize("z", [0.1, 0.5, 0.9, 0.99])
    @pytest.mark.parametrize("alpha", [4.0, 5.0])
    def test_matches_series_oracle(self, alpha, z):
        a = 1.0 - 2.0 / alpha
        c = 2.0 - 2.0 / alpha
        assert gauss_2f1(a, a, c, z) == pytest.approx(series_oracle(a, a, c, z), rel=1e-10)

    def test_spec_case(self):
        got = gauss_2f1(0.6, 0.6, 1.6, 0.9)
        assert got == pytest.approx(series_oracle(0.6, 0.6, 1.6, 0.9), rel=1e-10)

    @pytest.mark.parametrize("alpha", [4.0, 5.0, 6.0])
    def test_paths_agree_on_crossover_band(self, alpha):
        a = 1.0 - 2.0 / alpha
        c = 2.0 - 2.0 / alpha
        for z in np.arange(0.85, 0.9501, 0.01):
            direct = _series(a, a, c, float(z))
            transformed = _near_one_transform(a, a, c, float(z))
            assert transformed == pytest.approx(direct, rel=1e-9)

    @pytest.mark.parametrize("alpha", [4.0, 5.0])
    def test_gauss_summation_limit(self, alpha):
        # 2F1(a,b;c;1) = Gamma(c)Gamma(c-a-b) / (Gamma(c-a)Gamma(c-b))
        a = 1.0 - 2.0 / alpha
        c = 2.0 - 2.0 / alpha
        gauss_value = math.gamma(c) * math.gamma(c - 2 * a) / math.gamma(c - a) ** 2
        z = np.nextafter(1.0, 0.0)
        assert abs(gauss_2f1(a, a, c, z) - gauss_value) < 1e-6

    def test_monotone_in_z(self):
        values = [gauss_2f1(0.6, 0.6, 1.6, z) for z in np.linspace(0.0, 0.99, 50)]
        assert np.all(np.diff(values) > 0)

    @given(st.floats(min_value=0.0, max_value=0.995), st.floats(min_value=2.2, max_value=12.0))
    @settings(max_examples=100, deadline=None)
    def test_bounded_below_by_one(self, z, alpha):
        a = 1.0 - 2.0 / alpha
        c = 2.0 - 2.0 / alpha
        assert gauss_2f1(a, a, c, z) >= 1.0

    @pytest.mark.parametrize("z", [-0.1, 1.0, 1.5])
    def test_rejects_out_of_domain(self, z):
        with pytest.raises(ParameterError):
            gauss_2f1(0.6, 0.6, 1.6, z)

    def test_rejects_nonpositive_integer_c(self):
        with pytest.raises(ParameterError):
            gauss_2f1(0.6, 0.6, -1.0, 0.5)


class TestTrigHelpers:
    def test_alpha_four(self):
        assert sin_2pi_over_alpha(4.0) == pytest.approx(1.0, rel=1e-15)
        assert csc_2pi_over_alpha(4.0) == pytest.approx(1.0, rel=1e-15)

    def test_alpha_five_reference_value(self):
        assert sin_2pi_over_alpha(5.0) == pytest.approx(0.9510565163, abs=1e-10)

    def test_alpha_near_two_blows_up_gracefully(self):
        assert sin_2pi_over_alpha(2.0 + 1e-9) > 0
        assert csc_2pi_over_alpha(2.0 + 1e-9) > 1e8

    @pytest.mark.parametrize("alpha", [2.0, 1.5, -3.0])
    def test_rejects_alpha_at_or_below_two(self, alpha):
        with pytest.raises(ParameterError):
            sin_2pi_over_alpha(alpha)
        with pytest.raises(ParameterError):
            csc_2pi_over_alpha(alpha)
