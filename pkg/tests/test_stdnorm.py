"""Tests for the standard-normal primitives.

The reference implementation for CDF values is the C library's erf via
``math.erf`` — an independent code path from the package's rational
approximations.  Quantile reference values are frozen from bisection on
that reference CDF (see ``_bisect_quantile``).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairsel import stdnorm
from fairsel.errors import DomainError


def ref_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def _bisect_quantile(p: float, tol: float = 1e-13) -> float:
    lo, hi = -40.0, 40.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ref_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestPdf:
    def test_at_zero(self):
        assert stdnorm.pdf(0.0) == pytest.approx(0.3989422804014327, abs=1e-16)

    def test_at_one(self):
        # exp(-1/2) / sqrt(2*pi), evaluated independently here
        expected = math.exp(-0.5) / math.sqrt(2.0 * math.pi)
        assert stdnorm.pdf(1.0) == pytest.approx(expected, abs=1e-16)
        assert stdnorm.pdf(1.0) == pytest.approx(0.24197072451914337, abs=1e-16)

    @given(st.floats(-30, 30))
    def test_symmetry_and_positivity(self, z):
        assert stdnorm.pdf(z) == stdnorm.pdf(-z)
        assert stdnorm.pdf(z) > 0.0

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            stdnorm.pdf(math.inf)
        with pytest.raises(DomainError):
            stdnorm.pdf(math.nan)

    def test_array_matches_scalar(self):
        z = np.linspace(-8, 8, 101)
        got = stdnorm.pdf(z)
        want = np.array([stdnorm.pdf(float(v)) for v in z])
        np.testing.assert_allclose(got, want, rtol=2e-16, atol=0)


class TestCdf:
    def test_at_zero_exact(self):
        assert stdnorm.cdf(0.0) == 0.5

    def test_limits(self):
        assert stdnorm.cdf(math.inf) == 1.0
        assert stdnorm.cdf(-math.inf) == 0.0

    def test_against_reference_grid(self):
        # spec'd accuracy: absolute error <= 1e-14
        for z in np.linspace(-37.0, 37.0, 2001):
            assert abs(stdnorm.cdf(float(z)) - ref_cdf(float(z))) <= 1e-14

    def test_two_sided_confidence_point(self):
        # z* solving cdf(z*) = 0.975, found by bisection on the reference
        z_star = _bisect_quantile(0.975)
        assert z_star == pytest.approx(1.959964, abs=5e-7)
        assert stdnorm.cdf(1.959964) == pytest.approx(0.975, abs=1e-6)

    @given(st.floats(-37, 37))
    def test_complement_identity(self, z):
        assert stdnorm.cdf(z) + stdnorm.cdf(-z) == pytest.approx(1.0, abs=1e-15)

    def test_monotone_on_grid(self):
        z = np.linspace(-12, 12, 4001)
        vals = stdnorm.cdf(z)
        assert np.all(np.diff(vals) >= 0.0)

    def test_derivative_is_pdf(self):
        h = 1e-5
        for z in np.linspace(-6, 6, 241):
            fd = (stdnorm.cdf(float(z) + h) - stdnorm.cdf(float(z) - h)) / (2 * h)
            assert fd == pytest.approx(stdnorm.pdf(float(z)), abs=1e-6)

    def test_rejects_nan(self):
        with pytest.raises(DomainError):
            stdnorm.cdf(math.nan)
        with pytest.raises(DomainError):
            stdnorm.cdf(np.array([0.0, math.nan]))

    def test_array_matches_scalar(self):
        z = np.linspace(-30, 30, 301)
        got = stdnorm.cdf(z)
        want = np.array([stdnorm.cdf(float(v)) for v in z])
        np.testing.assert_allclose(got, want, rtol=1e-14, atol=1e-300)


class TestQuantile:
    def test_median_exact(self):
        assert stdnorm.quantile(0.5) == 0.0

    def test_frozen_points(self):
        # frozen from bisection on the reference CDF to 1e-13
        assert stdnorm.quantile(0.8) == pytest.approx(0.8416212335729143, abs=1e-12)
        assert stdnorm.quantile(0.975) == pytest.approx(1.9599639845400545, abs=1e-12)
        assert stdnorm.quantile(0.025) == pytest.approx(-1.9599639845400545, abs=1e-12)

    def test_matches_bisection_oracle(self):
        for p in [1e-8, 1e-4, 0.01, 0.2, 0.4, 0.6, 0.9, 0.99, 1 - 1e-6]:
            z = _bisect_quantile(p)
            # quantile is ill-conditioned where pdf is tiny; scale the
            # tolerance by the condition number 1/pdf(z)
            tol = 1e-12 + 4e-16 / stdnorm.pdf(z)
            assert stdnorm.quantile(p) == pytest.approx(z, abs=tol)

    @given(st.floats(1e-12, 1 - 1e-12))
    @settings(max_examples=300)
    def test_round_trip(self, p):
        assert abs(stdnorm.cdf(stdnorm.quantile(p)) - p) <= 1e-12

    @given(st.floats(0.001, 0.5))
    def test_antisymmetry(self, p):
        # restricted to the central range: in the tails 1-p itself rounds,
        # which moves the true quantile by more than the evaluation error
        q1 = stdnorm.quantile(p)
        q2 = stdnorm.quantile(1.0 - p)
        assert q1 + q2 == pytest.approx(0.0, abs=1e-12)

    def test_strictly_increasing(self):
        p = np.linspace(1e-6, 1 - 1e-6, 2001)
        vals = stdnorm.quantile(p)
        assert np.all(np.diff(vals) > 0.0)

    def test_extreme_tails_finite(self):
        lo = stdnorm.quantile(1e-300)
        assert math.isfinite(lo) and lo < -37.0
        assert abs(stdnorm.cdf(lo) - 1e-300) <= 1e-313

    def test_domain_errors(self):
        for p in [0.0, 1.0, -0.1, 1.1, math.nan]:
            with pytest.raises(DomainError):
                stdnorm.quantile(p)
        with pytest.raises(DomainError):
            stdnorm.quantile(np.array([0.5, 1.0]))

    def test_array_matches_scalar(self):
        p = np.linspace(0.001, 0.999, 211)
        got = stdnorm.quantile(p)
        want = np.array([stdnorm.quantile(float(v)) for v in p])
        np.testing.assert_allclose(got, want, rtol=0, atol=5e-16)
