import math

import numpy as np
import pytest
from mpmath import ceil as mceil, log, mp, mpf, sqrt

from cpdbandit.helpers.errors import (
    ConfigError,
    DegenerateLogError,
    InvalidAlphaError,
    InvalidCountError,
    InvalidDeltaError,
)
from cpdbandit.services.confbounds import (
    RadiusKind,
    laplace_radius,
    laplace_radius_array,
    peeling_radius,
    peeling_radius_array,
    phase_radius,
    radius,
    radius_array,
    union_radius,
    union_radius_array,
)
from cpdbandit.services.policies.impcpd import impcpd_psi

mp.dps = 50


def laplace_oracle(n, delta):
    n, delta = mpf(n), mpf(delta)
    return sqrt((1 + 1 / n) * log(sqrt(n + 1) / delta) / (2 * n))


def union_oracle(n, t, delta):
    n, t, delta = mpf(n), mpf(t), mpf(delta)
    return sqrt(log(4 * t ** 2 / delta) / (2 * n))


def peeling_oracle(n, t, delta, alpha):
    n, t, delta, alpha = mpf(n), mpf(t), mpf(delta), mpf(alpha)
    return sqrt((alpha / n) * log(mceil(log(t) / alpha) / delta))


def phase_oracle(n, eps, psi, alpha):
    n, eps, psi, alpha = mpf(n), mpf(eps), mpf(psi), mpf(alpha)
    return sqrt(alpha * log(psi * eps ** 2) / (2 * n))


LAPLACE_CASES = [(n, d) for n in (1, 2, 3, 7, 10, 50, 100, 999, 10_000, 10**6) for d in (0.25, 0.05, 0.01)]
UNION_CASES = [(n, t, d) for n in (1, 5, 100, 400, 5000) for t in (1, 10, 1000, 10**5) for d in (0.05, 0.001)]
PEELING_CASES = [(n, t, d, a) for n in (1, 100, 3000) for t in (2, 1000, 10**6) for d in (0.05, 0.01)
                 for a in (1.1, 1.5, 2.0)]
PHASE_CASES = [(n, e, a) for n in (1, 10, 60, 500) for e in (1.0, 0.5, 1 / 1.05 ** 20) for a in (1.0, 1.5, 3.0)]


class TestLaplaceRadius:
    @pytest.mark.parametrize("n,delta,expected", [
        (1, 0.25, 1.316385),
        (100, 0.05, 0.163651),
        (50, 0.01, 0.258893),
    ])
    def test_quoted_values(self, n, delta, expected):
        assert laplace_radius(n, delta) == pytest.approx(expected, rel=1e-5)

    @pytest.mark.parametrize("n,delta", LAPLACE_CASES)
    def test_matches_high_precision(self, n, delta):
        assert laplace_radius(n, delta) == pytest.approx(float(laplace_oracle(n, delta)), rel=1e-10)

    def test_strictly_decreasing_in_n(self):
        values = [laplace_radius(n, 0.05) for n in range(1, 500)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_strictly_decreasing_in_delta(self):
        values = [laplace_radius(30, d) for d in np.linspace(0.01, 0.99, 50)]
        assert all(a > b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("n", [0, -3])
    def test_bad_count(self, n):
        with pytest.raises(InvalidCountError):
            laplace_radius(n, 0.1)

    @pytest.mark.parametrize("delta", [0.0, 1.0, 1.5, -0.1])
    def test_bad_delta(self, delta):
        with pytest.raises(InvalidDeltaError):
            laplace_radius(10, delta)

    def test_array_form_agrees(self):
        n = np.arange(1, 200)
        expected = [laplace_radius(int(k), 0.01) for k in n]
        np.testing.assert_allclose(laplace_radius_array(n, 0.01), expected, rtol=1e-14)


class TestUnionRadius:
    def test_quoted_value(self):
        assert union_radius(100, 1000, 0.05) == pytest.approx(0.301642, rel=1e-5)

    def test_quadrupling_n_halves_radius(self):
        assert union_radius(400, 1000, 0.05) == pytest.approx(union_radius(100, 1000, 0.05) / 2, rel=1e-14)

    def test_wider_than_laplace(self):
        assert union_radius(100, 1000, 0.05) > laplace_radius(100, 0.05)

    @pytest.mark.parametrize("n,t,delta", UNION_CASES)
    def test_matches_high_precision(self, n, t, delta):
        assert union_radius(n, t, delta) == pytest.approx(float(union_oracle(n, t, delta)), rel=1e-10)

    def test_bad_time(self):
        with pytest.raises(InvalidCountError):
            union_radius(5, 0, 0.1)

    def test_array_form_agrees(self):
        n = np.arange(1, 100)
        expected = [union_radius(int(k), 77, 0.02) for k in n]
        np.testing.assert_allclose(union_radius_array(n, 77, 0.02), expected, rtol=1e-14)


class TestPeelingRadius:
    def test_quoted_value(self):
        assert peeling_radius(100, 1000, 0.05, 1.1) == pytest.approx(0.233148, rel=1e-5)

    @pytest.mark.parametrize("n,t,delta,alpha", PEELING_CASES)
    def test_matches_high_precision(self, n, t, delta, alpha):
        expected = float(peeling_oracle(n, t, delta, alpha))
        assert peeling_radius(n, t, delta, alpha) == pytest.approx(expected, rel=1e-10)

    @pytest.mark.parametrize("alpha", [1.0, 0.5])
    def test_alpha_must_exceed_one(self, alpha):
        with pytest.raises(InvalidAlphaError):
            peeling_radius(10, 100, 0.05, alpha)

    def test_needs_t_at_least_two(self):
        with pytest.raises(InvalidCountError):
            peeling_radius(10, 1, 0.05, 1.5)

    def test_array_form_agrees(self):
        n = np.arange(1, 100)
        expected = [peeling_radius(int(k), 500, 0.05, 1.5) for k in n]
        np.testing.assert_allclose(peeling_radius_array(n, 500, 0.05, 1.5), expected, rtol=1e-14)


class TestPhaseRadius:
    PSI = impcpd_psi(4000, 3)

    def test_psi_for_experiment1(self):
        expected = mpf(4000) ** 2 / (9 * log(3))
        assert self.PSI == pytest.approx(float(expected), rel=1e-12)
        assert self.PSI == pytest.approx(1_618_201.0, rel=1e-5)

    @pytest.mark.parametrize("n,expected", [(10, 1.035505), (60, 0.422743), (30, 0.597849)])
    def test_quoted_values(self, n, expected):
        assert phase_radius(n, 1.0, self.PSI, 1.5) == pytest.approx(expected, rel=1e-5)

    @pytest.mark.parametrize("n,eps,alpha", PHASE_CASES)
    def test_matches_high_precision(self, n, eps, alpha):
        expected = float(phase_oracle(n, eps, self.PSI, alpha))
        assert phase_radius(n, eps, self.PSI, alpha) == pytest.approx(expected, rel=1e-10)

    def test_degenerate_log(self):
        with pytest.raises(DegenerateLogError):
            phase_radius(10, 0.5, 2.0, 1.5)

    def test_log_exactly_one_is_degenerate(self):
        with pytest.raises(DegenerateLogError):
            phase_radius(10, 1.0, 1.0, 1.5)


class TestRadiusKind:
    def test_from_name(self):
        assert RadiusKind.from_name("Laplace") == RadiusKind.laplace()
        assert RadiusKind.from_name("peeling", 2.0).alpha == 2.0
        assert RadiusKind.from_name("peeling").alpha == 1.5

    def test_phase_not_selectable_by_name(self):
        with pytest.raises(ConfigError):
            RadiusKind.from_name("phase")

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            RadiusKind.from_name("bonferroni")

    def test_dispatch_matches_scalar_functions(self):
        n = np.array([3, 40])
        np.testing.assert_allclose(
            radius_array(RadiusKind.union(), n, delta=0.1, t=90),
            [union_radius(3, 90, 0.1), union_radius(40, 90, 0.1)],
        )
        assert radius(RadiusKind.peeling(1.5), 40, delta=0.1, t=90) == peeling_radius(40, 90, 0.1, 1.5)
        assert radius(RadiusKind.phase(1e6), 40, eps=0.5) == phase_radius(40, 0.5, 1e6, 1.5)


class TestFamilyOrdering:
    """Laplace is never wider than peeling and always tighter than union for n = t up to 10^6."""

    @pytest.mark.parametrize("n", [10**2, 10**3, 10**4, 10**5, 10**6])
    @pytest.mark.parametrize("alpha", [1.1, 1.5, 2.0])
    def test_laplace_tightest(self, n, alpha):
        lap = laplace_radius(n, 0.05)
        assert lap <= peeling_radius(n, n, 0.05, alpha)
        assert lap < union_radius(n, n, 0.05)

    def test_peeling_shell_count(self):
        assert math.ceil(math.log(1000) / 1.1) == 7
