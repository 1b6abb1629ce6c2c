import math

import numpy as np
import pytest

from ninjkit import DomainError
from ninjkit.conformal import (ConformalFactor, ExhaustionBands, FlatzoomerData, Polynomial,
                               bump_f, conformal_secfund, conformal_secfund_inverse,
                               conformal_sectional_curvature, convexified_range,
                               flatzoomer_check, phi_ab, quasi_flatzoomer_check, upsilon)
from ninjkit.errors import BandError, ShapeError


def slope(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2 * h)


class TestTransformationLaw:
    def test_examples(self):
        assert conformal_secfund(1, 1, 0, 0) == 1
        assert conformal_secfund(1, 1, 0, math.log(2)) == pytest.approx(0.5, abs=1e-15)
        lam, C = 1.7, 0.4
        assert conformal_secfund(0, 1, -lam, C) == pytest.approx(math.exp(-C) * lam, abs=1e-15)

    def test_inverse(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            ii, x2, dn, u = rng.normal(), rng.uniform(0.1, 3), rng.normal(), rng.normal()
            back = conformal_secfund_inverse(conformal_secfund(ii, x2, dn, u), x2, dn, u)
            assert back == pytest.approx(ii, abs=1e-12)

    def test_zero_vector(self):
        with pytest.raises(DomainError):
            conformal_secfund(1, 0, 0, 0)


class TestBumpAndStep:
    def test_bump(self):
        assert bump_f(0.5) == pytest.approx(math.exp(-2))
        assert bump_f(-1.0) == 0 and bump_f(1e-4) == 0
        assert np.all(bump_f(np.array([0.0, 0.01, 1.0])) >= 0)

    def test_phi_examples(self):
        assert phi_ab(1, 1, 0) == 0
        assert slope(lambda t: phi_ab(1, 1, t), 0.0) == pytest.approx(1.0, abs=1e-8)
        assert phi_ab(2, 0.5, 0.6) == 1.0 and phi_ab(2, 0.5, -0.6) == -1.0

    def test_phi_slope_and_oddness(self):
        for a, b in [(0.5, 2.0), (3.0, 0.2), (1.0, 1.0)]:
            assert slope(lambda t: phi_ab(a, b, t), 0.0, 1e-7 * b) == \
                pytest.approx(1 / (a * b * b), rel=1e-6)
            t = np.linspace(-1.5 * b, 1.5 * b, 101)
            assert np.array_equal(phi_ab(a, b, t), -phi_ab(a, b, -t))
            assert np.all(np.diff(phi_ab(a, b, t)) >= 0)

    def test_upsilon(self):
        assert upsilon(3, 1, 5, 0) == 5.0
        assert slope(lambda s: upsilon(3, 1, 5, s), 0.0) == pytest.approx(-3.0, abs=1e-7)
        assert upsilon(3, 1, 5, 1.0) == 4.0 and upsilon(3, 1, 5, -1.0) == 6.0

    def test_domain(self):
        with pytest.raises(DomainError):
            phi_ab(0, 1, 0.2)
        with pytest.raises(DomainError) as ei:
            upsilon(0, 1, 0, 0)
        assert ei.value.param == "lambda"


class TestConvexification:
    def test_examples(self):
        e = convexified_range(1, 0)
        assert (e.lo, e.hi) == (0.0, 2.0)
        assert convexified_range(1, math.log(2)).hi == pytest.approx(1.0, abs=1e-15)
        lam, C = 2.0, 0.7
        assert conformal_secfund(-lam, 1, -lam, C) == 0.0

    def test_random_inputs_land_in_range(self):
        rng = np.random.default_rng(1)
        for _ in range(500):
            lam, C = rng.uniform(0.01, 10), rng.uniform(-3, 3)
            ii = rng.uniform(-lam, lam)
            v = conformal_secfund(ii, 1.0, -lam, C)
            e = convexified_range(lam, C)
            assert e.lo <= v <= e.hi * (1 + 1e-15)


class TestSectionalCurvature:
    @staticmethod
    def factor(kind, x):
        # e^{2u} delta is the round (+1) or hyperbolic (-1) metric on a disc
        s = 1.0 if kind > 0 else -1.0
        q = 1 + s * x @ x
        u = math.log(2) - math.log(q)
        du = -2 * s * x / q
        H = -2 * s * np.eye(len(x)) / q + 4 * np.outer(x, x) / q ** 2
        return u, du, H

    @pytest.mark.parametrize("kind", [1, -1])
    def test_space_forms(self, kind):
        rng = np.random.default_rng(2)
        for _ in range(20):
            x = rng.uniform(-0.4, 0.4, 3)
            Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
            u, du, H = self.factor(kind, x)
            K = conformal_sectional_curvature(0.0, u, du, H, Q[:, 0], Q[:, 1])
            assert K == pytest.approx(kind, abs=1e-12)


class TestFlatzoomer:
    def setup_method(self):
        rng = np.random.default_rng(3)
        self.x = rng.uniform(-1, 1, (200, 2))
        self.u = rng.normal(size=200)
        self.du = rng.uniform(0, 2, 200)

    def factor(self):
        return ConformalFactor.sampled(self.u, [self.du])

    def test_equality_case_passes(self):
        phi = np.exp(-2 * self.u) * self.du ** 2
        fz = FlatzoomerData(alpha=2, degree=2, order=1, P=Polynomial([((0, 2), 1.0)]))
        v = flatzoomer_check(phi, self.factor(), fz, self.x)
        assert v.passed and not v.violations and not v.vacuous

    def test_weaker_decay_fails_where_u_positive(self):
        fz = FlatzoomerData(alpha=2, degree=0, order=0, P=Polynomial([((0,), 1.0)]))
        v = flatzoomer_check(np.exp(-self.u), ConformalFactor.sampled(self.u), fz, self.x)
        bad = {tuple(w.point) for w in v.violations}
        assert not v.passed
        assert bad == {tuple(p) for p in self.x[self.u > 0].tolist()}

    def test_threshold_makes_samples_vacuous(self):
        # exp(-3u) > exp(-2u) only where u < 0, and those samples lie below u0
        fz = FlatzoomerData(alpha=2, degree=0, order=0, P=Polynomial([((0,), 1.0)]), u0=0.0)
        phi = np.exp(-3 * self.u)
        assert not flatzoomer_check(phi, ConformalFactor.sampled(self.u),
                                    FlatzoomerData(alpha=2, degree=0, order=0,
                                                   P=Polynomial([((0,), 1.0)])), self.x).passed
        v = flatzoomer_check(phi, ConformalFactor.sampled(self.u), fz, self.x)
        assert v.passed
        assert v.vacuous == np.flatnonzero(self.u <= 0).tolist()

    def test_per_sample_threshold(self):
        u0 = np.where(np.arange(200) % 2 == 0, np.inf, -np.inf)
        fz = FlatzoomerData(alpha=2, degree=0, order=0, P=Polynomial([((0,), 1.0)]), u0=u0)
        v = flatzoomer_check(np.zeros(200), ConformalFactor.sampled(self.u), fz, self.x)
        assert v.vacuous == list(range(0, 200, 2))
        with pytest.raises(ShapeError):
            FlatzoomerData(alpha=2, degree=0, order=0, P=Polynomial([((0,), 1.0)]),
                           u0=u0[:5]).u0_values(self.x)

    def test_affine_conformal_curvature(self):
        # sectional curvatures of e^{2u} delta with affine u are bounded by e^{-2u} |du|^2
        rng = np.random.default_rng(4)
        a = rng.normal(size=3)
        pts = rng.uniform(-1, 1, (100, 3))
        u = pts @ a + 0.3
        phi = []
        for ui in u:
            worst = 0.0
            for _ in range(10):
                Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
                K = conformal_sectional_curvature(0.0, ui, a, np.zeros((3, 3)), Q[:, 0], Q[:, 1])
                worst = max(worst, abs(K))
            phi.append(worst)
        grad = np.full(100, np.linalg.norm(a))
        fz = FlatzoomerData(alpha=2, degree=2, order=2,
                            P=Polynomial([((0, 2, 0), 1.0), ((0, 0, 1), 2.0)]))
        v = flatzoomer_check(phi, ConformalFactor.sampled(u, [grad, np.zeros(100)]), fz, pts)
        assert v.passed

    def test_per_sample_coefficients(self):
        coef = np.linspace(0.5, 1.5, 200)
        P = Polynomial([((0, 1), coef)])
        out = P(self.x, np.column_stack([self.u, self.du]))
        assert np.allclose(out, coef * self.du)

    def test_validation(self):
        with pytest.raises(DomainError) as ei:
            FlatzoomerData(alpha=0, degree=1, order=0, P=Polynomial([((1,), 1.0)]))
        assert ei.value.param == "alpha"
        with pytest.raises(DomainError):
            FlatzoomerData(alpha=1, degree=1, order=1, P=Polynomial([((0, 2), 1.0)]))
        with pytest.raises(ShapeError):
            FlatzoomerData(alpha=1, degree=2, order=2, P=Polynomial([((0, 2), 1.0)]))
        fz = FlatzoomerData(alpha=2, degree=2, order=1, P=Polynomial([((0, 2), 1.0)]))
        with pytest.raises(ShapeError):
            flatzoomer_check(np.ones(3), self.factor(), fz, self.x)
        with pytest.raises(ShapeError):
            flatzoomer_check(np.ones(200), ConformalFactor.sampled(self.u), fz, self.x)


class TestQuasiFlatzoomer:
    def setup_method(self):
        self.r = np.linspace(0, 4, 400, endpoint=False)
        self.x = self.r[:, None]
        self.u = 0.5 * self.r
        self.du = np.full(400, 0.5)
        self.bands = ExhaustionBands(np.floor(self.r).astype(int))
        self.fz = FlatzoomerData(alpha=2, degree=2, order=1, P=Polynomial([((0, 2), 1.0)]))

    def factor(self):
        return ConformalFactor.sampled(self.u, [self.du])

    def test_single_band_reduces_to_pointwise(self):
        phi = np.exp(-2 * self.u) * self.du ** 2
        one = ExhaustionBands(np.zeros(400, dtype=int))
        v = quasi_flatzoomer_check(phi, self.factor(), self.fz, one, self.x)
        assert v.passed
        bound = np.max(np.exp(-2 * self.u) * self.du ** 2)
        spike = phi.copy()
        spike[10] = 2 * bound
        assert not quasi_flatzoomer_check(spike, self.factor(), self.fz, one, self.x).passed

    def test_pointwise_pass_is_inherited(self):
        phi = np.exp(-2 * self.u) * self.du ** 2
        assert quasi_flatzoomer_check(phi, self.factor(), self.fz, self.bands, self.x).passed

    def test_sup_over_neighbouring_bands_is_allowed(self):
        # values above the pointwise bound but below the band-neighbourhood sup pass
        rhs = np.exp(-2 * self.u) * self.du ** 2
        phi = rhs.copy()
        phi[self.r >= 3] = rhs[self.r >= 2].max() * 0.999
        assert not flatzoomer_check(phi, self.factor(), self.fz, self.x).passed
        assert quasi_flatzoomer_check(phi, self.factor(), self.fz, self.bands, self.x).passed

    def test_spike_is_reported(self):
        phi = np.exp(-2 * self.u) * self.du ** 2
        i = 350
        phi[i] = 10.0
        v = quasi_flatzoomer_check(phi, self.factor(), self.fz, self.bands, self.x)
        assert not v.passed and [w.point for w in v.violations] == [[self.r[i]]]

    def test_band_errors(self):
        phi = np.zeros(400)
        gap = ExhaustionBands(np.where(self.r < 2, 0, 2))
        with pytest.raises(BandError):
            quasi_flatzoomer_check(phi, self.factor(), self.fz, gap, self.x)
        with pytest.raises(BandError):
            quasi_flatzoomer_check(phi, self.factor(), self.fz, ExhaustionBands(-np.ones(400)),
                                   self.x)
