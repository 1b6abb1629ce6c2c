import math

import numpy as np
import pytest

from ninjkit import INF, DomainError, InsufficientSamples, NotFound, UnreachableConfig
from ninjkit.oracle_lab import (GraphHypersurface, ModelTriangle, ProductMetric,
                                bitangent_sphere_search, comparison_angle, empirical_ninj,
                                flat_metric, gaussian_bump, geodesic_sphere_exact_ninj,
                                graph_normal, graph_secfund, law_of_cosines_side, paraboloid,
                                plane, polynomial, principal_curvatures, quadric,
                                radial_angle_empirical, reach_sample, sample_surface,
                                secfund_norms, sphere_cap, warped_metric)
from ninjkit.oracle_lab.experiments import (NAMED_EXPERIMENTS, DescriptorError, run_experiment,
                                            validate_descriptor)
from ninjkit.oracle_lab.lab import lattice_samples


class TestModelGeometry:
    def test_exact_ninj_examples(self):
        assert geodesic_sphere_exact_ninj(0, 1) == 1
        assert geodesic_sphere_exact_ninj(1, math.pi / 4) == pytest.approx(math.pi / 4)
        assert geodesic_sphere_exact_ninj(1, 3 * math.pi / 4) == pytest.approx(math.pi / 4)
        assert geodesic_sphere_exact_ninj(-1, 2) == 2
        with pytest.raises(DomainError):
            geodesic_sphere_exact_ninj(1, math.pi)

    @pytest.mark.parametrize("c", [-1.0, 0.0, 1.0])
    def test_triangle_angles_recover_sides(self, c):
        T = ModelTriangle(c, 0.7, 0.9, 1.1)
        A, B, G = T.angles()
        assert G == 1.1
        assert law_of_cosines_side(c, 0.9, T.side_c, A) == pytest.approx(0.7, abs=1e-12)
        assert law_of_cosines_side(c, 0.7, T.side_c, B) == pytest.approx(0.9, abs=1e-12)

    def test_angle_sum(self):
        tri = {c: sum(ModelTriangle(c, 0.5, 0.6, 1.0).angles()) for c in (-1.0, 0.0, 1.0)}
        assert tri[-1.0] < math.pi < tri[1.0]
        assert tri[0.0] == pytest.approx(math.pi, abs=1e-12)


class TestComparisonAngle:
    def test_examples(self):
        assert comparison_angle(0, 1, 0.5, 0.75) == pytest.approx(math.acos(0.875), abs=1e-12)
        assert comparison_angle(0, 0, 0.5, 1.0) == pytest.approx(math.pi / 3, abs=1e-12)
        for c, lam in [(0, 1), (1, 0.3), (-1, 2), (-1, 0.5), (-1, 1), (1, -0.4)]:
            assert comparison_angle(c, lam, 0.2, 0.2) == 0.0

    @staticmethod
    def _perpendicular_chord(c, R, e):
        # length of the segment from p, perpendicular to the normal line, to the circle
        if c == 0:
            return math.sqrt(R * R - e * e)
        if c > 0:
            return math.acos(math.cos(R) / math.cos(e))
        return math.acosh(math.cosh(R) / math.cosh(e))

    @pytest.mark.parametrize("c,lam", [(0, 1), (0, 0.2), (1, 0), (1, 0.7), (1, 3.0), (-1, 1.6),
                                       (-1, 4.0)])
    def test_circles_nondecreasing_up_to_perpendicular_chord(self, c, lam):
        d0 = 0.2
        if c == 0:
            R = 1 / lam
        elif c > 0:
            R = math.atan2(1.0, lam)
        else:
            R = math.atanh(1 / lam)
        peak = self._perpendicular_chord(c, R, R - d0)
        d = np.linspace(d0, peak, 300)
        phi = np.array([comparison_angle(c, lam, d0, x) for x in d])
        assert np.all(np.diff(phi) >= -1e-12)
        beyond = [comparison_angle(c, lam, d0, x) for x in np.linspace(peak, peak * 1.2, 20)]
        assert max(beyond) <= phi[-1] + 1e-12

    @pytest.mark.parametrize("c,lam", [(0, 0), (-1, 0.0), (-1, 0.4), (-1, 1.0)])
    def test_open_curves_nondecreasing(self, c, lam):
        d = np.linspace(0.2, 0.6, 200)
        phi = [comparison_angle(c, lam, 0.2, x) for x in d]
        assert np.all(np.diff(phi) >= -1e-12)

    @pytest.mark.parametrize("c", [-1.0, 0.0, 1.0])
    def test_continuous_across_regimes(self, c):
        for lam in (-1.0, 0.0, 1.0):
            lo = comparison_angle(c, lam - 1e-7, 0.3, 0.6)
            hi = comparison_angle(c, lam + 1e-7, 0.3, 0.6)
            assert lo == pytest.approx(hi, abs=1e-6)

    def test_more_curvature_toward_p_means_smaller_angle(self):
        vals = [comparison_angle(0, lam, 0.3, 0.8) for lam in (-2, -1, 0, 0.5, 1)]
        assert np.all(np.diff(vals) < 0)

    def test_hyperbolic_sphere_matches_rescaled_law_of_cosines(self):
        # lam = coth(R) is the curvature of the circle of radius R about the centre
        R = 0.8
        phi = comparison_angle(-1, 1 / math.tanh(R), 0.3, 0.6)
        e = R - 0.3
        cos_g = (math.cosh(R) * math.cosh(0.6) - math.cosh(e)) / (math.sinh(R) * math.sinh(0.6))
        assert phi == pytest.approx(math.acos(cos_g), abs=1e-12)

    def test_unreachable(self):
        with pytest.raises(UnreachableConfig):
            comparison_angle(0, 1, 0.5, 2.0)
        with pytest.raises(UnreachableConfig):
            comparison_angle(0, 0, 0.5, 0.4)
        with pytest.raises(DomainError):
            comparison_angle(0, 0, 0.0, 1.0)


class TestGraphGeometry:
    def test_normal_examples(self):
        x = np.array([0.2, -0.1])
        assert graph_normal(plane(3), flat_metric(3), x) == pytest.approx([0, 0, 1])
        a = 0.7
        n = graph_normal(plane(3, slope=[a, 0]), flat_metric(3), x)
        assert n == pytest.approx(np.array([-a, 0, 1]) / math.sqrt(1 + a * a), abs=1e-15)
        assert graph_normal(plane(3, height=0.4), warped_metric(3), x) == pytest.approx([0, 0, 1])

    def test_secfund_examples(self):
        e1 = np.array([1.0, 0.0])
        assert graph_secfund(paraboloid(3), flat_metric(3), np.zeros(2), e1, e1) == 1.0
        g = warped_metric(3)
        X, Y = np.array([0.3, 1.0]), np.array([-2.0, 0.5])
        assert graph_secfund(plane(3), g, np.zeros(2), X, Y) == pytest.approx(X @ Y, abs=1e-15)

    def test_flat_reduction_on_quadratics(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            A = rng.normal(size=(2, 2))
            b = rng.normal(size=2)
            h = quadric(3, A, b)
            x, X, Y = rng.uniform(-0.5, 0.5, 2), rng.normal(size=2), rng.normal(size=2)
            g = b + x @ (0.5 * (A + A.T))
            expect = X @ (0.5 * (A + A.T)) @ Y / math.sqrt(1 + g @ g)
            assert graph_secfund(h, flat_metric(3), x, X, Y) == pytest.approx(expect, abs=1e-12)

    def test_unit_sphere_curvatures(self):
        h = sphere_cap(3)
        x = lattice_samples(2, np.zeros(2), 0.9, 500, 0)
        assert np.allclose(principal_curvatures(h, x), 1.0, atol=1e-9)
        assert np.allclose(secfund_norms(h, x), 1.0, atol=1e-9)

    def test_christoffel_symbols_of_warped_metric(self):
        g = warped_metric(3, rate=0.5)
        G = g.christoffel(0.2, np.zeros(2))
        assert np.allclose(G, 0.0)  # g_t does not depend on x
        gx = ProductMetric(3, lambda t, x: (1 + x[0] ** 2) * np.eye(2),
                           lambda t, x: np.zeros((2, 2)),
                           lambda t, x: np.stack([2 * x[0] * np.eye(2), np.zeros((2, 2))]))
        G = gx.christoffel(0.0, np.array([0.5, 0.0]))
        w = 1.25
        assert G[0, 0, 0] == pytest.approx(0.5 / w) and G[0, 1, 1] == pytest.approx(-0.5 / w)
        assert G[1, 1, 0] == pytest.approx(0.5 / w) and G[1, 0, 0] == 0

    def test_finite_difference_fallback(self):
        exact = gaussian_bump(3, 0.4, 0.6)
        fd = GraphHypersurface(3, 1.0, f=exact.f)
        x = np.array([[0.1, 0.3], [-0.4, 0.2]])
        assert np.allclose(fd.gradient(x), exact.gradient(x), atol=1e-8)
        assert np.allclose(fd.hessian(x), exact.hessian(x), atol=1e-5)

    def test_polynomial_derivatives(self):
        h = polynomial(3, [((2, 1), 1.5), ((0, 3), -0.5)])
        x = np.array([[0.3, -0.2]])
        assert h.gradient(x)[0] == pytest.approx([3 * 0.3 * -0.2, 1.5 * 0.09 - 1.5 * 0.04])
        assert np.allclose(h.hessian(x)[0], [[3 * -0.2, 3 * 0.3], [3 * 0.3, -3 * -0.2]], atol=1e-15)


class TestEmpiricalNinj:
    def test_unit_sphere(self):
        v = empirical_ninj(sphere_cap(3), np.zeros(2), 0.9, 10000, seed=0)
        assert 0.98 <= v <= 1.0

    def test_plane_is_infinite(self):
        assert empirical_ninj(plane(3), np.zeros(2), 0.5, 500) is INF

    def test_parallel_planes(self):
        h = 0.15
        v = empirical_ninj([plane(3), plane(3, height=2 * h)], np.zeros(2), 0.5, 500, seed=3)
        assert v == pytest.approx(h, abs=1e-12)

    def test_deterministic_given_seed(self):
        s = sphere_cap(3, 1.5)
        a = empirical_ninj(s, np.zeros(2), 0.8, 800, seed=5)
        assert a == empirical_ninj(s, np.zeros(2), 0.8, 800, seed=5)

    def test_dense_matrix_agrees_with_blocked_minimum(self):
        h = gaussian_bump(3, 0.3, 0.4)
        R = reach_sample(h, np.zeros(2), 0.6, 600, seed=1)
        dense = min(R.focal_term.min(), R.pairwise_rolling.min())
        assert empirical_ninj(h, np.zeros(2), 0.6, 600, seed=1) == pytest.approx(dense, rel=1e-12)

    def test_estimate_shrinks_towards_truth(self):
        s = sphere_cap(3, 1.0)
        est = [empirical_ninj(s, np.zeros(2), 0.9, n) for n in (200, 2000, 10000)]
        assert all(1.0 + 1e-12 >= e >= 0.98 for e in est)

    def test_insufficient_samples(self):
        with pytest.raises(InsufficientSamples) as ei:
            sample_surface(sphere_cap(3), np.zeros(2), 0.9, 20, 0)
        assert ei.value.param == "n_samples"

    def test_window_must_fit_disc(self):
        with pytest.raises(DomainError):
            empirical_ninj(sphere_cap(3), np.zeros(2), 0.99, 500)


class TestRadialAngle:
    def test_normal_line(self):
        h = gaussian_bump(3, 0.3, 0.5)
        q = np.array([0.3, 0.1])
        Q = h.points(q)
        nu = np.append(-h.gradient(q), 1.0)
        p = Q + 0.2 * nu / np.linalg.norm(nu)
        assert radial_angle_empirical(h, p, q) == pytest.approx(0.0, abs=1e-7)

    def test_sphere_centre(self):
        h = sphere_cap(3)
        for q in lattice_samples(2, np.zeros(2), 0.9, 30, 2):
            assert radial_angle_empirical(h, np.array([0, 0, 1.0]), q) == pytest.approx(0, abs=1e-7)

    def test_plane_matches_model(self):
        d0, d = 0.5, 1.3
        q = np.array([math.sqrt(d * d - d0 * d0), 0.0])
        phi = radial_angle_empirical(plane(3, disc_radius=2.0), np.array([0, 0, d0]), q)
        assert phi == pytest.approx(comparison_angle(0, 0, d0, d), abs=1e-12)


class TestBitangent:
    def test_two_bumps(self):
        gap, a = 1.0, 0.1
        charts = [gaussian_bump(3, a, 0.5), gaussian_bump(3, -a, 0.5, base=gap)]
        res = bitangent_sphere_search(charts, np.zeros(2), 1.0, n_samples=3000)
        d = 0.5 * (gap - 2 * a)
        assert res.r0 == pytest.approx(d, abs=1e-6)
        assert res.s == pytest.approx([0, 0, gap - a], abs=1e-3)

    def test_unit_sphere_distance_property(self):
        h = sphere_cap(3, R := 1.0)
        res = bitangent_sphere_search([h, sphere_cap(3, R, upper=True)], np.zeros(2), 1.0,
                                      n_samples=3000)
        assert res.r0 == pytest.approx(1.0, abs=1e-6)
        assert np.linalg.norm(res.s - res.centre) == pytest.approx(res.r0, abs=1e-9)

    def test_paraboloid_small_ball_not_found(self):
        with pytest.raises(NotFound):
            bitangent_sphere_search(paraboloid(3), np.zeros(2), 0.9, n_samples=2000)

    def test_touching_point_is_on_the_sphere(self):
        h = gaussian_bump(3, 0.4, 0.3)
        res = bitangent_sphere_search(h, np.array([0.5, 0.0]), 2.0, n_samples=3000, side=1)
        assert np.linalg.norm(res.s - res.centre) == pytest.approx(res.r0, rel=1e-9)
        assert np.linalg.norm(res.p - res.centre) == pytest.approx(res.r0, rel=1e-12)


class TestExperiments:
    def test_named_unit_sphere(self):
        out = run_experiment(NAMED_EXPERIMENTS["unit-sphere-ninj"])
        assert out["bound"] == 0.2 and 0.98 <= out["empirical"] <= 1.0
        assert out["ratio"] == pytest.approx(0.2, rel=0.03)

    @pytest.mark.parametrize("name", ["paraboloid-ninj", "bump-pair-ninj"])
    def test_bound_below_estimate(self, name):
        out = run_experiment(NAMED_EXPERIMENTS[name])
        assert out["bound"] <= out["empirical"]

    def test_schema(self):
        with pytest.raises(DescriptorError):
            validate_descriptor({"kind": "torus", "window": 0.5, "n_samples": 100})
        with pytest.raises(DescriptorError):
            validate_descriptor({"kind": "paraboloid", "window": 0.5, "n_samples": 100,
                                 "colour": "red"})
        with pytest.raises(DescriptorError):
            validate_descriptor({"kind": "paraboloid", "n_samples": 100})

    def test_custom_polynomial(self):
        out = run_experiment({"kind": "custom polynomial", "terms": [[2, 0, 0.5], [0, 2, 0.5]],
                              "window": 0.5, "n_samples": 1500})
        assert out["bound"] <= out["empirical"] == pytest.approx(1.0, rel=0.05)
