import math
from itertools import product

import numpy as np
import pytest

from spectraljet.asymptotics import normalization_factor, time_grid
from spectraljet.manifolds import (
    Circle,
    FlatTorus,
    PolynomialField,
    Sphere,
    TruncationError,
    TruncationPolicy,
    curvature_symmetry_residuals,
    gauss_curvature_difference,
    gauss_curvature_estimate,
    jet_gram,
    levi_civita_check,
    make_model,
    mean_curvature_proxy,
    pullback_metric,
    ricci_scalar_extract,
    heat_kernel_diag_jet,
    squared_distance_jets,
    squared_distance_target,
    third_jet_umbilical,
    truncation_stability,
)
from spectraljet.multiindex import empty, enumerate_multiindices, from_indices
from spectraljet.wick import wick_a

GRID = time_grid()


def mi(indices, n):
    return from_indices(indices, n)


class TestModelBasics:
    def test_factory(self):
        assert make_model("circle", radius=2.0).volume == pytest.approx(4 * math.pi)
        assert make_model("torus", radii=(1.0, 1.3)).n == 2
        assert make_model("sphere2", radius=2.0).scalar_curvature == pytest.approx(0.5)
        assert make_model("sphere3").scalar_curvature == pytest.approx(6.0)
        with pytest.raises(ValueError):
            make_model("klein_bottle")
        with pytest.raises(ValueError):
            make_model("torus")

    def test_validation(self):
        s = Sphere(3, 1.0)
        a = mi([1], 3)
        with pytest.raises(ValueError):
            s.diag_jet(-0.1, a, a)
        with pytest.raises(ValueError):
            s.diag_jet(0.1, mi([1], 2), mi([1], 2))
        with pytest.raises(ValueError):
            s.diag_jet(0.1, mi([1] * 5, 3), mi([1] * 5, 3))
        with pytest.raises(ValueError):
            Sphere(4, 1.0)
        with pytest.raises(ValueError):
            FlatTorus(())
        with pytest.raises(ValueError):
            TruncationPolicy(mode="fixed_cutoff")
        with pytest.raises(ValueError):
            TruncationPolicy(mode="weird")

    def test_heat_kernel_diagonal_positive_decreasing(self):
        for model in (Circle(1.0), FlatTorus((1.0, 1.3)), Sphere(2, 1.0), Sphere(3, 1.0)):
            values = [model.heat_diagonal(t) for t in (0.05, 0.1, 0.2, 0.5, 1.0)]
            assert all(v > 0 for v in values)
            assert values == sorted(values, reverse=True)


class TestFlatJets:
    def test_circle_normalized_jets_all_degrees(self):
        c = Circle(1.0)
        t = 0.01
        for a_deg in range(0, 7):
            for b_deg in range(0, 7 - a_deg):
                a = mi([1] * a_deg, 1)
                b = mi([1] * b_deg, 1)
                target = wick_a(a, b).value
                got = normalization_factor(1, t, a, b) * c.diag_jet(t, a, b)
                assert abs(got - target) < 1e-6, (a_deg, b_deg)

    def test_odd_jets_exactly_zero(self):
        T = FlatTorus((1.0, 1.3))
        assert T.diag_jet(0.05, mi([1], 2), empty(2)) == 0.0
        assert T.diag_jet(0.05, mi([1, 2], 2), mi([2], 2)) == 0.0

    def test_symmetry_in_pair(self):
        T = FlatTorus((1.0, 1.3))
        a, b = mi([1, 1], 2), mi([2, 2], 2)
        assert T.diag_jet(0.05, a, b) == T.diag_jet(0.05, b, a)

    def test_point_independence_via_embedding(self):
        # differentiate the finite embedding Gram at two base points; the
        # jets must agree with each other and with the closed form
        c = Circle(1.0)
        t = 0.05
        h = 1e-3
        target = c.diag_jet(t, mi([1], 1), mi([1], 1))
        for x0 in (0.3, 1.1):
            def gram(dx, dy):
                px = c.embedding_point(t, (x0 + dx,), 40)
                py = c.embedding_point(t, (x0 + dy,), 40)
                return float(np.dot(px, py)) / c.gram_prefactor(t)

            fd = (
                gram(h, h) - gram(h, -h) - gram(-h, h) + gram(-h, -h)
            ) / (4 * h * h)
            # cross-derivative d/dx d/dy of H(x, y); signs: y-derivative only
            assert abs(fd - target) < 1e-4 * abs(target)

    def test_embedding_gram_matches_kernel(self):
        T = FlatTorus((1.0, 1.3))
        t = 0.05
        x = (0.2, -0.4)
        y = (0.1, 0.3)
        px = T.embedding_point(t, x, 30)
        py = T.embedding_point(t, y, 30)
        lhs = float(np.dot(px, py))
        rhs = T.gram_prefactor(t) * (T.kernel_value(t, x, y) - 1.0 / T.volume)
        assert abs(lhs - rhs) < 1e-12


class TestSphereJets:
    def test_pair_symmetry_exact(self):
        s = Sphere(3, 1.0)
        a, b = mi([1, 1], 3), mi([2, 2], 3)
        assert s.diag_jet(0.05, a, b) == s.diag_jet(0.05, b, a)
        assert heat_kernel_diag_jet(s, 0.05, a, b) == s.diag_jet(0.05, a, b)

    def test_odd_jets_exactly_zero(self):
        s = Sphere(2, 1.0)
        assert s.diag_jet(0.05, mi([1], 2), empty(2)) == 0.0
        assert s.diag_jet(0.05, mi([1, 1], 2), mi([2], 2)) == 0.0

    def test_normalized_jets_converge(self):
        s = Sphere(3, 1.0)
        a = mi([1, 2], 3)
        errs = []
        for t in (0.05, 0.025, 0.0125, 0.00625):
            got = normalization_factor(3, t, a, a) * s.diag_jet(t, a, a)
            errs.append(abs(got - 1.0))
        assert errs == sorted(errs, reverse=True)
        assert errs[-1] < 0.01

    def test_finite_difference_cross_check(self):
        # jets vs 4th-order central differences of the closed-form zonal
        # kernel along chart 2-parameter families
        from tests.test_jets import fd_mixed_partial

        for model in (Sphere(2, 1.0), Sphere(3, 1.0)):
            t = 0.1
            n = model.n
            cases = [
                (mi([1], n), mi([1], n)),
                (mi([1], n), mi([2], n)),
                (mi([1, 1], n), mi([1], n)),
                (mi([1, 2], n), mi([2], n)),
            ]
            for a, b in cases:
                want = model.diag_jet(t, a, b)

                def f(point):
                    return model.kernel_value(t, point[:n], point[n:])

                fd = fd_mixed_partial(f, a.counts + b.counts, h=0.02)
                scale = max(1.0, abs(want))
                assert abs(fd - want) < 1e-5 * scale, (model.label, a, b)


class TestSphere3ImageSum:
    def test_kernel_matches_jacobi_image_sum(self):
        # independent closed form from the theta transformation:
        # H(t, theta) = e^t (4 pi t)^(-3/2) sum_j (theta + 2 pi j)/sin(theta)
        #               * exp(-(theta + 2 pi j)^2 / (4t))   (unit radius)
        def image_sum(t, theta):
            total = 0.0
            for j in range(-4, 5):
                ang = theta + 2.0 * math.pi * j
                total += ang * math.exp(-ang * ang / (4.0 * t))
            return math.exp(t) * (4.0 * math.pi * t) ** -1.5 * total / math.sin(theta)

        for radius in (1.0, 2.0):
            s = Sphere(3, radius)
            for t in (0.05, 0.2):
                for u, v in (((0.3, 0.0, 0.0), (0.0, 0.2, 0.1)),
                             ((0.5, -0.2, 0.1), (-0.1, 0.4, 0.0))):
                    theta = math.acos(s.chart_cosine(u, v))
                    want = image_sum(t / radius**2, theta) / radius**3
                    got = s.kernel_value(t, u, v)
                    assert abs(got - want) <= 1e-12 * abs(want), (radius, t)


class TestJetGram:
    def test_symmetric_and_psd(self):
        for model in (FlatTorus((1.0, 1.3)), Sphere(3, 1.0)):
            g = jet_gram(model, 0.05, 2)
            m = g.matrix()
            assert np.allclose(m, m.T, rtol=0, atol=1e-12)
            eig = np.linalg.eigvalsh(m)
            assert eig.min() > -1e-9

    def test_psd_higher_order_jet_sets(self):
        # Gram matrices of Hilbert-space vectors stay PSD at higher jet order
        for model, order in ((Sphere(2, 1.0), 3), (Circle(1.0), 4)):
            m = jet_gram(model, 0.05, order).matrix()
            eig = np.linalg.eigvalsh(m)
            assert eig.min() > -1e-9, model.label

    def test_torus_first_order_identity(self):
        g = jet_gram(FlatTorus((1.0, 1.3)), 0.01, 1)
        for i in (1, 2):
            for j in (1, 2):
                want = 1.0 if i == j else 0.0
                assert abs(g.entry(mi([i], 2), mi([j], 2)) - want) < 1e-8

    def test_pure_second_jet_length(self):
        s = Sphere(3, 1.0)
        a = mi([1, 1], 3)
        vals = [2 * t * s.gram_entry(t, a, a) for t in (0.05, 0.025, 0.0125)]
        errs = [abs(v - 3.0) for v in vals]
        assert errs == sorted(errs, reverse=True)
        assert errs[-1] < 0.03

    def test_mixed_second_first_vanishes(self):
        s = Sphere(3, 1.0)
        vals = [
            abs(s.gram_entry(t, mi([1], 3), mi([2, 3], 3)))
            for t in (0.05, 0.025)
        ]
        assert all(v == 0.0 for v in vals)  # parity-blocked exactly
        # a non-parity-blocked odd pair decays like O(t) after normalization
        g = [
            normalization_factor(3, t, mi([1], 3), mi([1, 1], 3))
            * s.diag_jet(t, mi([1], 3), mi([1, 1], 3))
            for t in (0.05, 0.025)
        ]
        assert all(v == 0.0 for v in g)

    def test_order_cap(self):
        with pytest.raises(ValueError):
            jet_gram(Circle(1.0), 0.05, 5)


class TestGeometryOps:
    def test_pullback_metric_torus(self):
        p = pullback_metric(FlatTorus((1.0, 1.3)), 0.01)
        assert np.allclose(p, np.eye(2), atol=1e-8)

    def test_scalar_ricci_sphere3(self):
        report = ricci_scalar_extract(Sphere(3, 1.0), GRID)
        assert abs(report.scalar_estimate - 6.0) < 0.12
        assert np.allclose(report.pullback_c1, np.eye(3) / 3, atol=0.017)
        assert np.allclose(report.ricci_estimate, 2.0 * np.eye(3), atol=0.1)
        assert report.condition_number < 1e12

    def test_scalar_ricci_torus(self):
        report = ricci_scalar_extract(FlatTorus((1.0, 1.3)), GRID)
        assert abs(report.scalar_estimate) < 1e-6
        assert np.allclose(report.ricci_estimate, 0.0, atol=1e-6)

    def test_mean_curvature_targets(self):
        cases = [
            (Circle(1.0), math.sqrt(1.5)),
            (FlatTorus((1.0, 1.3)), 1.0),
            (Sphere(3, 1.0), math.sqrt(5.0 / 6.0)),
        ]
        for model, target in cases:
            got = mean_curvature_proxy(model, 0.004)
            assert abs(got - target) < 0.02 * target, model.label

    def test_third_jet_umbilical_cases(self):
        for model in (Sphere(3, 1.0), FlatTorus((1.0, 1.3))):
            t = 0.005
            assert abs(third_jet_umbilical(model, t, 1, 1, 1) + 3.0) < 0.09
            assert abs(third_jet_umbilical(model, t, 1, 1, 2) + 1.0) < 0.03
            assert abs(third_jet_umbilical(model, t, 1, 2, 1)) < 0.05

    def test_gauss_curvature_flat_exact_zero(self):
        T = FlatTorus((1.0, 1.3))
        for idx in product((1, 2), repeat=4):
            assert gauss_curvature_difference(T, 0.05, idx) == pytest.approx(0.0, abs=1e-12)

    def test_gauss_curvature_sphere3(self):
        est = gauss_curvature_estimate(Sphere(3, 1.0), GRID, (1, 2, 2, 1))
        assert abs(est.value - 1.0) < 0.05
        assert not est.cancellation_limited

    def test_gauss_curvature_sphere2_radius2(self):
        est = gauss_curvature_estimate(Sphere(2, 2.0), GRID, (1, 2, 2, 1))
        assert abs(est.value - 0.25) < 0.0125

    def test_symmetry_residuals_sphere3(self):
        report = curvature_symmetry_residuals(Sphere(3, 1.0), GRID)
        assert report.max_abs > 0.9
        assert report.max_relative_residual() < 1e-3
        # the forced-zero entries R(1,1,k,l) vanish through antisymmetry
        assert abs(report.tensor[0, 0, 1, 2]) < 1e-3

    def test_levi_civita_parallel_field(self):
        s = Sphere(2, 1.0)
        rep = levi_civita_check(s, GRID, 1, PolynomialField(direction=2))
        assert rep.max_abs_error < 1e-6

    def test_levi_civita_linear_field(self):
        s = Sphere(2, 1.0)
        # f = x^1, so nabla_1 (f V_2) = V_2 at the base point
        field = PolynomialField(direction=2, linear=(1.0, 0.0))
        rep = levi_civita_check(s, GRID, 1, field)
        assert abs(rep.limit_vector[1] - 1.0) < 0.03
        assert abs(rep.limit_vector[0]) < 0.03

    def test_levi_civita_transverse_gradient(self):
        s = Sphere(2, 1.0)
        # f = x^2 has zero 1-derivative at the base point
        field = PolynomialField(direction=2, linear=(0.0, 1.0))
        rep = levi_civita_check(s, GRID, 1, field)
        assert rep.max_abs_error < 0.05


class TestSquaredDistanceJets:
    def test_full_catalog_unit_sphere2(self):
        s = Sphere(2, 1.0)
        basis = enumerate_multiindices(2, 4)
        checked = 0
        for a in basis:
            for b in basis:
                if not 1 <= a.degree + b.degree <= 4:
                    continue
                got = squared_distance_jets(s, a, b)
                want = squared_distance_target(s, a, b)
                assert abs(got - want) < 1e-8, (a, b)
                checked += 1
        assert checked == 69

    def test_mixed_fourth_jet_value(self):
        s = Sphere(2, 1.0)
        got = squared_distance_jets(s, mi([1, 1], 2), mi([2, 2], 2))
        # -(2/3)(R_1212 + R_1212) with R_1212 = +1
        assert abs(got + 4.0 / 3.0) < 1e-12

    def test_radius_scaling(self):
        s = Sphere(2, 2.0)
        got = squared_distance_jets(s, mi([1, 1], 2), mi([2, 2], 2))
        want = squared_distance_target(s, mi([1, 1], 2), mi([2, 2], 2))
        assert abs(got - want) < 1e-10
        assert abs(want + (2.0 / 3.0) * 2 * 0.25) < 1e-15

    def test_sphere3_catalog_sample(self):
        s = Sphere(3, 1.0)
        for a_idx, b_idx in (([1], [1]), ([1, 2], [1, 2]), ([1, 1], [2, 2]),
                             ([1, 2], [3, 3]), ([1, 2, 3], [1])):
            a, b = mi(a_idx, 3), mi(b_idx, 3)
            got = squared_distance_jets(s, a, b)
            want = squared_distance_target(s, a, b)
            assert abs(got - want) < 1e-8

    def test_rejects_flat_model_and_high_order(self):
        with pytest.raises(ValueError):
            squared_distance_jets(FlatTorus((1.0,)), mi([1], 1), mi([1], 1))
        s = Sphere(2, 1.0)
        with pytest.raises(ValueError):
            squared_distance_jets(s, mi([1, 1, 2], 2), mi([1, 2], 2))


class TestTruncation:
    def test_circle_stability(self):
        rep = truncation_stability(Circle(1.0), 0.01, mi([1, 1], 1), mi([1, 1], 1))
        assert rep.delta < 1e-10

    def test_sphere_stability_degree4(self):
        rep = truncation_stability(
            Sphere(3, 1.0), 0.05, mi([1, 1], 3), mi([2, 2], 3)
        )
        assert rep.delta < 1e-9

    def test_large_time_tiny_cutoff(self):
        rep = truncation_stability(Circle(1.0), 1.0, mi([1], 1), mi([1], 1))
        assert rep.delta < 1e-14
        assert rep.cutoff < 40

    def test_hard_cap_raises(self):
        policy = TruncationPolicy(hard_cap=5)
        with pytest.raises(TruncationError):
            Circle(1.0).diag_jet(0.001, mi([1, 1], 1), mi([1, 1], 1), policy)

    def test_fixed_cutoff_mode(self):
        c = Circle(1.0)
        a = mi([1], 1)
        policy = TruncationPolicy(mode="fixed_cutoff", fixed_cutoff=200)
        v1 = c.diag_jet(0.05, a, a, policy)
        v2 = c.diag_jet(0.05, a, a)
        assert abs(v1 - v2) < 1e-12


class TestScalarDiagonal:
    def test_sphere3_diagonal_closed_form(self):
        # (4 pi t)^{3/2} H(t,x,x) = e^t up to exponentially small terms
        s = Sphere(3, 1.0)
        for t in (0.1, 0.05):
            lhs = (4 * math.pi * t) ** 1.5 * s.heat_diagonal(t)
            assert abs(lhs - math.exp(t)) < 1e-12

    def test_flat_diagonal_is_one(self):
        for model in (Circle(1.0), FlatTorus((1.0, 1.3))):
            t = 0.01
            lhs = (4 * math.pi * t) ** (model.n / 2.0) * model.heat_diagonal(t)
            assert abs(lhs - 1.0) < 1e-6

    def test_constant_mode_only_affects_order_zero(self):
        T = FlatTorus((1.0, 1.3))
        t = 0.05
        e = empty(2)
        with_c = T.diag_jet(t, e, e, include_constant_mode=True)
        without_c = T.diag_jet(t, e, e, include_constant_mode=False)
        assert abs((with_c - without_c) - 1.0 / T.volume) < 1e-15
        a = mi([1], 2)
        assert T.diag_jet(t, a, a, include_constant_mode=True) == T.diag_jet(
            t, a, a, include_constant_mode=False
        )
