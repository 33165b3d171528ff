import numpy as np
import pytest

from relequil.central import (
    RefinementError,
    is_central_configuration,
    refine_central_configuration,
    regular_polygon,
)
from relequil.model import BodyConfiguration, PotentialSpec, moment_of_inertia

SQRT3 = np.sqrt(3.0)


class TestRegularPolygon:
    def test_triangle_positions(self):
        z = regular_polygon(3).positions
        expected = np.array([1.0, 0.0, -0.5, SQRT3 / 2.0, -0.5, -SQRT3 / 2.0])
        np.testing.assert_allclose(z, expected, atol=1e-15)

    def test_square_positions(self):
        z = regular_polygon(4).positions
        np.testing.assert_allclose(
            z, np.array([1.0, 0, 0, 1, -1, 0, 0, -1]), atol=1e-15
        )

    @pytest.mark.parametrize("n", [2, 3, 5, 8, 13])
    def test_center_of_mass_at_origin(self, n):
        cfg = regular_polygon(n)
        com = cfg.masses @ cfg.points / cfg.masses.sum()
        assert np.max(np.abs(com)) <= 1e-16
        assert cfg.centered

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            regular_polygon(1)
        with pytest.raises(ValueError):
            regular_polygon(3, radius=-1.0)


class TestIsCentral:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.0])
    def test_triangle_any_alpha(self, triangle, alpha):
        report = is_central_configuration(triangle, PotentialSpec.homogeneous(alpha))
        assert report.is_central
        assert report.residual_norm < 1e-12

    def test_square_schwarzschild(self, square):
        report = is_central_configuration(square, PotentialSpec.schwarzschild())
        assert report.is_central
        assert report.residual_norm < 1e-12

    def test_isosceles_not_central(self):
        cfg = BodyConfiguration(
            np.ones(3), np.array([0.0, 1.3, -1.0, 0.0, 1.0, 0.0])
        )
        report = is_central_configuration(cfg, PotentialSpec.homogeneous(1.0))
        assert not report.is_central

    def test_all_six_preset_cases(self, standard_cases):
        for case in standard_cases:
            report = is_central_configuration(case.configuration(), case.potential)
            assert report.residual_norm < 1e-12, case.name


class TestRefine:
    def test_perturbed_triangle_returns_to_polygon(self, rng, triangle):
        spec = PotentialSpec.homogeneous(1.0)
        noise = rng.standard_normal(6)
        noise *= 0.05 / np.linalg.norm(noise)
        start = triangle.with_positions(triangle.positions + noise)
        refined, history = refine_central_configuration(
            start, spec, fix_inertia=moment_of_inertia(triangle),
            return_history=True,
        )
        assert is_central_configuration(refined, spec).is_central
        np.testing.assert_allclose(
            np.sort(refined.pair_distances()), np.full(3, SQRT3), atol=1e-8
        )
        # merit never increases between accepted steps
        assert all(b <= a for a, b in zip(history, history[1:]))

    def test_exact_input_is_fixed_point(self, triangle):
        refined = refine_central_configuration(
            triangle, PotentialSpec.homogeneous(1.0)
        )
        np.testing.assert_allclose(
            refined.positions, triangle.positions, atol=1e-14
        )

    def test_collinear_guess_converges(self):
        spec = PotentialSpec.homogeneous(1.0)
        start = BodyConfiguration(
            np.ones(3), np.array([-1.1, 0.0, 0.05, 0.0, 1.2, 0.0])
        )
        refined = refine_central_configuration(start, spec)
        assert is_central_configuration(refined, spec).residual_norm < 1e-11

    def test_gauge_constraints_hold(self, rng, square):
        spec = PotentialSpec.manev()
        noise = rng.standard_normal(8)
        noise *= 0.03 / np.linalg.norm(noise)
        start = square.with_positions(square.positions + noise)
        target_inertia = moment_of_inertia(square)
        refined = refine_central_configuration(
            start, spec, fix_inertia=target_inertia
        )
        com = refined.masses @ refined.points / refined.masses.sum()
        assert np.max(np.abs(com)) <= 1e-14
        assert moment_of_inertia(refined) == pytest.approx(
            target_inertia, rel=1e-14
        )
        theta_start = np.arctan2(start.points[0, 1], start.points[0, 0])
        theta_out = np.arctan2(refined.points[0, 1], refined.points[0, 0])
        assert theta_out == pytest.approx(theta_start, abs=1e-13)

    def test_nonconvergence_raises(self, rng):
        # a single Newton step cannot reach tolerance
        spec = PotentialSpec.homogeneous(1.0)
        tri = regular_polygon(3)
        noise = rng.standard_normal(6)
        noise *= 0.05 / np.linalg.norm(noise)
        start = tri.with_positions(tri.positions + noise)
        with pytest.raises(RefinementError):
            refine_central_configuration(start, spec, max_iter=1)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_polygons_refine_under_mixed_specs(self, rng, n):
        for spec in (PotentialSpec.homogeneous(1.4), PotentialSpec.manev(),
                     PotentialSpec.schwarzschild()):
            poly = regular_polygon(n)
            noise = rng.standard_normal(2 * n)
            noise *= 0.02 / np.linalg.norm(noise)
            start = poly.with_positions(poly.positions + noise)
            refined = refine_central_configuration(
                start, spec, fix_inertia=moment_of_inertia(poly)
            )
            assert is_central_configuration(refined, spec).is_central
