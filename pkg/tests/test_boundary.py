import numpy as np
import pytest

from curvcert.boundary import (BoundaryError, boundary_frame, make_neumann,
                               mean_curvature, neumann_residual,
                               second_fundamental_form)
from curvcert.fields import ConstField, ExprField, make_cutoff_spec
from curvcert.geometry import WeightedSpace
from oracles import fd_partial


def euclidean_space(dim, phi, box):
    metric = [[ConstField(dim, 1.0 if i == j else 0.0) for j in range(dim)]
              for i in range(dim)]
    return WeightedSpace(dim=dim, metric=metric,
                         weight=ConstField(dim, 0.0),
                         defining_fn=ExprField(phi, dim), chart_box=box,
                         boundary_patches=[], label="euclid")


def cartesian_ball(dim=2):
    phi = " + ".join(f"x{i + 1}^2" for i in range(dim)) + " - 1"
    return euclidean_space(dim, phi, [(-1.2, 1.2)] * dim)


class TestBoundaryFrame:
    def test_half_space_frame(self, half_space):
        sp = half_space.space
        bf = boundary_frame(sp, np.array([3.0, 0.0]))
        np.testing.assert_allclose(bf.normal, [0.0, -1.0], atol=1e-14)
        np.testing.assert_allclose(bf.tangents[0], [1.0, 0.0], atol=1e-14)

    def test_ball_outward_normal(self):
        sp = cartesian_ball()
        bf = boundary_frame(sp, np.array([0.0, 1.0]))
        np.testing.assert_allclose(bf.normal, [0.0, 1.0], atol=1e-14)

    def test_off_boundary_rejected(self):
        sp = cartesian_ball()
        with pytest.raises(BoundaryError, match="not on boundary"):
            boundary_frame(sp, np.array([0.5, 0.5]))

    def test_degenerate_gradient_rejected(self):
        sp = euclidean_space(2, "x^2 + y^2", [(-1.0, 1.0), (-1.0, 1.0)])
        with pytest.raises(BoundaryError, match="degenerate"):
            boundary_frame(sp, np.array([0.0, 0.0]))

    def test_frame_g_orthonormal(self):
        sp = cartesian_ball()
        t = np.linspace(0.2, 6.0, 7)
        x = np.stack([np.cos(t), np.sin(t)])
        bf = boundary_frame(sp, x)
        np.testing.assert_allclose(
            np.einsum("i...,i...->...", bf.normal, bf.normal), 1.0,
            atol=1e-12)
        np.testing.assert_allclose(
            np.einsum("i...,i...->...", bf.normal, bf.tangents[0]), 0.0,
            atol=1e-12)


class TestSecondFundamentalForm:
    def test_cartesian_circle(self):
        sp = cartesian_ball()
        t = np.linspace(0.1, 6.1, 9)
        x = np.stack([np.cos(t), np.sin(t)])
        II = np.asarray(second_fundamental_form(sp, x))
        np.testing.assert_allclose(II[0, 0], 1.0, atol=1e-12)

    def test_polar_ball_radius(self, entry):
        from curvcert.zoo import parse_ref
        for R in (1.0, 2.0):
            e = entry("ball") if R == 1.0 else parse_ref(f"ball,R={R}")
            x = np.array([[R, R, R], [0.3, 2.0, 5.0]])
            II = np.asarray(second_fundamental_form(e.space, x))
            np.testing.assert_allclose(II[0, 0], 1.0 / R, atol=1e-12)

    def test_annulus_inner_concave(self, entry):
        e = entry("annulus")
        inner = np.asarray(second_fundamental_form(
            e.space, np.array([0.5, 1.0])))
        outer = np.asarray(second_fundamental_form(
            e.space, np.array([1.0, 1.0])))
        assert float(inner[0, 0]) == pytest.approx(-2.0, abs=1e-12)
        assert float(outer[0, 0]) == pytest.approx(1.0, abs=1e-12)

    def test_hemisphere_equator_geodesic(self, entry):
        e = entry("hemisphere")
        x = np.array([[np.pi / 2] * 3, [0.5, 2.5, 4.5]])
        II = np.asarray(second_fundamental_form(e.space, x))
        np.testing.assert_allclose(II, 0.0, atol=1e-12)
        np.testing.assert_allclose(
            np.asarray(mean_curvature(e.space, x)), 0.0, atol=1e-12)

    def test_defining_fn_rescaling_invariance(self):
        a = euclidean_space(2, "x^2 + y^2 - 1", [(-1.2, 1.2)] * 2)
        b = euclidean_space(2, "7*(x^2 + y^2 - 1)", [(-1.2, 1.2)] * 2)
        x = np.array([0.6, 0.8])
        np.testing.assert_allclose(
            np.asarray(second_fundamental_form(a, x)),
            np.asarray(second_fundamental_form(b, x)), atol=1e-10)

    def test_tangent_frame_permutation_invariance(self):
        sp = cartesian_ball(dim=3)
        x = np.array([0.36, 0.48, 0.8])
        eigs = []
        for order in ([0, 1, 2], [2, 0, 1], [1, 2, 0]):
            bf = boundary_frame(sp, x, axis_order=order)
            II = np.asarray(second_fundamental_form(sp, x, bframe=bf))
            eigs.append(np.sort(np.linalg.eigvalsh(II)))
        np.testing.assert_allclose(eigs[1], eigs[0], atol=1e-10)
        np.testing.assert_allclose(eigs[2], eigs[0], atol=1e-10)
        np.testing.assert_allclose(eigs[0], 1.0, atol=1e-10)

    def test_mean_curvature_vs_fd_normal_oracle(self):
        # H = div(N) for the Euclidean sphere of radius r: (n-1)/r
        sp = cartesian_ball(dim=3)
        x = np.array([0.36, 0.48, 0.8])

        def normal_k(k):
            def fn(p):
                g = 2.0 * p  # grad phi
                return g[k] / np.linalg.norm(g)
            return fn

        div = sum(float(fd_partial(normal_k(k), x, k, 1, 1e-6))
                  for k in range(3))
        H = float(np.asarray(mean_curvature(sp, x)))
        assert H == pytest.approx(div, abs=1e-8)
        assert H == pytest.approx(2.0, abs=1e-12)


class TestNeumannFactory:
    # plateau covers the whole closed disk so chi is constant at the
    # boundary and only the exact correction controls the normal derivative
    CUTOFF = make_cutoff_spec(inner=((-1.05, 1.05), (-1.05, 1.05)),
                              outer=((-1.15, 1.15), (-1.15, 1.15)))

    def test_hand_oracle_correction(self):
        # w = x on the unit disk: corrected field is x*(r^2 + 1)/(2 r^2)
        sp = cartesian_ball()
        nt = make_neumann(sp, ExprField("x1", 2), self.CUTOFF)
        pts = np.array([[0.3, -0.2, 0.4], [0.2, 0.3, -0.1]])
        r2 = (pts ** 2).sum(axis=0)
        want = pts[0] * (r2 + 1.0) / (2.0 * r2)
        np.testing.assert_allclose(nt.field.value(pts), want, atol=1e-12)

    def test_raw_field_fails_gate(self):
        sp = cartesian_ball()
        res = neumann_residual(sp, ExprField("x1^2 + x2^2 - 1", 2),
                               np.array([0.0, 1.0]))
        assert float(np.asarray(res)) == pytest.approx(2.0, abs=1e-12)

    def test_corrected_field_passes_gate(self):
        sp = cartesian_ball()
        for src in ("x1", "x1*x2", "sin(x1) + x2^2"):
            nt = make_neumann(sp, ExprField(src, 2), self.CUTOFF)
            t = np.linspace(0.1, 6.1, 11)
            x = np.stack([np.cos(t), np.sin(t)])
            res = np.asarray(neumann_residual(sp, nt.field, x))
            assert np.max(np.abs(res)) < 1e-10

    def test_phi_as_base_is_corrected_to_flat(self):
        # w = phi has pure normal gradient; the correction removes it all
        sp = cartesian_ball()
        nt = make_neumann(sp, ExprField("x1^2 + x2^2 - 1", 2), self.CUTOFF)
        t = np.linspace(0.3, 5.9, 7)
        x = np.stack([np.cos(t), np.sin(t)])
        res = np.asarray(neumann_residual(sp, nt.field, x))
        assert np.max(np.abs(res)) < 1e-10

    def test_cutoff_exceeding_chart_rejected(self):
        sp = cartesian_ball()
        wide = make_cutoff_spec(inner=((-0.5, 0.5), (-0.5, 0.5)),
                                outer=((-2.0, 2.0), (-1.1, 1.1)))
        with pytest.raises(ValueError, match="chart_box"):
            make_neumann(sp, ExprField("x1", 2), wide)

    def test_zoo_families_pass_gate(self, entry):
        for name in ("ball", "hemisphere", "annulus", "gaussian_half_space"):
            e = entry(name)
            from curvcert.verify import boundary_grid
            patches = boundary_grid(e.space, e.plan.boundary_counts)
            for nt in e.neumann_family():
                for pts in patches:
                    res = np.asarray(
                        neumann_residual(e.space, nt.field, pts))
                    assert np.max(np.abs(res)) < 1e-8, (name, nt.label)
