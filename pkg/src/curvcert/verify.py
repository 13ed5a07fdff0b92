"""Theorem checkers and the curvature-dimension certifier.

Each proof step of the boundary decomposition of the measure-valued
Ricci tensor is one named, reportable check:

* ``check_bochner``       -- Gamma2 = Ricci_V(grad f, grad f) + |Hess f|^2_HS
* ``check_green``         -- integration by parts with the boundary flux
* ``check_mv_laplacian``  -- weak Laplacian = interior density - boundary flux
* ``check_ii_identity``   -- g(nabla_{grad g} N, grad g) = -1/2 g(N, grad|grad g|^2)
* ``check_ricci_decomposition`` -- the headline interior + boundary identity
* ``check_dimension_term``      -- |Hess f|^2_HS >= (trace_g Hess f)^2 / N
* ``certify`` / ``flatness_report`` -- sampled eigenvalue certificates

Every check that assumes the Neumann hypothesis re-verifies it first and
fails loudly (GateError) if violated: that is a broken hypothesis, not a
broken theorem.  All verdicts are sampled necessary-condition
certificates over stated grids, never proofs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .boundary import (NeumannTestFunction, boundary_frame,
                       normal_field_jets, second_fundamental_form)
from .fields import ScalarField
from .geometry import (WeightedSpace, as_points, bakry_emery_ricci, frame_at,
                       gamma2_parts, hessian_from_jet, hs_norm_sq)
from .quadrature import (integrate_boundary, integrate_interior, patch_points)

POINTWISE_TOL = 1e-8
QUADRATURE_TOL = 1e-5
DIMENSION_TOL = 1e-10
VERDICT_SLACK = 1e-9
NEUMANN_GATE_TOL = 1e-8


class GateError(RuntimeError):
    """A check's hypothesis (the Neumann gate) is violated."""


@dataclass
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    witness: Dict = field(default_factory=dict)
    metadata: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "witness": self.witness,
            "metadata": self.metadata,
        }

    def __str__(self):
        tag = "PASS" if self.passed else "FAIL"
        return (f"[{tag}] {self.name}: residual {self.residual:.3e} "
                f"(tol {self.tolerance:.1e})")


@dataclass
class SamplePlan:
    """Grid resolutions for sampling and quadrature."""

    interior_counts: Tuple[int, ...]
    boundary_counts: Tuple[int, ...]
    quad_interior: Tuple[int, ...]
    quad_boundary: Tuple[int, ...]

    def to_dict(self):
        return {
            "interior_counts": list(self.interior_counts),
            "boundary_counts": list(self.boundary_counts),
            "quad_interior": list(self.quad_interior),
            "quad_boundary": list(self.quad_boundary),
        }


def interior_grid(space: WeightedSpace, counts) -> np.ndarray:
    """Midpoint grid over the chart box, restricted to {phi < 0}."""
    axes = [lo + (hi - lo) * (np.arange(m) + 0.5) / m
            for (lo, hi), m in zip(space.chart_box, counts)]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids])
    phi = np.asarray(space.defining_fn.value(pts))
    return pts[:, phi < -1e-10]


def boundary_grid(space: WeightedSpace, counts) -> List[np.ndarray]:
    """Midpoint boundary sample points, one array per patch."""
    return [patch_points(space, p, counts, midpoint=True)
            for p in space.boundary_patches]


def _witness_point(x: np.ndarray, flat_index: int) -> List[float]:
    if x.ndim == 1:
        return [float(v) for v in x]
    return [float(v) for v in x[:, flat_index]]


# -- pointwise identity checks ------------------------------------------


def check_bochner(space: WeightedSpace, fields: Sequence[ScalarField],
                  points, tol: float = POINTWISE_TOL) -> CheckResult:
    """Bochner identity Gamma2(f) = Ricci_V(grad f, grad f) + |Hess f|^2."""
    x = as_points(space, np.asarray(points, dtype=float))
    ricv = bakry_emery_ricci(space, x)
    worst = -1.0
    witness: Dict = {}
    for fi, f in enumerate(fields):
        parts = gamma2_parts(space, f, x)
        frame = parts.frame
        H = hessian_from_jet(space, parts.f_jet, frame)
        df = np.stack([parts.f_jet.partial(i).value
                       for i in range(space.dim)])
        gf = np.einsum("ij...,j...->i...", frame.inverse, df)
        rhs = np.einsum("ij...,i...,j...->...", ricv, gf, gf) \
            + hs_norm_sq(space, H, x, frame)
        rel = np.abs(parts.gamma2 - rhs) / (1.0 + np.abs(parts.gamma2))
        k = int(np.argmax(rel))
        if np.max(rel) > worst:
            worst = float(np.max(rel))
            witness = {"field_index": fi, "point": _witness_point(x, k)}
    npts = 1 if x.ndim == 1 else x.shape[1]
    return CheckResult(
        name="bochner", residual=worst, tolerance=tol, passed=worst <= tol,
        witness=witness,
        metadata={"fields": len(fields), "points": npts})


def normal_flux(space: WeightedSpace, u: ScalarField, x) -> np.ndarray:
    """g(N, grad u) with N the level-set unit normal field."""
    jN = normal_field_jets(space, x)
    ju = u.jet(x)
    acc = 0.0
    for i in range(space.dim):
        acc = acc + jN[i].value * ju.partial(i).value
    return acc


def _as_field(g) -> ScalarField:
    return g.field if isinstance(g, NeumannTestFunction) else g


def check_green(space: WeightedSpace, f: ScalarField, g: ScalarField,
                quad_interior=None, quad_boundary=None,
                tol: float = QUADRATURE_TOL) -> CheckResult:
    """Green's formula: int Gamma(f,g) = -int f L g + oint f g(N, grad g)."""
    from .geometry import gamma1, witten_laplacian

    f = _as_field(f)
    g = _as_field(g)
    i_gamma = integrate_interior(
        space, lambda x: gamma1(space, f, g, x), quad_interior)
    i_lap = integrate_interior(
        space, lambda x: np.asarray(f.value(x)) * witten_laplacian(space, g, x),
        quad_interior)
    i_bd = sum(integrate_boundary(
        space, lambda x: np.asarray(f.value(x)) * normal_flux(space, g, x),
        p, quad_boundary) for p in space.boundary_patches)
    scale = 1.0 + abs(i_gamma) + abs(i_lap) + abs(i_bd)
    res = abs(i_gamma - (-i_lap + i_bd)) / scale
    return CheckResult(
        name="green", residual=res, tolerance=tol, passed=res <= tol,
        metadata={"interior_gamma": i_gamma, "interior_laplacian": i_lap,
                  "boundary_flux": i_bd})


def check_mv_laplacian(space: WeightedSpace, g, h: ScalarField,
                       quad_interior=None, quad_boundary=None,
                       tol: float = QUADRATURE_TOL) -> CheckResult:
    """Weak measure-valued Laplacian formula tested against h.

    -int Gamma(h,g) dm  ==  int h (L g) dm  -  oint h g(N, grad g) dsigma.
    For a Neumann test function the boundary term must itself vanish
    (the measure Laplacian is absolutely continuous).
    """
    from .geometry import gamma1, witten_laplacian

    is_neumann = isinstance(g, NeumannTestFunction)
    gf = _as_field(g)
    lhs = -integrate_interior(
        space, lambda x: gamma1(space, h, gf, x), quad_interior)
    i_lap = integrate_interior(
        space, lambda x: np.asarray(h.value(x)) * witten_laplacian(space, gf, x),
        quad_interior)
    i_bd = sum(integrate_boundary(
        space, lambda x: np.asarray(h.value(x)) * normal_flux(space, gf, x),
        p, quad_boundary) for p in space.boundary_patches)
    scale = 1.0 + abs(lhs) + abs(i_lap) + abs(i_bd)
    res = abs(lhs - (i_lap - i_bd)) / scale
    passed = res <= tol
    meta = {"lhs": lhs, "interior_density": i_lap, "boundary_flux": i_bd,
            "neumann": is_neumann}
    if is_neumann and abs(i_bd) > NEUMANN_GATE_TOL * (1.0 + abs(lhs)):
        passed = False
        meta["neumann_boundary_leak"] = abs(i_bd)
    return CheckResult(name="mv_laplacian", residual=res, tolerance=tol,
                       passed=passed, metadata=meta)


def _tangential_gradient_components(space, bframe, jet):
    """Components v_a = g(grad u, e_a) = e_a^i d_i u on the tangent frame."""
    du = np.stack([jet.partial(i).value for i in range(space.dim)])
    return np.einsum("ai...,i...->a...", bframe.tangents, du)


def neumann_gate(space: WeightedSpace, g: NeumannTestFunction,
                 boundary_counts, tol: float = NEUMANN_GATE_TOL):
    """Max normalized Neumann residual over boundary sample grids."""
    worst = 0.0
    witness = None
    for x in boundary_grid(space, boundary_counts):
        bf = boundary_frame(space, x)
        jg = g.field.jet(x)
        du = np.stack([jg.partial(i).value for i in range(space.dim)])
        res = np.abs(np.einsum("i...,i...->...", bf.normal, du))
        k = int(np.argmax(res))
        if float(res[k]) >= worst:
            worst = float(res[k])
            witness = _witness_point(x, k)
    if worst > tol:
        raise GateError(
            f"Neumann hypothesis violated: |g(N, grad g)| = {worst:.3e} "
            f"> {tol} at boundary point {witness}; the theorem's "
            f"hypothesis fails, the theorem is not being tested")
    return worst


def check_ricci_decomposition(space: WeightedSpace, g: NeumannTestFunction,
                              h: ScalarField, quad_interior=None,
                              quad_boundary=None, boundary_counts=None,
                              tol: float = QUADRATURE_TOL) -> CheckResult:
    """The headline check: weak measure Ricci = Ricci_V dm + II dsigma.

    LHS(h) = -1/2 int Gamma(h, Gamma(g,g)) - int h Gamma(g, Lg)
             - int h |Hess g|^2_HS   (all against exp(-V) dVol_g)
    RHS(h) = int h Ricci_V(grad g, grad g) dm
             + oint h II(grad g, grad g) dsigma.
    """
    gate = neumann_gate(space, g, boundary_counts)
    gf = g.field

    def lhs_integrand(x):
        parts = gamma2_parts(space, gf, x)
        frame = parts.frame
        jh = h.jet(x)
        dh = np.stack([jh.partial(i).value for i in range(space.dim)])
        dgam = np.stack([parts.gamma_ff_jet.partial(i).value
                         for i in range(space.dim)])
        g_h_gam = np.einsum("ij...,i...,j...->...", frame.inverse, dh, dgam)
        df = np.stack([parts.f_jet.partial(i).value
                       for i in range(space.dim)])
        dlf = np.stack([parts.lf_jet.partial(i).value
                        for i in range(space.dim)])
        g_f_lf = np.einsum("ij...,i...,j...->...", frame.inverse, df, dlf)
        H = hessian_from_jet(space, parts.f_jet, frame)
        hs = hs_norm_sq(space, H, x, frame)
        hv = np.asarray(h.value(x))
        return -0.5 * g_h_gam - hv * g_f_lf - hv * hs

    def rhs_interior(x):
        frame = frame_at(space, x)
        ricv = bakry_emery_ricci(space, x, frame)
        jf = gf.jet(x)
        df = np.stack([jf.partial(i).value for i in range(space.dim)])
        gfv = np.einsum("ij...,j...->i...", frame.inverse, df)
        return np.asarray(h.value(x)) * np.einsum(
            "ij...,i...,j...->...", ricv, gfv, gfv)

    def rhs_boundary(x):
        bf = boundary_frame(space, x)
        II = second_fundamental_form(space, x, bf)
        v = _tangential_gradient_components(space, bf, gf.jet(x))
        return np.asarray(h.value(x)) * np.einsum(
            "ab...,a...,b...->...", II, v, v)

    lhs = integrate_interior(space, lhs_integrand, quad_interior)
    rhs_i = integrate_interior(space, rhs_interior, quad_interior)
    rhs_b = sum(integrate_boundary(space, rhs_boundary, p, quad_boundary)
                for p in space.boundary_patches)
    rhs = rhs_i + rhs_b
    res = abs(lhs - rhs) / (1.0 + abs(rhs))
    return CheckResult(
        name="ricci_decomposition", residual=res, tolerance=tol,
        passed=res <= tol,
        metadata={"lhs": lhs, "rhs_interior": rhs_i, "rhs_boundary": rhs_b,
                  "neumann_gate": gate})


def decomposition_batch(space: WeightedSpace, g: NeumannTestFunction,
                        hs: Sequence[ScalarField], quad_interior=None,
                        quad_boundary=None, boundary_counts=None,
                        chunk: int = 16384) -> List[Tuple[float, float]]:
    """(LHS, RHS) of the decomposition for one g and many test h.

    The expensive order-3 sweep over g's jets is shared across the whole
    h family, so checking a family costs little more than one pair.
    """
    from .quadrature import _counts, tensor_rule, _patch_geometry
    from .quadrature import (DEFAULT_BOUNDARY_NODES, DEFAULT_INTERIOR_NODES,
                             GRAM_FLOOR, QuadratureError)

    neumann_gate(space, g, boundary_counts)
    gf = g.field
    n = space.dim
    counts = _counts(quad_interior, n, DEFAULT_INTERIOR_NODES)
    pts, wts = tensor_rule(space.chart_box, counts)
    nh = len(hs)
    lhs = np.zeros(nh)
    rhs = np.zeros(nh)
    for start in range(0, pts.shape[1], chunk):
        sl = slice(start, start + chunk)
        x = pts[:, sl]
        phi = np.asarray(space.defining_fn.value(x))
        inside = phi < 0.0
        parts = gamma2_parts(space, gf, x)
        frame = parts.frame
        dens = wts[sl] * inside * \
            np.exp(-np.asarray(space.weight.value(x))) * frame.sqrt_det
        if np.any(inside & (frame.sqrt_det <= GRAM_FLOOR)):
            raise QuadratureError(
                "interior node with sqrt det g below floor")
        dgam = np.stack([parts.gamma_ff_jet.partial(i).value
                         for i in range(n)])
        df = np.stack([parts.f_jet.partial(i).value for i in range(n)])
        dlf = np.stack([parts.lf_jet.partial(i).value for i in range(n)])
        g_f_lf = np.einsum("ij...,i...,j...->...", frame.inverse, df, dlf)
        H = hessian_from_jet(space, parts.f_jet, frame)
        hs_sq = hs_norm_sq(space, H, x, frame)
        ricv = bakry_emery_ricci(space, x, frame)
        gfv = np.einsum("ij...,j...->i...", frame.inverse, df)
        ric_gg = np.einsum("ij...,i...,j...->...", ricv, gfv, gfv)
        # shared pieces: LHS = -1/2 Gamma(h, Gamma(g,g)) + h * base
        base = -g_f_lf - hs_sq
        half_gdgam = -0.5 * np.einsum("ij...,j...->i...",
                                      frame.inverse, dgam)
        for k, h in enumerate(hs):
            jh = h.jet(x)
            hv = jh.value
            dh = np.stack([jh.partial(i).value for i in range(n)])
            integrand = np.einsum("i...,i...->...", dh, half_gdgam) \
                + hv * base
            if not np.all(np.isfinite(integrand * dens)):
                raise QuadratureError("non-finite decomposition integrand")
            lhs[k] += float(np.sum(dens * integrand))
            rhs[k] += float(np.sum(dens * hv * ric_gg))
    bcounts = None
    for patch in space.boundary_patches:
        pb = _counts(quad_boundary, patch.param_dim, DEFAULT_BOUNDARY_NODES)
        s, bw = tensor_rule(patch.param_box, pb)
        xb, dens_gram, _ = _patch_geometry(space, patch, s)
        bf = boundary_frame(space, xb)
        II = second_fundamental_form(space, xb, bf)
        v = _tangential_gradient_components(space, bf, gf.jet(xb))
        iigg = np.einsum("ab...,a...,b...->...", II, v, v)
        bdens = bw * np.exp(-np.asarray(space.weight.value(xb))) * dens_gram
        for k, h in enumerate(hs):
            rhs[k] += float(np.sum(bdens * np.asarray(h.value(xb)) * iigg))
    return list(zip(lhs.tolist(), rhs.tolist()))


def decomposition_sides(space: WeightedSpace, g: NeumannTestFunction,
                        h: ScalarField, quad_interior=None,
                        quad_boundary=None, boundary_counts=None
                        ) -> Tuple[float, float]:
    """(LHS, RHS) of the decomposition at given node counts (for the
    node-doubling Cauchy criterion)."""
    r = check_ricci_decomposition(space, g, h, quad_interior, quad_boundary,
                                  boundary_counts)
    return (r.metadata["lhs"],
            r.metadata["rhs_interior"] + r.metadata["rhs_boundary"])


def check_ii_identity(space: WeightedSpace, g: NeumannTestFunction,
                      boundary_points=None, boundary_counts=None,
                      tol: float = POINTWISE_TOL) -> CheckResult:
    """II(grad g, grad g) = -1/2 g(N, grad |grad g|^2) on the boundary."""
    gate = neumann_gate(space, g, boundary_counts)
    batches = ([np.asarray(boundary_points, dtype=float)]
               if boundary_points is not None
               else boundary_grid(space, boundary_counts))
    gf = g.field
    worst = -1.0
    witness: Dict = {}
    for x in batches:
        bf = boundary_frame(space, x)
        II = second_fundamental_form(space, x, bf)
        parts = gamma2_parts(space, gf, x)
        v = _tangential_gradient_components(space, bf, parts.f_jet)
        lhs = np.einsum("ab...,a...,b...->...", II, v, v)
        dgam = np.stack([parts.gamma_ff_jet.partial(i).value
                         for i in range(space.dim)])
        rhs = -0.5 * np.einsum("i...,i...->...", bf.normal, dgam)
        rel = np.abs(lhs - rhs) / (1.0 + np.abs(lhs))
        k = int(np.argmax(rel))
        if float(rel[k]) > worst:
            worst = float(rel[k])
            witness = {"point": _witness_point(x, k)}
    return CheckResult(name="ii_identity", residual=worst, tolerance=tol,
                       passed=worst <= tol, witness=witness,
                       metadata={"neumann_gate": gate})


def check_dimension_term(space: WeightedSpace, fields: Sequence[ScalarField],
                         points, n_dim: float,
                         tol: float = DIMENSION_TOL) -> CheckResult:
    """(trace_g Hess f)^2 / N <= |Hess f|^2_HS whenever N >= n."""
    if n_dim < space.dim:
        raise ValueError(
            f"dimension parameter N = {n_dim} < chart dimension "
            f"{space.dim}: the trace inequality is unsatisfiable")
    x = as_points(space, points)
    frame = frame_at(space, x)
    worst = -np.inf
    witness: Dict = {}
    for fi, f in enumerate(fields):
        jf = f.jet(x)
        H = hessian_from_jet(space, jf, frame)
        lap = np.einsum("ij...,ij...->...", frame.inverse, H)
        gap = lap**2 / n_dim - hs_norm_sq(space, H, x, frame)
        k = int(np.argmax(gap))
        if float(np.max(gap)) > worst:
            worst = float(np.max(gap))
            witness = {"field_index": fi, "point": _witness_point(x, k)}
    return CheckResult(name="dimension_term", residual=worst, tolerance=tol,
                       passed=worst <= tol, witness=witness,
                       metadata={"n_dim": n_dim, "fields": len(fields)})


# -- eigenvalue certificates --------------------------------------------


def eigenvalues_relative(A: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Eigenvalues of A relative to SPD G (A v = lambda G v), batched.

    Cholesky reduction of the generalized symmetric problem; inputs are
    (n, n, ...) component arrays, output is (..., n) ascending.
    """
    Am = np.moveaxis(A, (0, 1), (-2, -1))
    Gm = np.moveaxis(G, (0, 1), (-2, -1))
    L = np.linalg.cholesky(Gm)
    Y = np.linalg.solve(L, Am)
    M = np.linalg.solve(L, np.swapaxes(Y, -2, -1))
    M = 0.5 * (M + np.swapaxes(M, -2, -1))
    return np.linalg.eigvalsh(M)


@dataclass
class CurvatureReport:
    """Sampled necessary-condition certificate, never a proof."""

    k_interior: float
    lambda_min_ii: float
    lambda_max_ii: float
    tr_ii_range: Tuple[float, float]
    rcd_infinity: Dict[float, bool]
    rcd_star: Dict[Tuple[float, float], bool]
    interior_samples: int
    boundary_samples: int
    interior_witness: List[float]
    boundary_witness: List[float]

    def certified_k(self) -> float:
        """Largest K certified at this sampling (or -inf for non-convex)."""
        if self.lambda_min_ii < -VERDICT_SLACK:
            return float("-inf")
        return self.k_interior

    def to_dict(self) -> Dict:
        return {
            "k_interior": self.k_interior,
            "lambda_min_ii": self.lambda_min_ii,
            "lambda_max_ii": self.lambda_max_ii,
            "tr_ii_range": list(self.tr_ii_range),
            "rcd_infinity": {str(k): v for k, v in self.rcd_infinity.items()},
            "rcd_star": {f"{k},{n}": v for (k, n), v in self.rcd_star.items()},
            "interior_samples": self.interior_samples,
            "boundary_samples": self.boundary_samples,
            "interior_witness": self.interior_witness,
            "boundary_witness": self.boundary_witness,
            "certificate": "sampled necessary-condition certificate",
        }


def certify(space: WeightedSpace, k_list: Sequence[float],
            n_list: Sequence[float] = (), plan: Optional[SamplePlan] = None,
            interior_counts=None, boundary_counts=None) -> CurvatureReport:
    """Sampled RCD verdicts from relative eigenvalues of Ricci_V and II."""
    if plan is not None:
        interior_counts = plan.interior_counts
        boundary_counts = plan.boundary_counts
    x = interior_grid(space, interior_counts)
    if x.shape[1] == 0:
        raise ValueError("empty interior sample plan")
    frame = frame_at(space, x)
    ricv = bakry_emery_ricci(space, x, frame)
    eigs = eigenvalues_relative(ricv, frame.metric)
    lam_min = eigs[..., 0]
    ki = int(np.argmin(lam_min))
    k_interior = float(lam_min[ki])
    interior_witness = _witness_point(x, ki)

    lam_ii_min = np.inf
    lam_ii_max = -np.inf
    tr_lo, tr_hi = np.inf, -np.inf
    boundary_witness: List[float] = []
    n_boundary = 0
    for xb in boundary_grid(space, boundary_counts):
        II = second_fundamental_form(space, xb)
        IIm = np.moveaxis(II, (0, 1), (-2, -1))
        eig = np.linalg.eigvalsh(IIm)
        n_boundary += xb.shape[1]
        bi = int(np.argmin(eig[..., 0]))
        if float(eig[bi, 0]) < lam_ii_min:
            lam_ii_min = float(eig[bi, 0])
            boundary_witness = _witness_point(xb, bi)
        lam_ii_max = max(lam_ii_max, float(np.max(eig[..., -1])))
        tr = np.einsum("aa...->...", II)
        tr_lo = min(tr_lo, float(np.min(tr)))
        tr_hi = max(tr_hi, float(np.max(tr)))
    if n_boundary == 0:
        raise ValueError("empty boundary sample plan")

    convex = lam_ii_min >= -VERDICT_SLACK
    rcd_inf = {float(k): bool(convex and k_interior >= k - VERDICT_SLACK)
               for k in k_list}
    rcd_star = {}
    for k in k_list:
        for nn in n_list:
            rcd_star[(float(k), float(nn))] = bool(
                rcd_inf[float(k)] and nn >= space.dim)
    return CurvatureReport(
        k_interior=k_interior, lambda_min_ii=lam_ii_min,
        lambda_max_ii=lam_ii_max, tr_ii_range=(tr_lo, tr_hi),
        rcd_infinity=rcd_inf, rcd_star=rcd_star,
        interior_samples=x.shape[1], boundary_samples=n_boundary,
        interior_witness=interior_witness, boundary_witness=boundary_witness)


def flatness_report(space: WeightedSpace, plan: Optional[SamplePlan] = None,
                    interior_counts=None, boundary_counts=None,
                    tol: float = VERDICT_SLACK) -> CheckResult:
    """Measure-Ricci-flatness: Ricci_V = 0 inside, II (or tr II) = 0 on
    the boundary.  Both the strong (full II) and trace-only readings are
    reported."""
    if plan is not None:
        interior_counts = plan.interior_counts
        boundary_counts = plan.boundary_counts
    x = interior_grid(space, interior_counts)
    frame = frame_at(space, x)
    ricv = bakry_emery_ricci(space, x, frame)
    eigs = eigenvalues_relative(ricv, frame.metric)
    max_ricci = float(np.max(np.abs(eigs)))
    max_tr = 0.0
    max_ii = 0.0
    for xb in boundary_grid(space, boundary_counts):
        II = second_fundamental_form(space, xb)
        eig = np.linalg.eigvalsh(np.moveaxis(II, (0, 1), (-2, -1)))
        max_ii = max(max_ii, float(np.max(np.abs(eig))))
        tr = np.einsum("aa...->...", II)
        max_tr = max(max_tr, float(np.max(np.abs(tr))))
    strong = max_ricci <= tol and max_ii <= tol
    minimal = max_tr <= tol
    return CheckResult(
        name="flatness", residual=max(max_ricci, max_ii), tolerance=tol,
        passed=strong,
        metadata={"max_abs_ricci_v": max_ricci, "max_abs_tr_ii": max_tr,
                  "max_abs_ii": max_ii, "strong_flat": strong,
                  "minimal_trace": minimal,
                  "interior_flat": max_ricci <= tol})
