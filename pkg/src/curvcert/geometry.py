"""Intrinsic weighted-manifold calculus, pointwise from jet evaluations.

Every operation accepts a single chart point (shape ``(n,)``) or a batch
(shape ``(n, m)``); outputs carry the batch axes last.  Curvature
conventions (the single normative statement for the whole package):

* Christoffel symbols ``G^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)``
* Ricci tensor ``R_ij = d_k G^k_ij - d_j G^k_ik + G^k_kl G^l_ij - G^k_jl G^l_ik``
  (the round sphere has positive Ricci)
* Hessian ``(Hess f)_ij = d_i d_j f - G^k_ij d_k f``
* carre du champ ``Gamma(f,h) = g^{ij} d_i f d_j h``
* weighted Laplacian ``L f = g^{ij} (Hess f)_ij - Gamma(V, f)``
* iterated operator ``Gamma2(f) = 1/2 L Gamma(f,f) - Gamma(f, L f)``,
  computed by running the operator arithmetic over jets of one order
  lower, never by finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .fields import ScalarField
from .jets import Jet

SPD_FLOOR = 1e-10
GRAD_PHI_FLOOR = 1e-8


class GeometryError(ValueError):
    """Degenerate metric / invalid frame input."""


@dataclass
class WeightedSpace:
    """A chart of a weighted Riemannian manifold with boundary.

    ``metric[i][j]`` are scalar fields (symmetric: only i <= j need be
    distinct objects), ``weight`` is V in the reference measure
    ``exp(-V) dVol_g`` and ``defining_fn`` is phi with Omega = {phi < 0}.
    """

    dim: int
    metric: Sequence[Sequence[ScalarField]]
    weight: ScalarField
    defining_fn: ScalarField
    chart_box: Sequence[Tuple[float, float]]
    boundary_patches: Sequence = field(default_factory=tuple)
    label: str = ""

    def __post_init__(self):
        if not 2 <= self.dim <= 4:
            raise GeometryError(f"chart dimension must be 2..4, got {self.dim}")
        if len(self.chart_box) != self.dim:
            raise GeometryError("chart_box length must equal dim")

    def metric_jets(self, x) -> List[List[Jet]]:
        n = self.dim
        jg: List[List[Optional[Jet]]] = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                jg[i][j] = jg[j][i] = self.metric[i][j].jet(x)
        return jg  # type: ignore[return-value]


def as_points(space: WeightedSpace, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[0] != space.dim:
        raise GeometryError(
            f"point has {x.shape[0]} coordinates, chart dim is {space.dim}")
    return x


def _to_mat(a: np.ndarray) -> np.ndarray:
    """(n, n, ...) -> (..., n, n) for numpy.linalg."""
    return np.moveaxis(a, (0, 1), (-2, -1))


def _from_mat(a: np.ndarray) -> np.ndarray:
    return np.moveaxis(a, (-2, -1), (0, 1))


def jet_matrix_inverse(a: List[List[Jet]]) -> List[List[Jet]]:
    """Inverse of a jet-valued SPD matrix by Gauss-Jordan elimination."""
    n = len(a)
    dim = a[0][0].dim
    batch = a[0][0].batch_shape
    m = [list(row) for row in a]
    inv = [[Jet.constant(dim, 1.0 if i == j else 0.0, batch)
            for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = m[col][col].reciprocal()
        m[col] = [e * piv for e in m[col]]
        inv[col] = [e * piv for e in inv[col]]
        for r in range(n):
            if r == col:
                continue
            f = m[r][col]
            m[r] = [m[r][c] - f * m[col][c] for c in range(n)]
            inv[r] = [inv[r][c] - f * inv[col][c] for c in range(n)]
    return inv


@dataclass
class PointFrame:
    """Cached per-point metric data consumed by every operator."""

    point: np.ndarray
    metric: np.ndarray        # (n, n, ...)
    inverse: np.ndarray       # (n, n, ...)
    sqrt_det: np.ndarray
    christoffels: np.ndarray  # (n, n, n, ...) indexed [k, i, j]
    metric_partials: np.ndarray   # (n, n, n, ...) indexed [i, j, l] = d_l g_ij
    min_eigenvalue: np.ndarray


def frame_at(space: WeightedSpace, x, jg: Optional[List[List[Jet]]] = None
             ) -> PointFrame:
    """Metric matrix, inverse, volume density and Christoffels at x."""
    x = as_points(space, x)
    n = space.dim
    if jg is None:
        jg = space.metric_jets(x)
    batch = jg[0][0].batch_shape
    G = np.zeros((n, n) + batch)
    dg = np.zeros((n, n, n) + batch)
    for i in range(n):
        for j in range(n):
            G[i, j] = jg[i][j].value
            for l in range(n):
                dg[i, j, l] = jg[i][j].partial(l).value
    Gm = _to_mat(G)
    eig = np.linalg.eigvalsh(Gm)
    min_eig = eig[..., 0]
    if np.any(min_eig <= SPD_FLOOR):
        bad = np.argmin(min_eig)
        pt = x if x.ndim == 1 else x[:, np.unravel_index(bad, min_eig.shape)]
        raise GeometryError(
            f"metric not positive definite: min eigenvalue "
            f"{np.min(min_eig):.3e} at point {np.asarray(pt).ravel()}")
    Ginv = _from_mat(np.linalg.inv(Gm))
    sqrt_det = np.sqrt(np.linalg.det(Gm))
    gamma = np.zeros((n, n, n) + batch)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                acc = 0.0
                for l in range(n):
                    acc = acc + Ginv[k, l] * (dg[j, l, i] + dg[i, l, j]
                                              - dg[i, j, l])
                gamma[k, i, j] = 0.5 * acc
    return PointFrame(point=x, metric=G, inverse=Ginv, sqrt_det=sqrt_det,
                      christoffels=gamma, metric_partials=dg,
                      min_eigenvalue=min_eig)


def christoffel_jets(space: WeightedSpace, x,
                     jg: Optional[List[List[Jet]]] = None,
                     jginv: Optional[List[List[Jet]]] = None
                     ) -> List[List[List[Jet]]]:
    """Christoffel symbols as order-2 jets (for Ricci and Gamma2)."""
    if jg is None:
        jg = space.metric_jets(x)
    if jginv is None:
        jginv = jet_matrix_inverse(jg)
    n = space.dim
    djg = [[[jg[i][j].partial(l) for l in range(n)] for j in range(n)]
           for i in range(n)]
    out = []
    for k in range(n):
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = None
                for l in range(n):
                    t = jginv[k][l] * (djg[j][l][i] + djg[i][l][j]
                                       - djg[i][j][l])
                    acc = t if acc is None else acc + t
                row.append(0.5 * acc)
            rows.append(row)
        out.append(rows)
    return out


def ricci(space: WeightedSpace, x) -> np.ndarray:
    """Ricci tensor components R_ij at x, symmetrized."""
    x = as_points(space, x)
    n = space.dim
    jgam = christoffel_jets(space, x)
    batch = jgam[0][0][0].batch_shape
    gam = np.zeros((n, n, n) + batch)
    dgam = np.zeros((n, n, n, n) + batch)  # [k, i, j, l] = d_l G^k_ij
    for k in range(n):
        for i in range(n):
            for j in range(n):
                gam[k, i, j] = jgam[k][i][j].value
                for l in range(n):
                    dgam[k, i, j, l] = jgam[k][i][j].partial(l).value
    R = np.zeros((n, n) + batch)
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc = acc + dgam[k, i, j, k] - dgam[k, i, k, j]
                for l in range(n):
                    acc = acc + gam[k, k, l] * gam[l, i, j] \
                        - gam[k, j, l] * gam[l, i, k]
            R[i, j] = acc
    return 0.5 * (R + np.swapaxes(R, 0, 1))


def hessian(space: WeightedSpace, f: ScalarField, x,
            frame: Optional[PointFrame] = None) -> np.ndarray:
    """Covariant Hessian components (Hess f)_ij at x."""
    x = as_points(space, x)
    if frame is None:
        frame = frame_at(space, x)
    jf = f.jet(x)
    return hessian_from_jet(space, jf, frame)


def hessian_from_jet(space: WeightedSpace, jf: Jet,
                     frame: PointFrame) -> np.ndarray:
    n = space.dim
    df = [jf.partial(i) for i in range(n)]
    H = np.zeros((n, n) + jf.batch_shape)
    for i in range(n):
        for j in range(i, n):
            v = df[i].partial(j).value
            for k in range(n):
                v = v - frame.christoffels[k, i, j] * df[k].value
            H[i, j] = H[j, i] = v
    return H


def grad(space: WeightedSpace, f: ScalarField, x,
         frame: Optional[PointFrame] = None) -> np.ndarray:
    """Contravariant gradient components of f at x."""
    x = as_points(space, x)
    if frame is None:
        frame = frame_at(space, x)
    jf = f.jet(x)
    df = np.stack([jf.partial(i).value for i in range(space.dim)])
    return np.einsum("ij...,j...->i...", frame.inverse, df)


def gamma1(space: WeightedSpace, f: ScalarField, h: ScalarField, x,
           frame: Optional[PointFrame] = None) -> np.ndarray:
    """Carre du champ Gamma(f,h) = g^{ij} d_i f d_j h at x."""
    x = as_points(space, x)
    if frame is None:
        frame = frame_at(space, x)
    jf = f.jet(x)
    jh = jf if h is f else h.jet(x)
    df = np.stack([jf.partial(i).value for i in range(space.dim)])
    dh = df if jh is jf else np.stack(
        [jh.partial(i).value for i in range(space.dim)])
    return np.einsum("ij...,i...,j...->...", frame.inverse, df, dh)


def witten_laplacian(space: WeightedSpace, f: ScalarField, x,
                     frame: Optional[PointFrame] = None) -> np.ndarray:
    """L f = trace_g Hess f - Gamma(V, f) at x."""
    x = as_points(space, x)
    if frame is None:
        frame = frame_at(space, x)
    H = hessian(space, f, x, frame)
    lap = np.einsum("ij...,ij...->...", frame.inverse, H)
    return lap - gamma1(space, space.weight, f, x, frame)


def hs_norm_sq(space: WeightedSpace, H: np.ndarray, x,
               frame: Optional[PointFrame] = None) -> np.ndarray:
    """Squared Hilbert-Schmidt norm g^{ik} g^{jl} H_ij H_kl."""
    if frame is None:
        frame = frame_at(space, as_points(space, x))
    return np.einsum("ik...,jl...,ij...,kl...->...",
                     frame.inverse, frame.inverse, H, H)


def bakry_emery_ricci(space: WeightedSpace, x,
                      frame: Optional[PointFrame] = None) -> np.ndarray:
    """Ricci_V = Ricci + Hess V at x."""
    x = as_points(space, x)
    if frame is None:
        frame = frame_at(space, x)
    return ricci(space, x) + hessian(space, space.weight, x, frame)


@dataclass
class Gamma2Parts:
    """Jet-assembled intermediates of Gamma2 reused by the checkers."""

    frame: PointFrame
    f_jet: Jet                    # order 3
    gamma_ff_jet: Jet             # order 2: Gamma(f,f) as a field
    lf_jet: Jet                   # order 1: L f as a field
    gamma2: np.ndarray


def gamma2_parts(space: WeightedSpace, f: ScalarField, x) -> Gamma2Parts:
    """Gamma2(f) via operator composition over jets of one order lower."""
    x = as_points(space, x)
    n = space.dim
    jg = space.metric_jets(x)
    jginv = jet_matrix_inverse(jg)
    jgam = christoffel_jets(space, x, jg, jginv)
    frame = frame_at(space, x, jg)
    jf = f.jet(x)
    jV = space.weight.jet(x)
    df = [jf.partial(i) for i in range(n)]
    dV = [jV.partial(i) for i in range(n)]

    gamma_ff = None
    for i in range(n):
        for j in range(n):
            t = jginv[i][j] * df[i] * df[j]
            gamma_ff = t if gamma_ff is None else gamma_ff + t

    lf = None
    for i in range(n):
        for j in range(n):
            hij = df[i].partial(j)
            for k in range(n):
                hij = hij - jgam[k][i][j] * df[k]
            t = jginv[i][j] * (hij - dV[i] * df[j])
            lf = t if lf is None else lf + t

    half_l_gamma = 0.5 * _pointwise_witten(space, gamma_ff, jV, frame)
    dlf = np.stack([lf.partial(i).value for i in range(n)])
    dfv = np.stack([d.value for d in df])
    gamma_f_lf = np.einsum("ij...,i...,j...->...", frame.inverse, dfv, dlf)
    return Gamma2Parts(frame=frame, f_jet=jf, gamma_ff_jet=gamma_ff,
                       lf_jet=lf, gamma2=half_l_gamma - gamma_f_lf)


def _pointwise_witten(space: WeightedSpace, ju: Jet, jV: Jet,
                      frame: PointFrame) -> np.ndarray:
    """L u at one point from the (order >= 2) jet of u."""
    n = space.dim
    du = [ju.partial(i) for i in range(n)]
    acc = 0.0
    for i in range(n):
        for j in range(n):
            hij = du[i].partial(j).value
            for k in range(n):
                hij = hij - frame.christoffels[k, i, j] * du[k].value
            acc = acc + frame.inverse[i, j] * (
                hij - jV.partial(i).value * du[j].value)
    return acc


def gamma2(space: WeightedSpace, f: ScalarField, x) -> np.ndarray:
    return gamma2_parts(space, f, x).gamma2
