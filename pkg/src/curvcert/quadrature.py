"""Gauss-Legendre quadrature against the weighted volume and boundary
measures.

Interior integrals use a tensor-product rule over the chart box with the
density exp(-V) sqrt(det g); nodes with phi >= 0 contribute zero, which
is exact for integrands carrying a compact-support cutoff inside Omega
(all built-in spaces place the boundary on chart-box faces, so the
clipping never cuts through the support).  Boundary integrals run over
parametrized patches with the pullback density exp(-V) sqrt(det Gram).

Reductions are ordered (numpy pairwise summation over a fixed node
ordering), so results are reproducible bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .fields import ScalarField
from .geometry import WeightedSpace, frame_at

DEFAULT_INTERIOR_NODES = 64
DEFAULT_BOUNDARY_NODES = 256
GRAM_FLOOR = 1e-12
PATCH_PHI_TOL = 1e-8

Integrand = Callable[[np.ndarray], np.ndarray]


class QuadratureError(ValueError):
    """Non-finite integrand, degenerate patch, or singular density."""


@dataclass
class BoundaryPatch:
    """A parametrized piece of the boundary {phi = 0}.

    ``maps[i]`` is a scalar field of the (n-1) patch parameters giving
    the i-th chart coordinate of the boundary point.
    """

    param_box: Sequence[Tuple[float, float]]
    maps: Sequence[ScalarField]
    label: str = ""

    @property
    def param_dim(self) -> int:
        return len(self.param_box)


def gauss_rule(lo: float, hi: float, m: int):
    """m-point Gauss-Legendre nodes/weights on [lo, hi]."""
    if m < 1:
        raise QuadratureError(f"node count must be >= 1, got {m}")
    t, w = np.polynomial.legendre.leggauss(m)
    half = 0.5 * (hi - lo)
    return lo + half * (t + 1.0), half * w


def tensor_rule(box, counts):
    """Tensor-product nodes (d, M) and weights (M,) over a box."""
    axes = [gauss_rule(lo, hi, m) for (lo, hi), m in zip(box, counts)]
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    wgrids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    pts = np.stack([g.ravel() for g in grids])
    wts = np.prod(np.stack([w.ravel() for w in wgrids]), axis=0)
    return pts, wts


def _counts(counts, d, default):
    if counts is None:
        return (default,) * d
    if isinstance(counts, int):
        return (counts,) * d
    counts = tuple(int(c) for c in counts)
    if len(counts) != d:
        raise QuadratureError(f"expected {d} node counts, got {len(counts)}")
    return counts


def integrate_interior(space: WeightedSpace, F: Integrand,
                       counts=None, chunk: int = 16384) -> float:
    """Integral of F over Omega = {phi < 0} against exp(-V) dVol_g."""
    counts = _counts(counts, space.dim, DEFAULT_INTERIOR_NODES)
    pts, wts = tensor_rule(space.chart_box, counts)
    total = np.zeros(pts.shape[1])
    for start in range(0, pts.shape[1], chunk):
        sl = slice(start, start + chunk)
        x = pts[:, sl]
        phi = np.asarray(space.defining_fn.value(x))
        inside = phi < 0.0
        fv = np.asarray(F(x)) * inside
        if not np.all(np.isfinite(fv)):
            bad = int(np.argmax(~np.isfinite(fv)))
            raise QuadratureError(
                f"non-finite integrand value at node {x[:, bad]}")
        frame = frame_at(space, x)
        if np.any((np.abs(fv) > 0) & (frame.sqrt_det <= GRAM_FLOOR)):
            raise QuadratureError(
                "integrand supported on a chart-singular node "
                "(sqrt det g below floor)")
        dens = np.exp(-np.asarray(space.weight.value(x))) * frame.sqrt_det
        total[sl] = wts[sl] * fv * dens
    return float(np.sum(total))


def _patch_geometry(space: WeightedSpace, patch: BoundaryPatch, s: np.ndarray):
    """Image points, tangent pushforwards and Gram density on a patch."""
    n = space.dim
    d = patch.param_dim
    if d != n - 1:
        raise QuadratureError(
            f"patch has {d} parameters, expected {n - 1}")
    jmaps = [patch.maps[i].jet(s) for i in range(n)]
    x = np.stack([j.value for j in jmaps])
    phi = np.asarray(space.defining_fn.value(x))
    if np.any(np.abs(phi) > PATCH_PHI_TOL):
        raise QuadratureError(
            f"patch image leaves the boundary: |phi| = "
            f"{np.max(np.abs(phi)):.3e} > {PATCH_PHI_TOL}")
    T = np.stack([np.stack([jmaps[i].partial(a).value for i in range(n)])
                  for a in range(d)])  # (d, n, ...)
    frame = frame_at(space, x)
    gram = np.einsum("ai...,ij...,bj...->ab...", T, frame.metric, T)
    gram_mat = np.moveaxis(gram, (0, 1), (-2, -1))
    det = np.linalg.det(gram_mat)
    if np.any(det <= GRAM_FLOOR):
        raise QuadratureError(
            f"degenerate patch Gram determinant ({np.min(det):.3e})")
    return x, np.sqrt(det), frame


def integrate_boundary(space: WeightedSpace, F: Integrand,
                       patch: BoundaryPatch, counts=None) -> float:
    """Integral of F over a boundary patch against exp(-V) dH^{n-1}."""
    counts = _counts(counts, patch.param_dim, DEFAULT_BOUNDARY_NODES)
    s, wts = tensor_rule(patch.param_box, counts)
    x, dens_gram, _ = _patch_geometry(space, patch, s)
    fv = np.asarray(F(x))
    if not np.all(np.isfinite(fv)):
        bad = int(np.argmax(~np.isfinite(fv)))
        raise QuadratureError(f"non-finite integrand value at node {x[:, bad]}")
    dens = np.exp(-np.asarray(space.weight.value(x))) * dens_gram
    return float(np.sum(wts * fv * dens))


def integrate_boundary_all(space: WeightedSpace, F: Integrand,
                           counts=None) -> float:
    """Sum of the patch integrals over every declared boundary patch."""
    if not space.boundary_patches:
        raise QuadratureError("space declares no boundary patches")
    return float(sum(integrate_boundary(space, F, p, counts)
                     for p in space.boundary_patches))


def patch_points(space: WeightedSpace, patch: BoundaryPatch, counts=None,
                 midpoint: bool = False) -> np.ndarray:
    """Boundary sample points (chart coordinates) on a patch grid."""
    counts = _counts(counts, patch.param_dim, DEFAULT_BOUNDARY_NODES)
    if midpoint:
        axes = [lo + (hi - lo) * (np.arange(m) + 0.5) / m
                for (lo, hi), m in zip(patch.param_box, counts)]
        grids = np.meshgrid(*axes, indexing="ij")
        s = np.stack([g.ravel() for g in grids])
    else:
        s, _ = tensor_rule(patch.param_box, counts)
    x, _, _ = _patch_geometry(space, patch, s)
    return x
