"""Assemble and serialize check suites for one space.

A ``Target`` bundles everything a run needs: the space, sampling plan,
cutoff, Neumann base expressions, and test-density expressions.  Targets
come from the zoo or from an INI space file.  ``run_suite`` executes the
full check battery; the render functions emit deterministic text, JSON,
or CSV (ordered reductions, fixed field order, no wall clock except the
explicitly labeled timing field).
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .boundary import NeumannTestFunction, second_fundamental_form
from .config import SpaceConfig
from .fields import CutoffField, CutoffSpec, ExprField, ScalarField
from .geometry import WeightedSpace, bakry_emery_ricci, frame_at
from .verify import (CheckResult, CurvatureReport, SamplePlan, boundary_grid,
                     certify, check_bochner, check_dimension_term,
                     check_green, check_ii_identity, check_mv_laplacian,
                     check_ricci_decomposition, eigenvalues_relative,
                     flatness_report, interior_grid)

_VAR_NAMES = ("x", "y", "z", "w")


@dataclass
class Target:
    label: str
    space: WeightedSpace
    plan: SamplePlan
    cutoff: Optional[CutoffSpec]
    neumann_bases: List[str]
    h_sources: List[str]
    collars: Tuple[CutoffSpec, ...] = ()
    expected: Dict[str, float] = field(default_factory=dict)
    expressions: Dict[str, str] = field(default_factory=dict)

    def neumann(self, w_src: Optional[str] = None) -> NeumannTestFunction:
        from .boundary import make_neumann
        if self.cutoff is None:
            raise ValueError(
                f"{self.label}: no cutoff available; theorem-grade checks "
                f"need a [cutoff] section or a zoo entry")
        src = w_src if w_src is not None else self.neumann_bases[0]
        return make_neumann(self.space, ExprField(src, self.space.dim),
                            self.cutoff, self.collars, label=src)

    def h_field(self, src: Optional[str] = None) -> ScalarField:
        if self.cutoff is None:
            raise ValueError(
                f"{self.label}: no cutoff available for a test density")
        chi = CutoffField(self.cutoff)
        if src is None and not self.h_sources:
            return chi
        return chi * ExprField(src if src is not None else self.h_sources[0],
                               self.space.dim)

    def random_fields(self, count: int, seed: int) -> List[ScalarField]:
        from .zoo import random_fields
        return random_fields(self.space.dim, count, seed)


def target_from_zoo(entry) -> Target:
    return Target(label=entry.space.label, space=entry.space,
                  plan=entry.plan, cutoff=entry.cutoff,
                  neumann_bases=list(entry.neumann_bases),
                  h_sources=list(entry.h_sources),
                  collars=entry.neumann_collars,
                  expected=dict(entry.expected))


def target_from_config(cfg: SpaceConfig) -> Target:
    dim = cfg.space.dim
    bases = [f"0.3*{_VAR_NAMES[i]}" for i in range(dim)]
    return Target(label=cfg.source_path, space=cfg.space, plan=cfg.plan,
                  cutoff=cfg.cutoff, neumann_bases=bases, h_sources=[],
                  expressions=dict(cfg.expressions))


def bochner_points(target: Target, limit: int = 100) -> np.ndarray:
    x = interior_grid(target.space, target.plan.interior_counts)
    if x.shape[1] > limit:
        idx = np.linspace(0, x.shape[1] - 1, limit).astype(int)
        x = x[:, idx]
    return x


def run_suite(target: Target, k_list: Sequence[float] = (0.0,),
              n_list: Sequence[float] = ()) -> Dict:
    """Full battery: pointwise checks, weak identities, certificates."""
    space, plan = target.space, target.plan
    results: List[CheckResult] = []
    fields = target.random_fields(10, seed=11)
    results.append(check_bochner(space, fields, bochner_points(target)))
    results.append(check_dimension_term(
        space, fields, bochner_points(target), float(space.dim)))
    g = target.neumann()
    h = target.h_field()
    results.append(check_green(space, h, g, plan.quad_interior,
                               plan.quad_boundary))
    results.append(check_mv_laplacian(space, g, h, plan.quad_interior,
                                      plan.quad_boundary))
    results.append(check_ii_identity(
        space, g, boundary_counts=plan.boundary_counts))
    results.append(check_ricci_decomposition(
        space, g, h, plan.quad_interior, plan.quad_boundary,
        plan.boundary_counts))
    cert = certify(space, k_list, n_list, plan=plan)
    flat = flatness_report(space, plan=plan)
    return {
        "label": target.label,
        "checks": results,
        "certificate": cert,
        "flatness": flat,
        "passed": all(r.passed for r in results),
    }


def suite_to_dict(suite: Dict, timing: Optional[float] = None) -> Dict:
    out = {
        "label": suite["label"],
        "checks": [r.to_dict() for r in suite["checks"]],
        "certificate": suite["certificate"].to_dict(),
        "flatness": suite["flatness"].to_dict(),
        "passed": suite["passed"],
    }
    if timing is not None:
        out["timing_seconds"] = timing
    return out


def render_text(suite: Dict, timing: Optional[float] = None) -> str:
    lines = [f"space: {suite['label']}", ""]
    for r in suite["checks"]:
        lines.append(str(r))
    lines.append("")
    cert: CurvatureReport = suite["certificate"]
    lines.append("curvature certificate (sampled necessary conditions):")
    lines.append(f"  K_interior    = {cert.k_interior:.12g}")
    lines.append(f"  lambda_min_II = {cert.lambda_min_ii:.12g}")
    lines.append(f"  lambda_max_II = {cert.lambda_max_ii:.12g}")
    lines.append(f"  tr II range   = [{cert.tr_ii_range[0]:.12g}, "
                 f"{cert.tr_ii_range[1]:.12g}]")
    for k, ok in cert.rcd_infinity.items():
        lines.append(f"  RCD({k:g}, inf): {'holds on samples' if ok else 'FAILS'}")
    for (k, n), ok in cert.rcd_star.items():
        lines.append(f"  RCD*({k:g}, {n:g}): "
                     f"{'holds on samples' if ok else 'FAILS'}")
    flat = suite["flatness"]
    lines.append("")
    lines.append(f"flatness: strong={flat.metadata['strong_flat']} "
                 f"interior={flat.metadata['interior_flat']} "
                 f"minimal_boundary={flat.metadata['minimal_trace']}")
    lines.append("")
    lines.append(f"overall: {'PASS' if suite['passed'] else 'FAIL'}")
    if timing is not None:
        lines.append(f"timing_seconds: {timing:.3f}")
    return "\n".join(lines) + "\n"


def render_json(suite: Dict, timing: Optional[float] = None) -> str:
    return json.dumps(suite_to_dict(suite, timing), indent=2) + "\n"


def render_csv(target: Target) -> str:
    """Per-sample eigenvalue dump for external plotting."""
    space, plan = target.space, target.plan
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["kind", "index", "x1", "x2", "x3", "x4",
                 "value_a", "value_b"])

    def coords(x, k):
        col = [f"{v:.17g}" for v in (x if x.ndim == 1 else x[:, k])]
        return col + [""] * (4 - len(col))

    x = interior_grid(space, plan.interior_counts)
    frame = frame_at(space, x)
    eigs = eigenvalues_relative(bakry_emery_ricci(space, x, frame),
                                frame.metric)
    for k in range(x.shape[1]):
        wr.writerow(["interior", k] + coords(x, k)
                    + [f"{eigs[k, 0]:.17g}", f"{eigs[k, -1]:.17g}"])
    idx = 0
    for xb in boundary_grid(space, plan.boundary_counts):
        II = second_fundamental_form(space, xb)
        eig = np.linalg.eigvalsh(np.moveaxis(II, (0, 1), (-2, -1)))
        tr = np.einsum("aa...->...", II)
        for k in range(xb.shape[1]):
            wr.writerow(["boundary", idx] + coords(xb, k)
                        + [f"{eig[k, 0]:.17g}", f"{tr[k]:.17g}"])
            idx += 1
    return buf.getvalue()


def timed_suite(target: Target, k_list=(0.0,), n_list=()):
    t0 = time.perf_counter()
    suite = run_suite(target, k_list, n_list)
    return suite, time.perf_counter() - t0
