"""Scalar fields on a chart: expression-backed, cutoffs, combinators.

A field maps chart points (shape ``(dim,)`` or ``(dim, m)``) to order-3
jets.  Jet-wise arithmetic on fields is exact through order 3, so
products/sums/quotients of fields with exact jets again have exact jets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from . import exprlang
from .jets import Jet, seed_variable

Box = Sequence[Tuple[float, float]]


class ScalarField:
    """Base: a C^3 scalar field evaluable to order-3 jets."""

    dim: int

    def jet(self, x) -> Jet:
        raise NotImplementedError

    def value(self, x):
        return self.jet(x).value

    def __add__(self, other):
        return _BinField("+", self, _coerce(other, self.dim))

    def __radd__(self, other):
        return _BinField("+", _coerce(other, self.dim), self)

    def __sub__(self, other):
        return _BinField("-", self, _coerce(other, self.dim))

    def __rsub__(self, other):
        return _BinField("-", _coerce(other, self.dim), self)

    def __mul__(self, other):
        return _BinField("*", self, _coerce(other, self.dim))

    def __rmul__(self, other):
        return _BinField("*", _coerce(other, self.dim), self)

    def __truediv__(self, other):
        return _BinField("/", self, _coerce(other, self.dim))

    def __neg__(self):
        return _BinField("-", ConstField(self.dim, 0.0), self)


def _coerce(v, dim) -> "ScalarField":
    if isinstance(v, ScalarField):
        return v
    return ConstField(dim, float(v))


class ConstField(ScalarField):
    def __init__(self, dim: int, value: float):
        self.dim = dim
        self._value = float(value)

    def jet(self, x) -> Jet:
        x = np.asarray(x, dtype=float)
        return Jet.constant(self.dim, self._value, x.shape[1:])

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self._value, x.shape[1:]).copy() \
            if x.ndim > 1 else self._value

    def __repr__(self):
        return f"ConstField({self._value})"


class ExprField(ScalarField):
    """Field defined by an expression-language AST (or source text)."""

    def __init__(self, src, dim: int):
        self.dim = dim
        if isinstance(src, str):
            self.ast = exprlang.parse(src, dim)
            self.source = src
        else:
            self.ast = src
            self.source = exprlang.to_source(src)

    def jet(self, x) -> Jet:
        return exprlang.evaluate(self.ast, x)

    def value(self, x):
        return exprlang.evaluate_value(self.ast, np.asarray(x, dtype=float))

    def __repr__(self):
        return f"ExprField({self.source!r})"


class _BinField(ScalarField):
    def __init__(self, op: str, a: ScalarField, b: ScalarField):
        if a.dim != b.dim:
            raise ValueError("field dimension mismatch")
        self.dim = a.dim
        self.op = op
        self.a = a
        self.b = b

    def jet(self, x) -> Jet:
        ja = self.a.jet(x)
        jb = self.b.jet(x)
        if self.op == "+":
            return ja + jb
        if self.op == "-":
            return ja - jb
        if self.op == "*":
            return ja * jb
        return ja / jb


# -- smooth plateau cutoff ---------------------------------------------


def _bump_h(t):
    """exp(-1/t) for t > 0, 0 otherwise: value and derivatives 1..3."""
    t = np.asarray(t, dtype=float)
    pos = t > 1e-12
    ts = np.where(pos, t, 1.0)
    h = np.where(pos, np.exp(-1.0 / ts), 0.0)
    h1 = np.where(pos, h / ts**2, 0.0)
    h2 = np.where(pos, h * (1.0 - 2.0 * ts) / ts**4, 0.0)
    h3 = np.where(pos, h * (1.0 - 6.0 * ts + 6.0 * ts**2) / ts**6, 0.0)
    return np.stack([h, h1, h2, h3])


def _smoothstep_jets(t):
    """Taylor coefficients (c0..c3) of s(t)=h(t)/(h(t)+h(1-t)) at t."""
    t = np.asarray(t, dtype=float)
    ha = _bump_h(np.clip(t, None, 1.0))
    hb = _bump_h(1.0 - np.clip(t, 0.0, None))
    hb[1::2] *= -1.0  # chain rule for t -> 1-t on odd orders
    fact = np.array([1.0, 1.0, 2.0, 6.0]).reshape((4,) + (1,) * t.ndim)
    ja = Jet(1, ha / fact)
    jb = Jet(1, hb / fact)
    denom = ja + jb
    s = (ja / denom).coeffs
    lo = t <= 0.0
    hi = t >= 1.0
    s[0] = np.where(lo, 0.0, np.where(hi, 1.0, s[0]))
    for k in range(1, 4):
        s[k] = np.where(lo | hi, 0.0, s[k])
    return s


@dataclass(frozen=True)
class CutoffSpec:
    """Plateau support boxes: value 1 on ``inner``, 0 outside ``outer``.

    On a side where the inner and outer bounds coincide the cutoff does
    not taper (it stays 1 through that edge), which is how supports are
    allowed to touch the boundary of the domain.
    """

    inner: Tuple[Tuple[float, float], ...]
    outer: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        if len(self.inner) != len(self.outer):
            raise ValueError("inner/outer box dimension mismatch")
        for (ilo, ihi), (olo, ohi) in zip(self.inner, self.outer):
            if not (olo <= ilo <= ihi <= ohi):
                raise ValueError(
                    f"cutoff boxes must nest: outer ({olo},{ohi}) "
                    f"inner ({ilo},{ihi})")


def make_cutoff_spec(inner: Box, outer: Box) -> CutoffSpec:
    return CutoffSpec(tuple((float(a), float(b)) for a, b in inner),
                      tuple((float(a), float(b)) for a, b in outer))


class CutoffField(ScalarField):
    """C-infinity plateau bump built from t -> exp(-1/(1-t^2)) edges."""

    def __init__(self, spec: CutoffSpec):
        self.dim = len(spec.inner)
        self.spec = spec

    def _axis_coeffs(self, xi, axis):
        """(4, ...) univariate Taylor coefficients of the axis factor."""
        (ilo, ihi) = self.spec.inner[axis]
        (olo, ohi) = self.spec.outer[axis]
        out = np.zeros((4,) + np.shape(xi))
        out[0] = 1.0
        jet = Jet(1, out)
        if ilo > olo:
            scale = 1.0 / (ilo - olo)
            c = _smoothstep_jets((xi - olo) * scale)
            c *= (scale ** np.arange(4)).reshape((4,) + (1,) * np.ndim(xi))
            jet = jet * Jet(1, c)
        if ohi > ihi:
            scale = 1.0 / (ohi - ihi)
            c = _smoothstep_jets((ohi - xi) * scale)
            c *= ((-scale) ** np.arange(4)).reshape((4,) + (1,) * np.ndim(xi))
            jet = jet * Jet(1, c)
        return jet.coeffs

    def jet(self, x) -> Jet:
        x = np.asarray(x, dtype=float)
        out = Jet.constant(self.dim, 1.0, x.shape[1:])
        for i in range(self.dim):
            out = out * Jet.from_axis(self.dim, i, self._axis_coeffs(x[i], i))
        return out

    def value(self, x):
        x = np.asarray(x, dtype=float)
        out = np.ones(x.shape[1:]) if x.ndim > 1 else 1.0
        for i in range(self.dim):
            out = out * self._axis_coeffs(x[i], i)[0]
        return out

    def __repr__(self):
        return f"CutoffField(inner={self.spec.inner}, outer={self.spec.outer})"
