"""Truncated multivariate Taylor (jet) arithmetic.

A ``Jet`` stores the value and all partial derivatives of a scalar
quantity up to total order 3, in 1..4 chart variables, as dense
coefficients indexed by multi-indices alpha (the slot for alpha holds
``d^alpha u / alpha!``).  All operations are exact truncated Taylor
arithmetic: sums, Leibniz products, quotients and composition with the
elementary functions.  Coefficients may carry trailing batch axes, so a
single Jet can represent the same field evaluated at many points.

Jets are immutable values; every operation returns a fresh Jet.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

MAX_ORDER = 3
MAX_DIM = 4

UNARY_FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "tanh")


class JetError(ValueError):
    """Base error for jet arithmetic."""


class JetDomainError(JetError):
    """Elementary function evaluated outside its domain (log/sqrt/1/x)."""


class JetShapeError(JetError):
    """Dimension or order mismatch; a programming error, never silent."""


def ncoeffs(dim: int) -> int:
    return math.comb(dim + MAX_ORDER, MAX_ORDER)


def _compositions(total, dim):
    if dim == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, dim - 1):
            yield (head,) + rest


@lru_cache(maxsize=None)
def multi_indices(dim: int) -> tuple:
    """All multi-indices with |alpha| <= 3, graded lexicographic."""
    if not 1 <= dim <= MAX_DIM:
        raise JetShapeError(f"jet dimension must be 1..{MAX_DIM}, got {dim}")
    out = []
    for total in range(MAX_ORDER + 1):
        out.extend(sorted(_compositions(total, dim)))
    return tuple(out)


@lru_cache(maxsize=None)
def _slot_of(dim: int):
    return {alpha: k for k, alpha in enumerate(multi_indices(dim))}


@lru_cache(maxsize=None)
def _degrees(dim: int):
    return np.array([sum(a) for a in multi_indices(dim)])


@lru_cache(maxsize=None)
def _alpha_factorials(dim: int):
    return np.array([math.prod(math.factorial(ai) for ai in a)
                     for a in multi_indices(dim)], dtype=float)


@lru_cache(maxsize=None)
def _mul_table(dim: int):
    """Pair table for the Leibniz convolution, grouped by output slot.

    Returns (ii, jj, starts): coefficient pairs sorted by output slot so
    the product reduces with one ordered ``np.add.reduceat``.
    """
    idx = multi_indices(dim)
    slot = _slot_of(dim)
    triples = []
    for i, a in enumerate(idx):
        for j, b in enumerate(idx):
            c = tuple(x + y for x, y in zip(a, b))
            if sum(c) <= MAX_ORDER:
                triples.append((slot[c], i, j))
    triples.sort()
    kk = np.array([t[0] for t in triples])
    ii = np.array([t[1] for t in triples])
    jj = np.array([t[2] for t in triples])
    starts = np.searchsorted(kk, np.arange(ncoeffs(dim)))
    return ii, jj, starts


@lru_cache(maxsize=None)
def _partial_table(dim: int, axis: int):
    """(src, dst, mult) so that d[dst] = mult * c[src] is d/dx_axis."""
    idx = multi_indices(dim)
    slot = _slot_of(dim)
    src, dst, mult = [], [], []
    for k, a in enumerate(idx):
        if sum(a) >= MAX_ORDER:
            continue
        up = tuple(x + (1 if i == axis else 0) for i, x in enumerate(a))
        src.append(slot[up])
        dst.append(k)
        mult.append(a[axis] + 1)
    return np.array(src), np.array(dst), np.array(mult, dtype=float)


def _bshape(mult, nd):
    return mult.reshape((-1,) + (1,) * (nd - 1))


class Jet:
    """Order-3 truncated Taylor value in ``dim`` chart variables.

    ``coeffs`` has shape ``(ncoeffs(dim),) + batch``; slots above
    ``order`` are kept identically zero (internally reduced-order jets
    appear as intermediate results of differentiation).
    """

    __slots__ = ("dim", "order", "coeffs")

    def __init__(self, dim: int, coeffs, order: int = MAX_ORDER):
        self.dim = dim
        self.order = order
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.coeffs.shape[0] != ncoeffs(dim):
            raise JetShapeError(
                f"expected {ncoeffs(dim)} coefficients for dim {dim}, "
                f"got {self.coeffs.shape[0]}")

    # -- constructors -------------------------------------------------

    @staticmethod
    def constant(dim: int, value, batch_shape=()) -> "Jet":
        value = np.asarray(value, dtype=float)
        shape = np.broadcast_shapes(value.shape, batch_shape)
        coeffs = np.zeros((ncoeffs(dim),) + shape)
        coeffs[0] = value
        return Jet(dim, coeffs)

    @staticmethod
    def from_axis(dim: int, axis: int, coeffs1d, order: int = MAX_ORDER) -> "Jet":
        """Embed univariate Taylor coefficients along one chart axis."""
        coeffs1d = np.asarray(coeffs1d, dtype=float)
        slot = _slot_of(dim)
        coeffs = np.zeros((ncoeffs(dim),) + coeffs1d.shape[1:])
        for k in range(MAX_ORDER + 1):
            e = tuple(k if i == axis else 0 for i in range(dim))
            coeffs[slot[e]] = coeffs1d[k]
        return Jet(dim, coeffs, order)

    @property
    def value(self):
        return self.coeffs[0]

    @property
    def batch_shape(self):
        return self.coeffs.shape[1:]

    # -- helpers ------------------------------------------------------

    def _check_mate(self, other: "Jet"):
        if self.dim != other.dim:
            raise JetShapeError(
                f"jet dimension mismatch: {self.dim} vs {other.dim}")

    def _truncated(self, coeffs, order: int) -> "Jet":
        if order < MAX_ORDER:
            coeffs = np.where(
                _bshape(_degrees(self.dim) <= order, coeffs.ndim), coeffs, 0.0)
        return Jet(self.dim, coeffs, order)

    def truncate(self, order: int) -> "Jet":
        return self._truncated(self.coeffs, min(order, self.order))

    # -- ring operations ----------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check_mate(other)
            order = min(self.order, other.order)
            return self._truncated(self.coeffs + other.coeffs, order)
        coeffs = self.coeffs.copy()
        coeffs = coeffs + np.zeros(np.broadcast_shapes(
            coeffs.shape, (1,) + np.shape(other)))
        coeffs[0] = coeffs[0] + other
        return Jet(self.dim, coeffs, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.dim, -self.coeffs, self.order)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.dim, self.coeffs * np.asarray(other), self.order)
        self._check_mate(other)
        order = min(self.order, other.order)
        ii, jj, starts = _mul_table(self.dim)
        prod = self.coeffs[ii] * other.coeffs[jj]
        out = np.add.reduceat(prod, starts, axis=0)
        return self._truncated(out, order)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        v = self.value
        if np.any(v == 0.0):
            raise JetDomainError("division by a jet with zero value")
        return self.compose((1.0 / v, -1.0 / v**2, 2.0 / v**3, -6.0 / v**4))

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.dim, self.coeffs / np.asarray(other), self.order)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        return jet_pow(self, p)

    # -- calculus -----------------------------------------------------

    def partial(self, axis: int) -> "Jet":
        """Jet of du/dx_axis, one order lower."""
        if not 0 <= axis < self.dim:
            raise JetShapeError(f"axis {axis} out of range for dim {self.dim}")
        if self.order == 0:
            raise JetShapeError("cannot differentiate an order-0 jet")
        src, dst, mult = _partial_table(self.dim, axis)
        out = np.zeros_like(self.coeffs)
        out[dst] = self.coeffs[src] * _bshape(mult, self.coeffs.ndim)
        return self._truncated(out, self.order - 1)

    def compose(self, derivs) -> "Jet":
        """Compose with a univariate function given by its derivatives.

        ``derivs`` are d0..d3 of the outer function at ``self.value``
        (value-shaped arrays); returns the order-3 Taylor composition
        via Horner on the nilpotent part.
        """
        w = self.coeffs.copy()
        w[0] = 0.0
        wjet = Jet(self.dim, w, self.order)
        res = Jet.constant(self.dim, derivs[3] / 6.0, self.batch_shape)
        res = res * wjet + Jet.constant(self.dim, derivs[2] / 2.0, self.batch_shape)
        res = res * wjet + Jet.constant(self.dim, derivs[1], self.batch_shape)
        res = res * wjet + Jet.constant(self.dim, derivs[0], self.batch_shape)
        return res.truncate(self.order)

    def __repr__(self):
        return f"Jet(dim={self.dim}, order={self.order}, value={self.value!r})"


def seed_variable(axis: int, x) -> Jet:
    """Jet of the coordinate function x_axis at point(s) x (shape (dim,...))."""
    x = np.asarray(x, dtype=float)
    dim = x.shape[0]
    if not 0 <= axis < dim:
        raise JetShapeError(f"variable index {axis} out of range for dim {dim}")
    if not np.all(np.isfinite(x)):
        raise JetError("non-finite point coordinates")
    coeffs = np.zeros((ncoeffs(dim),) + x.shape[1:])
    coeffs[0] = x[axis]
    e = tuple(1 if i == axis else 0 for i in range(dim))
    coeffs[_slot_of(dim)[e]] = 1.0
    return Jet(dim, coeffs)


def extract(a: Jet, alpha) -> float:
    """Partial derivative d^alpha u (coefficient times alpha!)."""
    alpha = tuple(int(v) for v in alpha)
    if len(alpha) != a.dim:
        raise JetShapeError(f"multi-index length {len(alpha)} != dim {a.dim}")
    total = sum(alpha)
    if total > a.order:
        raise JetError(f"order overflow: |alpha|={total} > jet order {a.order}")
    k = _slot_of(a.dim)[alpha]
    fact = math.prod(math.factorial(v) for v in alpha)
    return a.coeffs[k] * fact


def apply_univariate(fn: str, a: Jet) -> Jet:
    """Compose a jet with one of the elementary functions by tag."""
    v = a.value
    if fn == "exp":
        e = np.exp(v)
        return a.compose((e, e, e, e))
    if fn == "sin":
        s, c = np.sin(v), np.cos(v)
        return a.compose((s, c, -s, -c))
    if fn == "cos":
        s, c = np.sin(v), np.cos(v)
        return a.compose((c, -s, -c, s))
    if fn == "tanh":
        t = np.tanh(v)
        s = 1.0 - t * t
        return a.compose((t, s, -2.0 * t * s, s * (6.0 * t * t - 2.0)))
    if fn == "log":
        if np.any(v <= 0.0):
            raise JetDomainError("log of a nonpositive jet value")
        return a.compose((np.log(v), 1.0 / v, -1.0 / v**2, 2.0 / v**3))
    if fn == "sqrt":
        if np.any(v <= 0.0):
            raise JetDomainError("sqrt of a nonpositive jet value")
        r = np.sqrt(v)
        return a.compose((r, 0.5 / r, -0.25 / (v * r), 0.375 / (v * v * r)))
    raise JetError(f"unknown elementary function {fn!r}")


def jet_pow(a: Jet, p) -> Jet:
    """a**p for a real exponent; integer exponents allow any base."""
    if isinstance(p, Jet):
        # a^p = exp(p*log a); requires a > 0
        return apply_univariate("exp", p * apply_univariate("log", a))
    p = float(p)
    if p == int(p) and abs(p) <= 16:
        n = int(p)
        if n == 0:
            return Jet.constant(a.dim, np.ones(a.batch_shape))
        base = a if n > 0 else a.reciprocal()
        out = base
        for _ in range(abs(n) - 1):
            out = out * base
        return out
    v = a.value
    if np.any(v <= 0.0):
        raise JetDomainError(
            f"non-integer power {p} of a nonpositive jet value")
    return a.compose((v**p, p * v**(p - 1), p * (p - 1) * v**(p - 2),
                      p * (p - 1) * (p - 2) * v**(p - 3)))
