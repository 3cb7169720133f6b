"""Truncated multivariate Taylor arithmetic (scalar jets).

A :class:`Jet` stores the Taylor coefficients ``c[alpha] = d^alpha f / alpha!``
of a smooth function at a base point, for every multi-index ``alpha`` of total
degree <= ``order`` (at most :data:`MAX_ORDER`).  Coefficients live in a dense
float array whose last axis enumerates multi-indices in graded lexicographic
order, so indices of degree <= k always form a prefix and truncation is a
slice.  Leading axes of the coefficient array are broadcastable batch axes:
one jet object can carry a whole batch of evaluation points.

Arithmetic truncates to the smaller operand order; differentiating drops the
order by one.  Products are convolutions driven by a precomputed pair table
and ``np.add.reduceat``, keeping the per-operation cost one vectorized numpy
pass regardless of batch size.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

MAX_ORDER = 4


class JetDomainError(ArithmeticError):
    """An elementary function was evaluated outside its smooth domain."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


def _degree_block(num_vars, deg):
    if num_vars == 1:
        return [(deg,)]
    block = []
    for first in range(deg, -1, -1):
        for rest in _degree_block(num_vars - 1, deg - first):
            block.append((first,) + rest)
    return block


@lru_cache(maxsize=None)
def multi_indices(num_vars, order):
    """All multi-indices with |alpha| <= order, graded lexicographic."""
    out = []
    for deg in range(order + 1):
        out.extend(_degree_block(num_vars, deg))
    return tuple(out)


@lru_cache(maxsize=None)
def _positions(num_vars, order):
    return {mi: p for p, mi in enumerate(multi_indices(num_vars, order))}


@lru_cache(maxsize=None)
def _ncoef(num_vars, order):
    return math.comb(num_vars + order, order)


@lru_cache(maxsize=None)
def _mul_table(num_vars, order):
    # pairs (ia, ib) grouped by output position, plus reduceat segment starts
    mids = multi_indices(num_vars, order)
    pos = _positions(num_vars, order)
    degs = [sum(mi) for mi in mids]
    groups = [[] for _ in mids]
    for ia, a in enumerate(mids):
        for ib, b in enumerate(mids):
            if degs[ia] + degs[ib] <= order:
                groups[pos[tuple(x + y for x, y in zip(a, b))]].append((ia, ib))
    ia_flat, ib_flat, seg = [], [], []
    for g in groups:
        seg.append(len(ia_flat))
        for ia, ib in g:
            ia_flat.append(ia)
            ib_flat.append(ib)
    return (np.array(ia_flat, dtype=np.intp), np.array(ib_flat, dtype=np.intp),
            np.array(seg, dtype=np.intp))


@lru_cache(maxsize=None)
def _diff_table(num_vars, order):
    # axis j: positions of beta+e_j inside the order table, and weights beta_j+1,
    # mapping an order jet onto the order-1 coefficient layout
    lower = multi_indices(num_vars, order - 1)
    pos = _positions(num_vars, order)
    idx = np.empty((num_vars, len(lower)), dtype=np.intp)
    wgt = np.empty((num_vars, len(lower)))
    for j in range(num_vars):
        for p, a in enumerate(lower):
            idx[j, p] = pos[a[:j] + (a[j] + 1,) + a[j + 1:]]
            wgt[j, p] = a[j] + 1
    return idx, wgt


@lru_cache(maxsize=None)
def _factorials(num_vars, order):
    return np.array([math.prod(math.factorial(k) for k in mi)
                     for mi in multi_indices(num_vars, order)])


class Jet:
    """Taylor expansion of a scalar function truncated at ``order``."""

    __slots__ = ("num_vars", "order", "coeffs")

    # keep ndarray operands from absorbing jets elementwise; with ufuncs
    # disabled, ndarray <op> Jet falls through to the reflected methods
    __array_ufunc__ = None

    def __init__(self, num_vars, order, coeffs):
        self.num_vars = num_vars
        self.order = order
        self.coeffs = coeffs

    # -- construction ------------------------------------------------------

    @classmethod
    def variable(cls, index, value, num_vars, order=MAX_ORDER):
        if not 0 <= index < num_vars:
            raise ValueError(f"variable index {index} out of range for {num_vars} variables")
        value = np.asarray(value, dtype=float)
        coeffs = np.zeros(value.shape + (_ncoef(num_vars, order),))
        coeffs[..., 0] = value
        coeffs[..., _positions(num_vars, order)[
            tuple(1 if k == index else 0 for k in range(num_vars))]] = 1.0
        return cls(num_vars, order, coeffs)

    @classmethod
    def constant(cls, value, num_vars, order=MAX_ORDER):
        value = np.asarray(value, dtype=float)
        coeffs = np.zeros(value.shape + (_ncoef(num_vars, order),))
        coeffs[..., 0] = value
        return cls(num_vars, order, coeffs)

    # -- coefficient access ------------------------------------------------

    @property
    def value(self):
        return self.coeffs[..., 0]

    def partial(self, alpha):
        """The partial derivative d^alpha f at the base point."""
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.num_vars or any(a < 0 for a in alpha):
            raise ValueError(f"bad multi-index {alpha} for {self.num_vars} variables")
        if sum(alpha) > self.order:
            raise ValueError(f"multi-index {alpha} exceeds jet order {self.order}")
        p = _positions(self.num_vars, self.order)[alpha]
        return self.coeffs[..., p] * _factorials(self.num_vars, self.order)[p]

    def is_constant(self):
        return bool(np.all(self.coeffs[..., 1:] == 0.0))

    def truncated(self, order):
        if order >= self.order:
            return self
        return Jet(self.num_vars, order, self.coeffs[..., :_ncoef(self.num_vars, order)])

    def derivative(self, axis):
        """The jet of df/dx_axis, one order lower."""
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        idx, wgt = _diff_table(self.num_vars, self.order)
        return Jet(self.num_vars, self.order - 1, self.coeffs[..., idx[axis]] * wgt[axis])

    # -- ring operations ----------------------------------------------------

    def _pair(self, other):
        order = min(self.order, other.order)
        nc = _ncoef(self.num_vars, order)
        return order, self.coeffs[..., :nc], other.coeffs[..., :nc]

    def __add__(self, other):
        if isinstance(other, Jet):
            order, ca, cb = self._pair(other)
            return Jet(self.num_vars, order, ca + cb)
        out = self.coeffs.copy()
        out[..., 0] += other
        return Jet(self.num_vars, self.order, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.num_vars, self.order, -self.coeffs)

    def __sub__(self, other):
        if isinstance(other, Jet):
            order, ca, cb = self._pair(other)
            return Jet(self.num_vars, order, ca - cb)
        out = self.coeffs.copy()
        out[..., 0] -= other
        return Jet(self.num_vars, self.order, out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            order, ca, cb = self._pair(other)
            ia, ib, seg = _mul_table(self.num_vars, order)
            ca, cb = np.broadcast_arrays(ca, cb)
            return Jet(self.num_vars, order,
                       np.add.reduceat(ca[..., ia] * cb[..., ib], seg, axis=-1))
        return Jet(self.num_vars, self.order,
                   self.coeffs * np.asarray(other, dtype=float)[..., None])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other._reciprocal()
        arr = np.asarray(other, dtype=float)
        if np.any(arr == 0.0):
            raise JetDomainError("division by zero", value=arr)
        return self * (1.0 / arr)

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def __pow__(self, exponent):
        return power(self, exponent)

    # -- composition with univariate smooth functions -----------------------

    def _compose(self, taylor):
        """sum_k taylor[k] * (self - value)^k, taylor[k] ~ f^(k)(value)/k!."""
        uhat = Jet(self.num_vars, self.order, self.coeffs.copy())
        uhat.coeffs[..., 0] = 0.0
        out = np.zeros_like(self.coeffs)
        out[..., 0] = taylor[0]
        acc = uhat
        for k in range(1, self.order + 1):
            out = out + np.asarray(taylor[k], dtype=float)[..., None] * acc.coeffs
            if k < self.order:
                acc = acc * uhat
        return Jet(self.num_vars, self.order, out)

    def _reciprocal(self):
        v = self.value
        if np.any(v == 0.0):
            raise JetDomainError("division by a jet with zero value", value=v)
        r = 1.0 / v
        return self._compose([r, -r * r, r ** 3, -(r ** 4), r ** 5][: self.order + 1])

    def exp(self):
        v = np.exp(self.value)
        return self._compose([v, v, v / 2.0, v / 6.0, v / 24.0][: self.order + 1])

    def ln(self):
        v = self.value
        if np.any(v <= 0.0):
            raise JetDomainError("ln of a nonpositive value", value=v)
        r = 1.0 / v
        return self._compose([np.log(v), r, -r * r / 2.0, r ** 3 / 3.0,
                              -(r ** 4) / 4.0][: self.order + 1])

    def sin(self):
        s, c = np.sin(self.value), np.cos(self.value)
        return self._compose([s, c, -s / 2.0, -c / 6.0, s / 24.0][: self.order + 1])

    def cos(self):
        s, c = np.sin(self.value), np.cos(self.value)
        return self._compose([c, -s, -c / 2.0, s / 6.0, c / 24.0][: self.order + 1])

    def sqrt(self):
        v = self.value
        if np.any(v <= 0.0):
            raise JetDomainError("sqrt of a nonpositive value", value=v)
        s = np.sqrt(v)
        return self._compose([s, 0.5 / s, -1.0 / (8.0 * s * v),
                              1.0 / (16.0 * s * v * v),
                              -5.0 / (128.0 * s * v ** 3)][: self.order + 1])

    def _pow_real(self, p):
        v = self.value
        if np.any(v <= 0.0):
            raise JetDomainError("non-integer power of a nonpositive base", value=v)
        p = np.asarray(p, dtype=float)
        taylor, coeff = [], np.ones(np.broadcast(v, p).shape)
        for k in range(self.order + 1):
            taylor.append(coeff * np.power(v, p - k))
            coeff = coeff * (p - k) / (k + 1.0)
        return self._compose(taylor)

    def _pow_int(self, k):
        if k < 0:
            return self._pow_int(-k)._reciprocal()
        out = Jet.constant(np.ones(self.value.shape), self.num_vars, self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __repr__(self):
        return f"Jet(num_vars={self.num_vars}, order={self.order}, value={self.value!r})"


# -- public functional surface ----------------------------------------------

def seed_variable(index, value, num_vars, order=MAX_ORDER):
    """Jet of the coordinate function x_index at the given base value."""
    return Jet.variable(index, value, num_vars, order)


def extract_partial(jet, alpha):
    """d^alpha of the function the jet represents, at the base point."""
    return jet.partial(alpha)


def exp(x):
    return x.exp() if isinstance(x, Jet) else np.exp(x)


def ln(x):
    if isinstance(x, Jet):
        return x.ln()
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise JetDomainError("ln of a nonpositive value", value=x)
    return np.log(x)


def sin(x):
    return x.sin() if isinstance(x, Jet) else np.sin(x)


def cos(x):
    return x.cos() if isinstance(x, Jet) else np.cos(x)


def sqrt(x):
    if isinstance(x, Jet):
        return x.sqrt()
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise JetDomainError("sqrt of a nonpositive value", value=x)
    return np.sqrt(x)


def divide(num, den):
    if isinstance(num, Jet) or isinstance(den, Jet):
        if not isinstance(num, Jet):
            return den.__rtruediv__(num)
        return num / den
    den = np.asarray(den, dtype=float)
    if np.any(den == 0.0):
        raise JetDomainError("division by zero", value=den)
    return np.asarray(num, dtype=float) / den


def power(base, exponent):
    """base ** exponent with exact handling of integer exponents.

    Integer exponents go through repeated multiplication and are valid at
    negative bases; anything else requires a strictly positive base.
    """
    if isinstance(exponent, Jet):
        if exponent.is_constant():
            exponent = exponent.value
        else:
            return exp(exponent * ln(base))
    e = np.asarray(exponent, dtype=float)
    if e.ndim == 0 and float(e) == int(e):
        k = int(e)
        if isinstance(base, Jet):
            return base._pow_int(k)
        base = np.asarray(base, dtype=float)
        if k < 0 and np.any(base == 0.0):
            raise JetDomainError("zero base with negative exponent", value=base)
        return np.power(base, k)
    if isinstance(base, Jet):
        return base._pow_real(e)
    base = np.asarray(base, dtype=float)
    if np.any(base <= 0.0):
        raise JetDomainError("non-integer power of a nonpositive base", value=base)
    return np.power(base, e)
