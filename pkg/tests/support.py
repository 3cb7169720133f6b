"""Shared test helpers: random safe function trees and finite-difference oracles."""
import numpy as np

from bitension import jets

# 7-point central stencils on offsets -3..3, 4th-order accurate for k <= 4.
_OFFSETS = np.arange(-3, 4)
_STENCILS = {
    0: np.array([0, 0, 0, 1, 0, 0, 0], dtype=float),
    1: np.array([0, 1, -8, 0, 8, -1, 0], dtype=float) / 12.0,
    2: np.array([0, -1, 16, -30, 16, -1, 0], dtype=float) / 12.0,
    3: np.array([1, -8, 13, 0, -13, 8, -1], dtype=float) / 8.0,
    4: np.array([-1, 12, -39, 56, -39, 12, -1], dtype=float) / 6.0,
}


def fd_lattice(f, x0, num_vars, step=1e-2):
    """Evaluate f on the 7^m lattice around x0 in one vectorized call."""
    axes = [x0[i] + step * _OFFSETS for i in range(num_vars)]
    grids = np.meshgrid(*axes, indexing="ij")
    return f(grids)


def fd_partial(values, alpha, step=1e-2):
    """Tensor-product central-difference estimate of d^alpha f from lattice values."""
    out = values
    for axis, k in enumerate(alpha):
        w = _STENCILS[k] / step ** k
        out = np.tensordot(out, w, axes=([0], [0]))  # consumes leading axis each time
    return float(out)


def relative_error(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return np.max(np.abs(a - b) / (1.0 + np.maximum(np.abs(a), np.abs(b))))


# -- random smooth programs ---------------------------------------------------
#
# A "program" is a closure f(vars) composing only the jet-safe elementary
# operations, with arguments of ln/sqrt/div kept inside their domains by
# construction so the same tree is valid for jets, floats, and arrays.

def _leaf(rng, num_vars):
    if rng.random() < 0.7:
        i = int(rng.integers(num_vars))
        return lambda v: v[i]
    c = float(rng.uniform(0.5, 2.0))
    return lambda v: c


def _positive(child):
    # maps any smooth value into [1.3, 1.9]; the 0.6 damping keeps high-order
    # derivatives of deep compositions small enough for the FD oracle
    return lambda v: 1.6 + 0.3 * jets.sin(0.6 * child(v))


def random_program(rng, num_vars, depth):
    if depth == 0:
        return _leaf(rng, num_vars)
    op = rng.choice(["add", "sub", "mul", "div", "exp", "ln", "sin", "cos",
                     "sqrt", "powi", "powneg"])
    a = random_program(rng, num_vars, depth - 1)
    if op in ("add", "sub", "mul", "div"):
        b = random_program(rng, num_vars, depth - 1)
        if op == "add":
            return lambda v: a(v) + b(v)
        if op == "sub":
            return lambda v: a(v) - b(v)
        if op == "mul":
            return lambda v: a(v) * b(v)
        pos = _positive(b)
        return lambda v: jets.divide(a(v), pos(v))
    if op == "exp":
        return lambda v: jets.exp(0.35 * a(v))
    if op == "ln":
        pos = _positive(a)
        return lambda v: jets.ln(pos(v))
    if op == "sin":
        return lambda v: jets.sin(0.6 * a(v))
    if op == "cos":
        return lambda v: jets.cos(0.6 * a(v))
    if op == "sqrt":
        pos = _positive(a)
        return lambda v: jets.sqrt(pos(v))
    if op == "powi":
        k = int(rng.integers(2, 4))
        return lambda v: jets.power(0.7 * a(v), k)
    pos = _positive(a)
    return lambda v: jets.power(pos(v), -2)
