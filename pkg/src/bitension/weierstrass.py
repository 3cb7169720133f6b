"""Conformal-coordinate calculus for maps of a 2d chart into flat n-space.

Treats z = u + iv as a complex coordinate on the domain: the derivative
section phi_sec = (phi_u - i phi_v)/2, the conformality sums, and the
biharmonicity residual d/dzbar d/dz (mu^-2 d/dzbar phi_sec) where mu^2 is
the isothermal factor of the domain metric g = mu^2 |dz|^2.  For maps into
flat Cartesian targets this residual vanishes exactly when the map is
biharmonic, and 16 mu^-2 times it reproduces the bitension field.
"""

from dataclasses import dataclass

import numpy as np

from .charts import ChartDomain, RiemannianMetric, SmoothMap
from .geometry import GeometryInputError, MapState


class ComplexJet:
    """A pair of real jets acting as one complex-valued jet."""

    __slots__ = ("re", "im")
    __array_ufunc__ = None

    def __init__(self, re, im):
        self.re = re
        self.im = im

    @property
    def value(self):
        return self.re.value + 1j * self.im.value

    def conj(self):
        return ComplexJet(self.re, -self.im)

    def abs_sq(self):
        return self.re * self.re + self.im * self.im

    def derivative(self, axis):
        return ComplexJet(self.re.derivative(axis), self.im.derivative(axis))

    def __add__(self, other):
        if isinstance(other, ComplexJet):
            return ComplexJet(self.re + other.re, self.im + other.im)
        if isinstance(other, complex):
            return ComplexJet(self.re + other.real, self.im + other.imag)
        return ComplexJet(self.re + other, self.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexJet(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other if isinstance(other, ComplexJet) else -1.0 * other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ComplexJet):
            return ComplexJet(self.re * other.re - self.im * other.im,
                              self.re * other.im + self.im * other.re)
        if isinstance(other, complex):
            return ComplexJet(self.re * other.real - self.im * other.imag,
                              self.re * other.imag + self.im * other.real)
        return ComplexJet(self.re * other, self.im * other)

    __rmul__ = __mul__


def _as_complex(f):
    if isinstance(f, ComplexJet):
        return f
    return ComplexJet(f, f * 0.0)


def wirtinger_dz(f):
    """d/dz = (d/du - i d/dv)/2."""
    f = _as_complex(f)
    du, dv = f.derivative(0), f.derivative(1)
    return ComplexJet((du.re + dv.im) * 0.5, (du.im - dv.re) * 0.5)


def wirtinger_dzbar(f):
    """d/dzbar = (d/du + i d/dv)/2."""
    f = _as_complex(f)
    du, dv = f.derivative(0), f.derivative(1)
    return ComplexJet((du.re - dv.im) * 0.5, (du.im + dv.re) * 0.5)


@dataclass(frozen=True)
class WSection:
    """The complex derivative section of a map, with the isothermal factor
    of the domain metric it was computed for."""
    state: MapState
    components: tuple
    mu_sq: object  # jet of the isothermal factor


def section(phi, g, h, x, isothermal_tol=1e-9):
    """Build the derivative section phi_sec = (phi_u - i phi_v)/2.

    Requires a 2d domain, an isothermal domain metric g = mu^2 (du^2+dv^2),
    and a flat Cartesian target metric (identity components).
    """
    state = MapState(phi, g, h, x, 4)
    if state.m != 2:
        raise GeometryInputError("conformal-coordinate calculus needs a "
                                 "2d domain")
    for a in range(state.n):
        for b in range(state.n):
            jet = state.h_yjets[a][b]
            flat = np.zeros_like(jet.coeffs)
            flat[..., 0] = 1.0 if a == b else 0.0
            if np.max(np.abs(jet.coeffs - flat)) > 1e-12:
                raise GeometryInputError("target metric must be flat "
                                         "Cartesian (identity components)")
    scale = np.max(np.abs(state.g_jets[0][0].coeffs))
    off = np.max(np.abs(state.g_jets[0][1].coeffs))
    gap = np.max(np.abs(state.g_jets[0][0].coeffs
                        - state.g_jets[1][1].coeffs))
    if max(off, gap) > isothermal_tol * max(1.0, scale):
        raise GeometryInputError("domain metric must be isothermal, "
                                 "g = mu^2 (du^2 + dv^2)")
    comps = tuple(ComplexJet(state.Dphi[0][a] * 0.5, state.Dphi[1][a] * (-0.5))
                  for a in range(state.n))
    return WSection(state, comps, state.g_jets[0][0])


def conformality_sums(ws):
    """(sum of squares, sum of squared moduli) of the section components.

    The first vanishes exactly for conformal maps; the second is half the
    conformal factor of the pullback metric and must stay positive for an
    immersion.
    """
    w1 = sum((c * c).value for c in ws.components)
    w2 = sum(c.abs_sq().value for c in ws.components)
    return w1, w2


def tension_complex(ws):
    """Components of the tension field, 4 mu^-2 d/dzbar phi_sec.

    Real up to rounding; returned complex so the cancellation is visible.
    """
    inv = (1.0 / ws.mu_sq).value
    return np.stack([(wirtinger_dzbar(c).value * inv) * 4.0
                     for c in ws.components], axis=-1)


def w3_residual(ws):
    """d/dzbar d/dz (mu^-2 d/dzbar phi_sec), one complex value per
    component; all zero exactly when the map is biharmonic."""
    inv = 1.0 / ws.mu_sq
    out = []
    for c in ws.components:
        inner = wirtinger_dzbar(c) * inv
        out.append(wirtinger_dzbar(wirtinger_dz(inner)).value)
    return np.stack(out, axis=-1)


def bitension_complex(ws):
    """The bitension field as 16 mu^-2 times the biharmonicity residual."""
    inv = (1.0 / ws.mu_sq).value
    return 16.0 * inv[..., None] * w3_residual(ws)


@dataclass(frozen=True)
class WrappedCase:
    """A wrapped-holomorphic immersion of a square into flat 3-space,
    with the exponent that decides biharmonicity of its domain metric."""
    phi: SmoothMap
    g: RiemannianMetric
    h: RiemannianMetric
    exponent: float
    biharmonic: bool


_RE_W = "(ar*u - ai*v + br*(u^2-v^2) - bi*2*u*v)"
_IM_W = "(ai*u + ar*v + br*2*u*v + bi*(u^2-v^2))"
_DW_SQ = "((ar + 2*(br*u - bi*v))^2 + (ai + 2*(bi*u + br*v))^2)"


def random_wrapped_pool(count, seed, radius=1.0):
    """Conformal immersions: wrap a random holomorphic W(z) = a z + b z^2
    around a radius-R cylinder, with domain metric
    |W'|^2 exp(c Im W / R) |dz|^2.  The metric makes the immersion proper
    biharmonic exactly for exponent c = 1; other exponents give controls.
    """
    rng = np.random.default_rng(seed)
    dom = ChartDomain(("u", "v"), ((-0.5, 0.5), (-0.5, 0.5)))
    target = ChartDomain(("p", "q", "r"),
                         ((-radius - 0.5, radius + 0.5),) * 2 + ((-3.0, 3.0),))
    flat = RiemannianMetric.euclidean(target)
    cases = []
    for k in range(count):
        bindings = {
            "ar": rng.uniform(0.8, 1.4),
            "ai": rng.uniform(-0.4, 0.4),
            "br": rng.uniform(-0.12, 0.12),
            "bi": rng.uniform(-0.12, 0.12),
            "R": radius,
        }
        exponent = (1.0, 0.0, 1.7)[k % 3]
        phi = SmoothMap.from_components(
            dom, target,
            (f"R*cos({_RE_W}/R)", f"R*sin({_RE_W}/R)", _IM_W), bindings)
        g = RiemannianMetric.conformally_flat(
            dom, f"{_DW_SQ}*exp({exponent!r}*{_IM_W}/R)", bindings)
        cases.append(WrappedCase(phi, g, flat, exponent, exponent == 1.0))
    return cases
