"""Extrinsic geometry of isometric surface immersions into 3-space charts.

Works natively in curvilinear target coordinates (e.g. cylindrical): the unit
normal comes from the metric cross product of the coordinate tangents, and all
inner products route through the target metric, so ``(R, theta, z)``-style
immersions need no Cartesian detour.
"""

from dataclasses import dataclass

import numpy as np

from . import geometry, jets
from .conformal import ConformalFactor
from .geometry import GeometryInputError, MapState

# (d, a, b, sign) with epsilon_{dab} = sign
_EPSILON = ((0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0),
            (0, 2, 1, -1.0), (2, 1, 0, -1.0), (1, 0, 2, -1.0))


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _values(section):
    return np.stack([s.value for s in section], axis=-1)


class SurfaceData:
    """Normal, shape operator, and curvature data of an isometric immersion.

    ``induced`` must be the metric the immersion actually induces (checked
    against the pullback).  The normal is oriented by the ordered coordinate
    tangents: on a cylinder parametrized by (theta, z) it points outward,
    along +d/d rho.
    """

    def __init__(self, phi, induced, target_metric, x, iso_tol=1e-8):
        state = MapState(phi, induced, target_metric, x, 4)
        if state.m != 2 or state.n != 3:
            raise GeometryInputError("surface machinery needs a 2d domain "
                                     f"and a 3d target, got {state.m} -> "
                                     f"{state.n}")
        pullback = geometry.pullback_metric(phi, target_metric, x)
        gap = np.max(np.abs(pullback - state.g_val)
                     / (1.0 + np.abs(state.g_val)))
        if gap > iso_tol:
            raise GeometryInputError("declared induced metric differs from "
                                     f"the immersion pullback (off by {gap:g})")
        self.phi = phi
        self.target_metric = target_metric
        self.state = state

        hx = [[state.compose_codomain_jet(state.h_yjets[a][b])
               for b in range(3)] for a in range(3)]
        vol = jets.sqrt(_det3(hx))
        t1, t2 = state.Dphi[0], state.Dphi[1]
        cross = []
        for d in range(3):
            acc = None
            for p, a, b, s in _EPSILON:
                if p != d:
                    continue
                term = t1[a] * t2[b] * s
                acc = term if acc is None else acc + term
            cross.append(vol * acc)
        hinv = geometry._jet_matrix_inverse(hx)
        raw = []
        for c in range(3):
            acc = None
            for d in range(3):
                term = hinv[c][d] * cross[d]
                acc = term if acc is None else acc + term
            raw.append(acc)
        norm_sq = None
        for c in range(3):
            for d in range(3):
                term = hx[c][d] * raw[c] * raw[d]
                norm_sq = term if norm_sq is None else norm_sq + term
        if np.min(norm_sq.value) <= 1e-12:
            raise GeometryInputError("immersion is rank-deficient at a "
                                     "sample point")
        scale = 1.0 / jets.sqrt(norm_sq)
        self.normal = [raw[c] * scale for c in range(3)]
        self._hx = hx

        dxi = state.covariant_derivative(self.normal)
        # A^k_i = -gbar^{kj} <nabla_i xi, dphi_j>_h ; stored as shape[i][k]
        paired = [[None] * 2 for _ in range(2)]
        for i in range(2):
            for j in range(2):
                acc = None
                for a in range(3):
                    for b in range(3):
                        term = hx[a][b] * dxi[i][a] * state.Dphi[j][b]
                        acc = term if acc is None else acc + term
                paired[i][j] = acc
        self.shape = [[None] * 2 for _ in range(2)]
        for i in range(2):
            for k in range(2):
                acc = None
                for j in range(2):
                    term = state.ginv_jets[k][j] * paired[i][j]
                    acc = term if acc is None else acc + term
                self.shape[i][k] = -acc
        self.mean_curvature = (self.shape[0][0] + self.shape[1][1]) * 0.5
        b2 = None
        for i in range(2):
            for k in range(2):
                term = self.shape[i][k] * self.shape[k][i]
                b2 = term if b2 is None else b2 + term
        self.second_form_sq = b2
        self.eta = [self.mean_curvature * self.normal[c] for c in range(3)]

    # -- value views -------------------------------------------------------------

    @property
    def normal_values(self):
        return _values(self.normal)

    @property
    def shape_values(self):
        """A^k_i as [..., i, k]."""
        return np.stack([np.stack([self.shape[i][k].value for k in range(2)],
                                  axis=-1) for i in range(2)], axis=-2)

    @property
    def mean_curvature_values(self):
        return self.mean_curvature.value

    @property
    def second_form_sq_values(self):
        """|B|^2 with respect to the induced metric."""
        return self.second_form_sq.value

    @property
    def eta_values(self):
        return _values(self.eta)

    # -- tangent algebra ----------------------------------------------------------

    def apply_shape(self, vec):
        """Shape operator on a domain vector given by component jets."""
        out = []
        for k in range(2):
            acc = None
            for i in range(2):
                term = self.shape[i][k] * vec[i]
                acc = term if acc is None else acc + term
            out.append(acc)
        return out

    def push_values(self, vec):
        """Target-frame values of dphi applied to domain-vector jets."""
        return _values(self.state.dphi_apply(vec))


def surface_data(phi, induced, target_metric, x, iso_tol=1e-8):
    """Assemble normal/shape/curvature data for an isometric immersion."""
    return SurfaceData(phi, induced, target_metric, x, iso_tol=iso_tol)


def chen_bitension(sd):
    """Bitension of the isometric immersion from its extrinsic data:
    2(Lap H - H|B|^2) xi - 2 dphi(2 A(grad H) + grad(H^2)),
    with Laplacian and gradients of the induced metric."""
    st = sd.state
    H = sd.mean_curvature
    lap_h = st.scalar_laplacian(H).value
    grad_h = st.gradient_jets(H)
    bracket_jets = []
    grad_h2 = st.gradient_jets(H * H)
    a_grad = sd.apply_shape(grad_h)
    for i in range(2):
        bracket_jets.append(a_grad[i] * 2.0 + grad_h2[i])
    pushed = sd.push_values(bracket_jets)
    normal_part = (lap_h - H.value * sd.second_form_sq.value)
    return 2.0 * normal_part[..., None] * sd.normal_values - 2.0 * pushed


def r3_system_residual(sd, lam, g, parameters=None):
    """Residuals of the two-equation biharmonicity system for a conformal
    surface immersion into flat 3-space, with operators of the conformal
    domain metric g and |B|^2 = lambda^2 |B|^2_induced.

    Returns (tangential, normal): A(grad H) + grad(H^2)/2 + 2H A(grad ln lam)
    as domain-vector values, and Lap H - H|B|^2 + 2H(Lap ln lam
    + 2|grad ln lam|^2) + 4 g(grad ln lam, grad H) as a scalar.
    """
    fac = ConformalFactor.of(lam, parameters)
    stg = MapState(sd.phi, g, sd.target_metric, sd.state.x, 3)
    lam_jet = stg.scalar_jet(fac.ast, fac.parameters)
    if np.any(lam_jet.value <= 0.0):
        raise GeometryInputError("conformal factor must stay positive")
    ln_lam = jets.ln(lam_jet)
    grad_l = stg.gradient_jets(ln_lam)
    grad_l_val = _values(grad_l)
    lap_l = stg.scalar_laplacian(ln_lam).value
    norm_l = stg.domain_inner(grad_l_val, grad_l_val)

    H = sd.mean_curvature
    hv = H.value
    grad_h = stg.gradient_jets(H)
    tangential = (_values(sd.apply_shape(grad_h))
                  + 0.5 * _values(stg.gradient_jets(H * H))
                  + 2.0 * hv[..., None] * _values(sd.apply_shape(grad_l)))
    b2 = lam_jet.value ** 2 * sd.second_form_sq.value
    cross = stg.domain_inner(grad_l_val, _values(grad_h))
    normal = (stg.scalar_laplacian(H).value - hv * b2
              + 2.0 * hv * (lap_l + 2.0 * norm_l) + 4.0 * cross)
    return tangential, normal


@dataclass(frozen=True)
class NormalDerivative:
    """nabla^phi_Y (H xi) together with the residual of its Weingarten
    decomposition Y(H) xi - H dphi(A(Y))."""
    derivative: np.ndarray
    split_residual: np.ndarray


def normal_field_covariant_derivative(sd, direction, parameters=None):
    """Covariant derivative of the mean-curvature section along a domain
    vector field, plus the residual of its tangential/normal split."""
    st = sd.state
    vec = [st.scalar_jet(c, parameters) for c in direction]
    derivative = st.directional_covariant(vec, sd.eta)
    H = sd.mean_curvature
    dh = sum(vec[i].value * H.derivative(i).value for i in range(2))
    decomposed = (dh[..., None] * sd.normal_values
                  - H.value[..., None] * sd.push_values(sd.apply_shape(vec)))
    return NormalDerivative(derivative, derivative - decomposed)
