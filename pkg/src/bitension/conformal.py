"""Conformal rescalings gbar = F^-2 g and their effect on tension-type operators.

Every *_transform_rhs function evaluates the g-side of a transformation law --
all gradients, Laplacians and covariant derivatives taken with respect to the
original metric g -- so the result can be compared against a direct computation
carried out with the rescaled metric.
"""

from dataclasses import dataclass, field

import numpy as np

from . import expr, geometry, jets
from .charts import ChartDomain, DomainError, RiemannianMetric, SmoothMap, \
    VectorFieldAlongMap
from .geometry import GeometryInputError, MapState

__all__ = [
    "ConformalFactor", "conformal_metric", "tension_transform_rhs",
    "jacobi_transform_rhs", "bitension_transform_rhs",
    "bitension_transform_rhs_dim2", "harmonic_biharmonic_condition",
    "conformal_immersion_sides", "conformal_immersion_residual",
    "conformal_immersion_residual_dim2", "random_transform_family",
]


@dataclass(frozen=True)
class ConformalFactor:
    """A positive scale function on the domain chart, written in its coordinates."""

    ast: object
    parameters: dict = field(default_factory=dict)

    @classmethod
    def of(cls, source, parameters=None):
        if isinstance(source, cls):
            if parameters:
                return cls(source.ast, {**source.parameters, **parameters})
            return source
        node = expr.parse(source) if isinstance(source, str) else source
        return cls(node, dict(parameters or {}))

    def reciprocal(self):
        return ConformalFactor(expr.Binary("/", expr.Const(1.0), self.ast),
                               dict(self.parameters))


class _FactorData:
    """Derived quantities of ln F at the points of a map state."""

    def __init__(self, state, factor):
        fj = state.scalar_jet(factor.ast, factor.parameters)
        self.values = np.asarray(fj.value, dtype=float)
        if np.any(self.values <= 0.0):
            worst = float(np.min(self.values))
            raise DomainError(
                f"conformal factor must stay positive (found {worst:g})")
        lnf = jets.ln(fj)
        self.grad = state.gradient_jets(lnf)
        self.grad_values = np.stack([g.value for g in self.grad], axis=-1)
        self.laplacian = state.scalar_laplacian(lnf).value
        self.grad_norm_sq = state.domain_inner(self.grad_values,
                                               self.grad_values)
        self.pushed = state.dphi_apply(self.grad)
        self.pushed_values = np.stack([p.value for p in self.pushed], axis=-1)


def conformal_metric(g, factor, parameters=None):
    """The metric with components F^-2 g_ij, as composed expressions."""
    fac = ConformalFactor.of(factor, parameters)
    fsq = expr.Binary("^", fac.ast, expr.Const(2.0))
    comps = tuple(tuple(expr.Binary("/", entry, fsq) for entry in row)
                  for row in g.components)
    merged = {**g.parameters, **fac.parameters}
    return RiemannianMetric(g.domain, comps, merged)


def tension_transform_rhs(phi, g, h, factor, x, parameters=None):
    """g-side of the tension law: F^2 {tau(phi,g) - (m-2) dphi(grad ln F)}."""
    state = MapState(phi, g, h, x, 2)
    fac = _FactorData(state, ConformalFactor.of(factor, parameters))
    m = state.m
    inner = state.tension_values - (m - 2.0) * fac.pushed_values
    return fac.values[..., None] ** 2 * inner


def jacobi_transform_rhs(phi, g, h, factor, fld, x, parameters=None):
    """g-side of the Jacobi law: F^2 J(X) + F^2 (m-2) nabla_{grad ln F} X."""
    state = MapState(phi, g, h, x, 3)
    fac = _FactorData(state, ConformalFactor.of(factor, parameters))
    section = state.section_from_field(fld)
    jac = state.jacobi_of(section)
    slide = state.directional_covariant(fac.grad, section)
    return fac.values[..., None] ** 2 * (jac + (state.m - 2.0) * slide)


def _bitension_rhs(state, fac):
    m = state.m
    tau_jets = state.tension_jets
    tau = state.tension_values
    jac_pushed = state.jacobi_of(fac.pushed)
    slide_tau = state.directional_covariant(fac.grad, tau_jets)
    slide_pushed = state.directional_covariant(fac.grad, fac.pushed)
    a = fac.laplacian - (m - 4.0) * fac.grad_norm_sq
    inner = (state.bitension_values
             + (m - 2.0) * jac_pushed
             + 2.0 * a[..., None] * tau
             - (m - 6.0) * slide_tau
             - 2.0 * (m - 2.0) * a[..., None] * fac.pushed_values
             + (m - 2.0) * (m - 6.0) * slide_pushed)
    return fac.values[..., None] ** 4 * inner


def bitension_transform_rhs(phi, g, h, factor, x, parameters=None):
    """g-side of the bitension law, valid in every dimension."""
    state = MapState(phi, g, h, x, 4)
    return _bitension_rhs(state, _FactorData(state,
                                             ConformalFactor.of(factor,
                                                                parameters)))


def bitension_transform_rhs_dim2(phi, g, h, factor, x, parameters=None):
    """Two-dimensional specialization of the bitension law.

    F^4 {tau^2 + 2(Lap ln F + 2|grad ln F|^2) tau + 4 nabla_{grad ln F} tau},
    written out separately rather than reusing the general formula.
    """
    state = MapState(phi, g, h, x, 4)
    if state.m != 2:
        raise GeometryInputError("dimension-2 form requires a 2d domain, "
                                 f"got m={state.m}")
    fac = _FactorData(state, ConformalFactor.of(factor, parameters))
    tau = state.tension_values
    slide_tau = state.directional_covariant(fac.grad, state.tension_jets)
    b = fac.laplacian + 2.0 * fac.grad_norm_sq
    inner = state.bitension_values + 2.0 * b[..., None] * tau + 4.0 * slide_tau
    return fac.values[..., None] ** 4 * inner


def harmonic_biharmonic_condition(phi, g, h, factor, x, parameters=None,
                                  harmonic_tol=1e-8):
    """Residual whose vanishing makes a g-harmonic map biharmonic for F^-2 g.

    J(dphi(grad ln F)) + (m-6) nabla_{grad ln F} dphi(grad ln F)
    - 2(Lap ln F - (m-4)|grad ln F|^2) dphi(grad ln F), for m != 2 only.
    """
    state = MapState(phi, g, h, x, 3)
    if state.m == 2:
        raise GeometryInputError("the harmonic-to-biharmonic criterion needs "
                                 "m != 2")
    worst = float(np.max(np.abs(state.tension_values)))
    if worst >= harmonic_tol:
        raise GeometryInputError("input map is not harmonic for g "
                                 f"(|tension| up to {worst:g})")
    fac = _FactorData(state, ConformalFactor.of(factor, parameters))
    m = state.m
    jac_pushed = state.jacobi_of(fac.pushed)
    slide_pushed = state.directional_covariant(fac.grad, fac.pushed)
    a = fac.laplacian - (m - 4.0) * fac.grad_norm_sq
    return (jac_pushed + (m - 6.0) * slide_pushed
            - 2.0 * a[..., None] * fac.pushed_values)


def conformal_immersion_sides(phi, g, h, lam, x, parameters=None,
                              conformal_tol=1e-8):
    """Both sides of the biharmonicity criterion for a conformal immersion.

    For phi with pullback metric lambda^2 g the left side is
    lambda^4 tau^2(phi, gbar) of the associated isometric immersion
    (gbar = lambda^2 g, mean curvature section eta = tau(phi,gbar)/m), and the
    right side collects the g-side terms
    -(m-2) J(dphi(grad ln lambda))
    + 2m lambda^2 (-Lap ln lambda - 2|grad ln lambda|^2) eta
    + m(m-6) lambda^2 nabla_{grad ln lambda} eta.
    Left minus right equals tau^2(phi, g); it vanishes exactly when the
    conformal immersion is biharmonic.
    """
    fac = ConformalFactor.of(lam, parameters)
    probe = geometry.conformality_factor(phi, g, h, x, tol=conformal_tol)
    if not probe.conformal:
        raise GeometryInputError("map is not a conformal immersion for g, h "
                                 f"(pullback residual {probe.max_residual:g})")
    state = MapState(phi, g, h, x, 4)
    data = _FactorData(state, fac)
    lam_sq = data.values ** 2
    mismatch = np.max(np.abs(lam_sq - probe.lambda_sq)
                      / (1.0 + np.abs(probe.lambda_sq)))
    if mismatch > conformal_tol:
        raise GeometryInputError("given factor disagrees with the measured "
                                 f"conformal factor (off by {mismatch:g})")
    gbar = conformal_metric(g, fac.reciprocal())
    iso = MapState(phi, gbar, h, x, 4)
    m = state.m
    lhs = lam_sq[..., None] ** 2 * iso.bitension_values
    eta_jets = [t * (1.0 / m) for t in iso.tension_jets]
    eta = np.stack([e.value for e in eta_jets], axis=-1)
    jac_pushed = state.jacobi_of(data.pushed)
    slide_eta = state.directional_covariant(data.grad, eta_jets)
    shrink = -data.laplacian - 2.0 * data.grad_norm_sq
    rhs = (-(m - 2.0) * jac_pushed
           + 2.0 * m * (lam_sq * shrink)[..., None] * eta
           + m * (m - 6.0) * lam_sq[..., None] * slide_eta)
    return lhs, rhs


def conformal_immersion_residual(phi, g, h, lam, x, parameters=None,
                                 conformal_tol=1e-8):
    """Left minus right of the conformal-immersion criterion; zero iff
    the conformal immersion is biharmonic."""
    lhs, rhs = conformal_immersion_sides(phi, g, h, lam, x,
                                         parameters=parameters,
                                         conformal_tol=conformal_tol)
    return lhs - rhs


def conformal_immersion_residual_dim2(phi, g, h, lam, x, parameters=None,
                                      conformal_tol=1e-8):
    """Surface form of the criterion: lambda^2 tau^2(phi,gbar)
    + 4(Lap ln lambda + 2|grad ln lambda|^2) eta + 8 nabla_{grad ln lambda} eta.

    Equals the general residual divided by lambda^2 when m = 2.
    """
    fac = ConformalFactor.of(lam, parameters)
    state = MapState(phi, g, h, x, 4)
    if state.m != 2:
        raise GeometryInputError("surface criterion requires a 2d domain, "
                                 f"got m={state.m}")
    probe = geometry.conformality_factor(phi, g, h, x, tol=conformal_tol)
    if not probe.conformal:
        raise GeometryInputError("map is not a conformal immersion for g, h "
                                 f"(pullback residual {probe.max_residual:g})")
    data = _FactorData(state, fac)
    lam_sq = data.values ** 2
    gbar = conformal_metric(g, fac.reciprocal())
    iso = MapState(phi, gbar, h, x, 4)
    eta_jets = [t * 0.5 for t in iso.tension_jets]
    eta = np.stack([e.value for e in eta_jets], axis=-1)
    slide_eta = state.directional_covariant(data.grad, eta_jets)
    grow = data.laplacian + 2.0 * data.grad_norm_sq
    return (lam_sq[..., None] * iso.bitension_values
            + 4.0 * grow[..., None] * eta + 8.0 * slide_eta)


def random_transform_family(m, count, rng, n=None):
    """A batched family of randomized (phi, g, h, X, F) cases on one chart.

    Expression skeletons are fixed per dimension; the `count` cases differ by
    parameter draws stored as (count, 1) arrays, so one evaluation over points
    of shape (count, samples) covers the whole family.  Metrics stay positive
    definite by diagonal dominance, maps land inside the target box, and the
    factor is an exponential, hence positive.  The target dimension defaults
    to m + 1 but any n >= 2 works.
    """
    if m < 2:
        raise GeometryInputError("need a domain dimension of at least 2")
    n = m + 1 if n is None else int(n)
    if n < 2:
        raise GeometryInputError("need a target dimension of at least 2")
    coords = tuple(f"x{i+1}" for i in range(m))
    dom = ChartDomain(coords, ((-0.4, 0.4),) * m)
    tgt = ChartDomain(tuple(f"y{a+1}" for a in range(n)), ((-2.0, 2.0),) * n)
    params = {}

    def draw(name, width):
        params[name] = rng.uniform(-width, width, size=(count, 1))
        return name

    rows = []
    for i in range(m):
        row = []
        for j in range(m):
            if i == j:
                row.append(f"1 + {draw(f'g{i}d', 0.15)}*sin(x{i+1})"
                           f" + {draw(f'g{i}q', 0.1)}*x{(i % m) + 1}^2")
            elif i < j:
                row.append(f"{draw(f'g{i}{j}o', 0.08)}*x{i+1}*x{j+1}")
            else:
                row.append(rows[j][i])
        rows.append(row)
    g = RiemannianMetric.from_components(dom, rows, dict(params))

    comps = []
    for a in range(n):
        if a < m:
            b = (a + 1) % m
            comps.append(f"x{a+1} + {draw(f'p{a}', 0.25)}*sin(x{b+1})")
        else:
            other = m - (a - m) % m
            comps.append(f"{draw(f'p{a}', 0.3)}*x1*x{other}")
    phi = SmoothMap.from_components(dom, tgt, comps, dict(params))

    h = RiemannianMetric.conformally_flat(
        tgt, f"exp({draw('hl', 0.25)}*y1 + {draw('hq', 0.2)}*y2*y{n})",
        dict(params))

    fld = VectorFieldAlongMap.from_components(
        tuple(f"{draw(f'v{a}c', 0.5)} + {draw(f'v{a}x', 0.4)}"
              f"*x{(a % m) + 1}*x1" for a in range(n)),
        dict(params))

    factor = ConformalFactor.of(
        f"exp({draw('fc', 0.2)} + {draw('fl', 0.3)}*x1"
        f" + {draw('fq', 0.2)}*x{m}^2)", dict(params))
    return dom, g, h, phi, fld, factor
