"""Named verification cases: closed-form geometries with checkable claims.

Each case bundles a map, its metrics, and a list of expectations — residuals
that must vanish, magnitudes that must not — evaluated at low-discrepancy
sample points.  Every case also has a deliberately broken variant whose key
check fails loudly, so a green report can't be vacuous.
"""

from dataclasses import dataclass

import numpy as np

from . import cylinder, geometry, surfaces, weierstrass
from . import expr as expr_mod
from .charts import ChartDomain, DomainError, RiemannianMetric, SmoothMap
from .cylinder import CylinderParams
from .expr import ExprEvalError
from .geometry import GeometryInputError, MapState
from .report import VERSION, CheckRecord, VerificationReport


@dataclass(frozen=True)
class Expectation:
    check: str
    tol: float
    mode: str  # "max": value must stay below tol; "min": must exceed it


class VerificationCase:
    """A named geometry plus expectations with their evaluators."""

    def __init__(self, name, domain, params, entries, geometry=None):
        self.name = name
        self.domain = domain
        self.params = dict(params)
        self._entries = tuple(entries)
        self.geometry = geometry  # (map, domain metric, target metric)

    @property
    def expectations(self):
        return tuple(e for e, _ in self._entries)


# -- evaluators ----------------------------------------------------------------


def _tension_eval(phi, g, h):
    def run(pts):
        state = MapState(phi, g, h, pts, 2)
        tau = np.stack([t.value for t in state.tension_jets], axis=-1)
        mags = np.sqrt(state.target_inner(tau, tau))
        return mags, mags
    return run


def _bitension_eval(phi, g, h):
    def run(pts):
        state = MapState(phi, g, h, pts, 4)
        tau2 = state.bitension_values
        tau = np.stack([t.value for t in state.tension_jets], axis=-1)
        mags = np.sqrt(state.target_inner(tau2, tau2))
        scale = 1.0 + np.sqrt(state.target_inner(tau, tau))
        return mags, mags / scale
    return run


def _recovery_eval(phi, g, h, expected_of_pts):
    def run(pts):
        probe = geometry.conformality_factor(phi, g, h, pts)
        want = expected_of_pts(pts)
        diff = np.abs(probe.lambda_sq - want) + probe.max_residual
        return diff, diff / (1.0 + np.abs(want))
    return run


def _r3_evals(phi, induced, h, lam_src, g, bindings):
    def tangential(pts):
        sd = surfaces.surface_data(phi, induced, h, pts)
        tan, _ = surfaces.r3_system_residual(sd, lam_src, g,
                                             parameters=bindings)
        v = np.sqrt(np.sum(tan ** 2, axis=-1))
        return v, v / (1.0 + np.abs(sd.mean_curvature_values))

    def normal(pts):
        sd = surfaces.surface_data(phi, induced, h, pts)
        _, nor = surfaces.r3_system_residual(sd, lam_src, g,
                                             parameters=bindings)
        v = np.abs(nor)
        return v, v / (1.0 + np.abs(sd.mean_curvature_values))

    return tangential, normal


def _w1_eval(phi, g, h):
    def run(pts):
        ws = weierstrass.section(phi, g, h, pts)
        v = np.abs(weierstrass.conformality_sums(ws)[0])
        return v, v
    return run


def _w3_eval(phi, g, h):
    def run(pts):
        ws = weierstrass.section(phi, g, h, pts)
        v = np.max(np.abs(weierstrass.w3_residual(ws)), axis=-1)
        return v, v
    return run


def _nonholomorphic_eval(phi, g, h):
    def run(pts):
        ws = weierstrass.section(phi, g, h, pts)
        anti = np.stack([weierstrass.wirtinger_dzbar(c).value
                         for c in ws.components], axis=-1)
        v = np.linalg.norm(anti, axis=-1)
        return v, v
    return run


def _chen_eval(phi, induced, h, engine_metric):
    def run(pts):
        sd = surfaces.surface_data(phi, induced, h, pts)
        chen = surfaces.chen_bitension(sd)
        direct = geometry.bitension_field(phi, engine_metric, h, pts)
        state = MapState(phi, engine_metric, h, pts, 2)
        diff = chen - direct
        v = np.sqrt(state.target_inner(diff, diff))
        scale = 1.0 + np.sqrt(state.target_inner(chen, chen))
        return v, v / scale
    return run


# -- case builders -------------------------------------------------------------


def _h5_inclusion(power=2.0):
    dom = ChartDomain(tuple(f"x{i}" for i in range(1, 5)), ((0.5, 2.0),) * 4)
    tgt = ChartDomain(tuple(f"y{i}" for i in range(1, 6)), ((0.4, 2.4),) * 5)
    h = RiemannianMetric.conformally_flat(tgt, f"1/y5^{power!r}")
    g = RiemannianMetric.euclidean(dom)
    phi = SmoothMap.from_components(dom, tgt, ("1", "x1", "x2", "x3", "x4"))
    entries = [
        (Expectation("bitension_zero", 1e-7, "max"), _bitension_eval(phi, g, h)),
        (Expectation("tension_nonzero", 1e-3, "min"), _tension_eval(phi, g, h)),
    ]
    return VerificationCase("h5_inclusion", dom, {}, entries,
                            geometry=(phi, g, h))


def _s5_stereographic(bend=False):
    dom = ChartDomain(tuple(f"u{i}" for i in range(1, 5)), ((-2.0, 2.0),) * 4)
    tgt = ChartDomain(tuple(f"y{i}" for i in range(1, 6)), ((-2.2, 2.2),) * 5)
    square_sum = "+".join(f"y{i}^2" for i in range(1, 6))
    h = RiemannianMetric.conformally_flat(tgt, f"4/(1+{square_sum})^2")
    g = RiemannianMetric.euclidean(dom)
    last = "0.2*u1^2" if bend else "0"
    phi = SmoothMap.from_components(dom, tgt, ("u1", "u2", "u3", "u4", last))
    entries = [
        (Expectation("bitension_zero", 1e-7, "max"), _bitension_eval(phi, g, h)),
        (Expectation("tension_nonzero", 1e-3, "min"), _tension_eval(phi, g, h)),
    ]
    return VerificationCase("s5_stereographic", dom, {}, entries,
                            geometry=(phi, g, h))


def _cylinder_family(R=1.0, C1=0.0, C2=2.0, sign=-1):
    params = CylinderParams(float(R), float(C1), float(C2), int(sign),
                            (0.0, 1.0))
    phi, g, h = cylinder.build_family_case(params)
    dom = phi.domain
    induced = cylinder.induced_metric(params, dom)
    lam, bindings = cylinder.lambda_expression(params)

    def expected(pts):
        return cylinder.lambda_sq_closed_form(params, pts[:, 1])

    tangential, normal = _r3_evals(phi, induced, h, lam, g, bindings)
    entries = [
        (Expectation("bitension_zero", 1e-7, "max"), _bitension_eval(phi, g, h)),
        (Expectation("tension_nonzero", 1e-3, "min"), _tension_eval(phi, g, h)),
        (Expectation("r3_tangential", 1e-8, "max"), tangential),
        (Expectation("r3_normal", 1e-8, "max"), normal),
        (Expectation("conformal_recovery", 1e-12, "max"),
         _recovery_eval(phi, g, h, expected)),
    ]
    return VerificationCase("cylinder_family", dom,
                            {"R": R, "C1": C1, "C2": C2, "sign": sign},
                            entries, geometry=(phi, g, h))


def _wrap_pieces(copies, exponent):
    radius = 1.0
    dom = ChartDomain(("x", "y"), ((-2.0, 2.0), (-1.0, 1.0)))
    names = ("p", "q", "r", "s", "t", "w")[:3 * copies]
    box = (((-1.5, 1.5),) * 2 + ((-3.0, 3.0),)) * copies
    tgt = ChartDomain(names, box)
    h = RiemannianMetric.euclidean(tgt)
    phi = SmoothMap.from_components(
        dom, tgt, ("R*cos(x/R)", "R*sin(x/R)", "y") * copies, {"R": radius})
    g = RiemannianMetric.conformally_flat(
        dom, f"exp({exponent!r}*y/R)", {"R": radius})
    return dom, phi, g, h


def _wrap_case(name, copies, exponent=1.0):
    dom, phi, g, h = _wrap_pieces(copies, exponent)
    entries = [
        (Expectation("w1_zero", 1e-12, "max"), _w1_eval(phi, g, h)),
        (Expectation("w3_zero", 1e-9, "max"), _w3_eval(phi, g, h)),
        (Expectation("nonholomorphic", 0.1, "min"),
         _nonholomorphic_eval(phi, g, h)),
        (Expectation("bitension_zero", 1e-7, "max"), _bitension_eval(phi, g, h)),
    ]
    return VerificationCase(name, dom, {}, entries, geometry=(phi, g, h))


def _r2_wrap_r3():
    return _wrap_case("r2_wrap_r3", 1)


def _r2_wrap_r6():
    return _wrap_case("r2_wrap_r6", 2)


def _plane_inclusion(bend=False):
    dom = ChartDomain(("u", "v"), ((-1.0, 1.0), (-1.0, 1.0)))
    tgt = ChartDomain(("p", "q", "r"), ((-2.0, 2.0),) * 3)
    h = RiemannianMetric.euclidean(tgt)
    third = "(u^2+v^2)/2" if bend else "0"
    phi = SmoothMap.from_components(dom, tgt, ("u", "v", third))
    g = RiemannianMetric.euclidean(dom)
    entries = [
        (Expectation("tension_zero", 1e-7, "max"), _tension_eval(phi, g, h)),
        (Expectation("bitension_zero", 1e-7, "max"), _bitension_eval(phi, g, h)),
    ]
    return VerificationCase("plane_inclusion", dom, {}, entries,
                            geometry=(phi, g, h))


def _identity(m=3, bend=False):
    m = int(m)
    if not 2 <= m <= 6:
        raise ValueError("identity case supports dimensions 2..6")
    coords = tuple(f"x{i}" for i in range(1, m + 1))
    dom = ChartDomain(coords, ((-1.0, 1.0),) * m)
    tgt = ChartDomain(coords, ((-1.5, 1.5),) * m)
    g = RiemannianMetric.conformally_flat(dom, "exp(0.3*x1)")
    h = RiemannianMetric.conformally_flat(tgt, "exp(0.3*x1)")
    comps = ("x1+0.2*x1^2",) + coords[1:] if bend else coords
    phi = SmoothMap.from_components(dom, tgt, comps)
    entries = [
        (Expectation("tension_zero", 1e-7, "max"), _tension_eval(phi, g, h)),
        (Expectation("bitension_zero", 1e-7, "max"), _bitension_eval(phi, g, h)),
    ]
    return VerificationCase("identity", dom, {"m": m}, entries,
                            geometry=(phi, g, h))


def _isometric_cylinder(R=1.0, engine_scale=1.0):
    radius = float(R)
    dom = ChartDomain(("theta", "z"), ((0.1, 6.0), (-1.0, 1.0)))
    tgt = ChartDomain(("rho", "psi", "w"),
                      ((0.5 * radius, 2.0 * radius + 3.0), (0.05, 6.25),
                       (-1.5, 1.5)))
    h = RiemannianMetric.from_components(
        tgt, [["1", "0", "0"], ["0", "rho^2", "0"], ["0", "0", "1"]])
    phi = SmoothMap.from_components(dom, tgt, ("R", "theta", "z"),
                                    {"R": radius})
    induced = RiemannianMetric.from_components(
        dom, [["R^2", "0"], ["0", "1"]], {"R": radius})
    scale = float(engine_scale)
    engine_metric = RiemannianMetric.from_components(
        dom, [[f"{scale!r}*R^2", "0"], ["0", f"{scale!r}"]], {"R": radius})
    entries = [
        (Expectation("chen_match", 1e-7, "max"),
         _chen_eval(phi, induced, h, engine_metric)),
        (Expectation("tension_nonzero", 1e-3, "min"),
         _tension_eval(phi, induced, h)),
    ]
    return VerificationCase("isometric_cylinder", dom, {"R": R}, entries,
                            geometry=(phi, induced, h))


_BUILDERS = {
    "h5_inclusion": _h5_inclusion,
    "s5_stereographic": _s5_stereographic,
    "cylinder_family": _cylinder_family,
    "r2_wrap_r3": _r2_wrap_r3,
    "r2_wrap_r6": _r2_wrap_r6,
    "plane_inclusion": _plane_inclusion,
    "identity": _identity,
    "isometric_cylinder": _isometric_cylinder,
}

CASE_NAMES = tuple(sorted(_BUILDERS))


def build_case(name, **params):
    """Assemble a named case; unknown names and bad parameters raise."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        known = ", ".join(CASE_NAMES)
        raise ValueError(f"unknown case '{name}' (choose from {known})")
    try:
        return builder(**params)
    except TypeError as err:
        raise ValueError(f"bad parameters for '{name}': {err}")


def negative_control(name, **params):
    """A deliberately broken variant of the named case, plus the check it
    must fail."""
    if name == "h5_inclusion":
        return _h5_inclusion(power=2.4), "bitension_zero"
    if name == "s5_stereographic":
        return _s5_stereographic(bend=True), "bitension_zero"
    if name == "cylinder_family":
        return _broken_cylinder(**params), "bitension_zero"
    if name == "r2_wrap_r3":
        return _wrap_case("r2_wrap_r3", 1, exponent=2.0), "w3_zero"
    if name == "r2_wrap_r6":
        return _wrap_case("r2_wrap_r6", 2, exponent=2.0), "w3_zero"
    if name == "plane_inclusion":
        return _plane_inclusion(bend=True), "tension_zero"
    if name == "identity":
        return _identity(bend=True, **params), "tension_zero"
    if name == "isometric_cylinder":
        return _isometric_cylinder(engine_scale=1.69, **params), "chen_match"
    raise ValueError(f"no control registered for '{name}'")


def _broken_cylinder(R=1.0, **_ignored):
    """The cylinder with factor lambda^2 = exp(2z/R): twice the decay rate
    the solution family allows."""
    radius = float(R)
    params = CylinderParams(radius, 0.0, 2.0, 1, (0.0, 1.0))
    phi, _, h = cylinder.build_family_case(params)
    dom = phi.domain
    g = RiemannianMetric.from_components(
        dom, [["R^2*exp(-2*z/R)", "0"], ["0", "exp(-2*z/R)"]], {"R": radius})
    induced = cylinder.induced_metric(params, dom)
    tangential, normal = _r3_evals(phi, induced, h, "exp(z/R)", g,
                                   {"R": radius})

    def expected(pts):
        return cylinder.lambda_sq_closed_form(params, pts[:, 1])

    entries = [
        (Expectation("bitension_zero", 1e-7, "max"), _bitension_eval(phi, g, h)),
        (Expectation("tension_nonzero", 1e-3, "min"), _tension_eval(phi, g, h)),
        (Expectation("r3_tangential", 1e-8, "max"), tangential),
        (Expectation("r3_normal", 1e-8, "max"), normal),
        (Expectation("conformal_recovery", 1e-12, "max"),
         _recovery_eval(phi, g, h, expected)),
    ]
    return VerificationCase("cylinder_family", dom, {"R": radius}, entries)


# kind -> (comparison mode, default tolerance) for ad-hoc cases
CHECK_KINDS = {
    "tension_zero": ("max", 1e-7),
    "tension_nonzero": ("min", 1e-3),
    "bitension_zero": ("max", 1e-7),
    "bitension_nonzero": ("min", 1e-3),
    "w1_zero": ("max", 1e-12),
    "w3_zero": ("max", 1e-9),
    "nonholomorphic": ("min", 0.1),
    "chen_match": ("max", 1e-7),
    "r3_tangential": ("max", 1e-8),
    "r3_normal": ("max", 1e-8),
    "conformal_recovery": ("max", 1e-12),
}


def _factor_sq_values(domain, source, bindings):
    node = expr_mod.parse(source) if isinstance(source, str) else source

    def run(pts):
        variables = {c: pts[..., i] for i, c in enumerate(domain.coords)}
        lam = expr_mod.evaluate(node, expr_mod.EvalContext(variables, bindings))
        return np.asarray(lam, dtype=float) ** 2

    return run


def custom_case(name, phi, g, h, checks, induced=None, factor=None,
                parameters=None):
    """Assemble an ad-hoc case from raw geometry.

    ``checks`` lists (kind, tolerance-or-None) pairs drawn from CHECK_KINDS.
    The r3 system checks need ``induced`` (the immersion pullback metric on
    the domain) and ``factor`` (the conformal scale lambda as an expression
    in domain coordinates); conformal_recovery needs ``factor``;
    chen_match reads ``induced``, defaulting to the domain metric itself.
    """
    entries = []
    r3_pair = None
    for kind, tol in checks:
        if kind not in CHECK_KINDS:
            known = ", ".join(sorted(CHECK_KINDS))
            raise ValueError(f"unknown check '{kind}' (choose from {known})")
        mode, default = CHECK_KINDS[kind]
        exp = Expectation(kind, default if tol is None else float(tol), mode)
        if kind in ("tension_zero", "tension_nonzero"):
            run = _tension_eval(phi, g, h)
        elif kind in ("bitension_zero", "bitension_nonzero"):
            run = _bitension_eval(phi, g, h)
        elif kind == "w1_zero":
            run = _w1_eval(phi, g, h)
        elif kind == "w3_zero":
            run = _w3_eval(phi, g, h)
        elif kind == "nonholomorphic":
            run = _nonholomorphic_eval(phi, g, h)
        elif kind == "chen_match":
            run = _chen_eval(phi, induced if induced is not None else g, h, g)
        elif kind in ("r3_tangential", "r3_normal"):
            if induced is None or factor is None:
                raise ValueError(
                    f"check '{kind}' needs both an induced metric and a "
                    "conformal factor")
            if r3_pair is None:
                r3_pair = _r3_evals(phi, induced, h, factor, g, parameters)
            run = r3_pair[0] if kind == "r3_tangential" else r3_pair[1]
        else:  # conformal_recovery
            if factor is None:
                raise ValueError("check 'conformal_recovery' needs a "
                                 "conformal factor to compare against")
            run = _recovery_eval(
                phi, g, h, _factor_sq_values(phi.domain, factor, parameters))
        entries.append((exp, run))
    return VerificationCase(name, phi.domain, {}, entries,
                            geometry=(phi, g, h))


# -- running -------------------------------------------------------------------

_EVALUATION_ERRORS = (DomainError, GeometryInputError, ExprEvalError,
                      ValueError, FloatingPointError)


def verify_case(case, samples=64, seed=7, tol=None):
    """Evaluate every expectation at low-discrepancy points.

    ``tol`` overrides the tolerance of residual ("max") checks only;
    magnitude checks keep their own bounds.  Evaluation errors become
    failed checks rather than crashes.
    """
    pts = case.domain.sample(samples, seed)
    records = []
    for exp, evaluate in case._entries:
        use_tol = exp.tol if (tol is None or exp.mode == "min") else float(tol)
        try:
            val_abs, val_norm = evaluate(pts)
        except _EVALUATION_ERRORS:
            records.append(CheckRecord(exp.check, None, None, use_tol,
                                       False, None))
            continue
        if exp.mode == "max":
            idx = int(np.argmax(val_abs))
            passed = bool(val_abs[idx] < use_tol)
        else:
            idx = int(np.argmin(val_abs))
            passed = bool(val_abs[idx] > use_tol)
        records.append(CheckRecord(
            exp.check, float(val_abs[idx]), float(val_norm[idx]), use_tol,
            passed, tuple(float(c) for c in pts[idx])))
    return VerificationReport(VERSION, case.name, seed, samples,
                              tuple(records), all(r.passed for r in records))
