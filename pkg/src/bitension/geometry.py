"""Riemannian geometry engine driven by Taylor arithmetic.

Metrics and maps are given by coordinate expressions; every geometric object
(Christoffel symbols, curvature, tension and bitension fields, the Jacobi
operator) is obtained by evaluating those expressions on batches of jets and
reading off the derivatives.  No finite differencing happens here: derivatives
are exact up to floating point rounding.

Index conventions, fixed once for the whole package:

* ``gamma[i][j][k]`` holds the Christoffel symbol with the upper index last.
* The curvature sign is R(X,Y)Z = [nabla_X, nabla_Y]Z - nabla_{[X,Y]}Z.
  Stored values ``R[..., l, k, i, j]`` satisfy R(e_i, e_j)e_k = R[l,k,i,j] e_l;
  with this sign the unit sphere has constant sectional curvature +1.
* The Jacobi operator of a map is
  J(X) = -Trace_g (nabla^phi)^2 X + Trace_g R^N(dphi, X) dphi,
  and the bitension field is tau2 = -J(tau); harmonic maps are biharmonic.

A :class:`MapState` caches all per-point data for one (map, domain metric,
target metric, batch of points, derivative order) tuple.  The module-level
functions are thin wrappers that build a state and extract one quantity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr, jets
from .charts import DomainError, SmoothMap, VectorFieldAlongMap

# d/dt E2(phi_t) = VARIATION_SIGN * integral <tau2, V> dv_g for compactly
# supported variation fields V (checked numerically in the test suite).
VARIATION_SIGN = 1.0


class GeometryInputError(ValueError):
    """Charts, dimensions, or parameters of the inputs do not fit together."""


class MetricError(ValueError):
    """A metric's component matrix is malformed (not symmetric)."""


# -- expression evaluation on jet seeds ---------------------------------------


def _seeds(coords, x, order):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != len(coords):
        raise GeometryInputError(
            f"points have {x.shape[-1]} coordinates, chart has {len(coords)}")
    variables = {c: jets.Jet.variable(i, x[..., i], len(coords), order)
                 for i, c in enumerate(coords)}
    return x, x.shape[:-1], variables


def _eval_components(components, variables, parameters, batch_shape, num_vars, order):
    """Evaluate expression components to jets, coercing constants."""
    ctx = expr.EvalContext(variables, parameters)
    out = []
    for comp in components:
        v = expr.evaluate(comp, ctx)
        if isinstance(v, jets.Jet):
            out.append(v)
        else:
            arr = np.broadcast_to(np.asarray(v, dtype=float), batch_shape)
            out.append(jets.Jet.constant(arr, num_vars, order))
    return out


def _sym_matrix_jets(metric, variables, batch_shape, order, what):
    m = metric.dim
    rows = [_eval_components(metric.components[i], variables, metric.parameters,
                             batch_shape, m, order) for i in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            a, b = rows[i][j].coeffs, rows[j][i].coeffs
            scale = 1.0 + max(np.max(np.abs(a)), np.max(np.abs(b)))
            if np.max(np.abs(a - b)) > 1e-9 * scale:
                raise MetricError(
                    f"{what} components ({i},{j}) and ({j},{i}) disagree")
    return rows


def _metric_values(metric, y):
    """Plain float evaluation of the component matrix at points ``y``."""
    batch = y.shape[:-1]
    ctx = expr.EvalContext({c: y[..., a] for a, c in enumerate(metric.domain.coords)},
                           metric.parameters)
    vals = np.empty(batch + (metric.dim, metric.dim))
    for i in range(metric.dim):
        for j in range(metric.dim):
            v = np.asarray(expr.evaluate(metric.components[i][j], ctx), dtype=float)
            vals[..., i, j] = np.broadcast_to(v, batch)
    return vals


def _require_spd(values, x, what):
    eig = np.linalg.eigvalsh(values)
    smallest = eig[..., 0]
    if np.any(smallest <= 0.0):
        flat = smallest.reshape(-1)
        k = int(np.argmin(flat))
        pt = np.asarray(x, dtype=float).reshape(-1, x.shape[-1])[k]
        raise DomainError(f"{what} is not positive definite at {pt.tolist()} "
                          f"(smallest eigenvalue {flat[k]:.6g})")


# -- jet linear algebra --------------------------------------------------------


def _values_matrix(rows):
    return np.stack([np.stack([e.value for e in row], axis=-1) for row in rows],
                    axis=-2)


def _zero_jet(batch_shape, num_vars, order):
    return jets.Jet.constant(np.zeros(batch_shape), num_vars, order)


def _jet_matrix_inverse(rows):
    """Inverse of a jet matrix with invertible value part.

    Splitting A = A0 + E with E carrying no constant term, the geometric
    series sum (-A0^-1 E)^k A0^-1 terminates at the jet order because each
    factor of E raises the minimal degree.
    """
    msize = len(rows)
    order = min(e.order for row in rows for e in row)
    num_vars = rows[0][0].num_vars
    a0 = _values_matrix(rows)
    a0inv = np.linalg.inv(a0)
    batch = a0.shape[:-2]
    hot = [[rows[i][j] - a0[..., i, j] for j in range(msize)] for i in range(msize)]
    neg = [[None] * msize for _ in range(msize)]
    for i in range(msize):
        for j in range(msize):
            acc = None
            for k in range(msize):
                if not np.any(hot[k][j].coeffs):
                    continue
                term = hot[k][j] * (-a0inv[..., i, k])
                acc = term if acc is None else acc + term
            neg[i][j] = acc if acc is not None else _zero_jet(batch, num_vars, order)
    ones = np.ones(batch)
    ident = [[jets.Jet.constant(ones if i == j else np.zeros(batch), num_vars, order)
              for j in range(msize)] for i in range(msize)]
    series = ident
    for _ in range(order):
        nxt = [[None] * msize for _ in range(msize)]
        for i in range(msize):
            for j in range(msize):
                acc = ident[i][j]
                for k in range(msize):
                    if not np.any(neg[i][k].coeffs):
                        continue
                    acc = acc + neg[i][k] * series[k][j]
                nxt[i][j] = acc
        series = nxt
    out = [[None] * msize for _ in range(msize)]
    for i in range(msize):
        for j in range(msize):
            acc = None
            for k in range(msize):
                term = series[i][k] * a0inv[..., k, j]
                acc = term if acc is None else acc + term
            out[i][j] = acc
    return out


def _christoffel_jets(gj, ginv):
    """gamma[i][j][k] = Gamma^k_ij, one jet order below the metric jets."""
    m = len(gj)
    dg = [[[gj[i][j].derivative(l) for l in range(m)] for j in range(m)]
          for i in range(m)]
    batch = gj[0][0].value.shape
    order = gj[0][0].order - 1
    out = [[[None] * m for _ in range(m)] for _ in range(m)]
    for i in range(m):
        for j in range(i, m):
            for k in range(m):
                acc = None
                for l in range(m):
                    br = dg[j][l][i] + dg[i][l][j] - dg[i][j][l]
                    if not np.any(br.coeffs):
                        continue
                    term = ginv[k][l] * br
                    acc = term if acc is None else acc + term
                val = acc * 0.5 if acc is not None else _zero_jet(batch, m, order)
                out[i][j][k] = val
                out[j][i][k] = val
    return out


def _gamma_values(gamma):
    return np.stack([np.stack([np.stack([e.value for e in kk], axis=-1)
                               for kk in jj], axis=-2) for jj in gamma], axis=-3)


def _curvature_values(gamma):
    """R[..., l, k, i, j] with R(e_i, e_j) e_k = R^l_{kij} e_l."""
    n = len(gamma)
    gv = _gamma_values(gamma)
    batch = gv.shape[:-3]
    dg = np.empty(batch + (n, n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                jet = gamma[i][j][k]
                for d in range(n):
                    dg[..., d, i, j, k] = jet.derivative(d).value
    t1 = np.einsum("...ijkl->...lkij", dg)
    t2 = np.einsum("...jikl->...lkij", dg)
    t3 = np.einsum("...ipl,...jkp->...lkij", gv, gv)
    t4 = np.einsum("...jpl,...ikp->...lkij", gv, gv)
    return t1 - t2 + t3 - t4


def _compose_to_x(jet_y, phi_jets):
    """Compose a jet in target coordinates with the map's coordinate jets.

    Works by expanding the target-side Taylor polynomial monomial by monomial
    in the value-free parts of the map jets; exact through the target jet's
    own order.
    """
    q = jet_y.order
    m = phi_jets[0].num_vars
    if q == 0:
        return jets.Jet.constant(jet_y.value, m, 0)
    n = jet_y.num_vars
    centered = []
    for pj in phi_jets:
        t = pj.truncated(q)
        c = np.array(t.coeffs)
        c[..., 0] = 0.0
        centered.append(jets.Jet(m, q, c))
    pows = []
    for a in range(n):
        row = [None] * (q + 1)
        row[1] = centered[a]
        for k in range(2, q + 1):
            row[k] = row[k - 1] * centered[a]
        pows.append(row)
    mids = jets.multi_indices(n, q)
    batch = np.broadcast_shapes(jet_y.coeffs.shape[:-1], centered[0].coeffs.shape[:-1])
    out = np.zeros(batch + (centered[0].coeffs.shape[-1],))
    out[..., 0] = jet_y.coeffs[..., 0]
    for pos in range(1, len(mids)):
        coef = jet_y.coeffs[..., pos]
        if not np.any(coef):
            continue
        mono = None
        for a, d in enumerate(mids[pos]):
            if d:
                mono = pows[a][d] if mono is None else mono * pows[a][d]
        out += coef[..., None] * mono.coeffs
    return jets.Jet(m, q, out)


# -- the per-point engine -------------------------------------------------------


class MapState:
    """Jets of one map between metric charts at a batch of points.

    ``order`` is the Taylor order carried for the map and the domain metric:
    2 suffices for tension fields, 3 for the Jacobi operator, 4 for bitension
    fields.  The target metric is expanded to ``order - 1`` around the image
    points and its Christoffel symbols are pulled back through the map.

    Points ``x`` may carry arbitrary leading batch axes; every derived value
    keeps those axes.
    """

    def __init__(self, phi, g, h, x, order):
        if order not in (2, 3, 4):
            raise GeometryInputError(f"unsupported jet order {order}")
        if g.domain.coords != phi.domain.coords:
            raise GeometryInputError("domain metric lives on a different chart")
        if h.domain.coords != phi.codomain.coords:
            raise GeometryInputError("target metric lives on a different chart")
        self.phi, self.g, self.h = phi, g, h
        self.order = order
        m, n = phi.domain.dim, phi.codomain.dim
        self.m, self.n = m, n

        x, batch, xvars = _seeds(phi.domain.coords, x, order)
        phi.domain.require(x)
        self.x = x
        self.batch_shape = batch
        self._xvars = xvars

        self.g_jets = _sym_matrix_jets(g, xvars, batch, order, "domain metric")
        self.g_val = _values_matrix(self.g_jets)
        _require_spd(self.g_val, x, "domain metric")
        self.ginv_jets = _jet_matrix_inverse(self.g_jets)
        self.ginv_val = _values_matrix(self.ginv_jets)
        self.sqrt_det_g = np.sqrt(np.linalg.det(self.g_val))
        self.gammaM = _christoffel_jets(self.g_jets, self.ginv_jets)
        self.gammaM_val = _gamma_values(self.gammaM)

        self.phi_jets = _eval_components(phi.components, xvars, phi.parameters,
                                         batch, m, order)
        self.y0 = np.stack([pj.value for pj in self.phi_jets], axis=-1)
        phi.codomain.require(self.y0)
        self.Dphi = [[self.phi_jets[a].derivative(i) for a in range(n)]
                     for i in range(m)]
        self.dphi = np.stack([np.stack([self.Dphi[i][a].value for a in range(n)],
                                       axis=-1) for i in range(m)], axis=-2)

        yorder = order - 1
        yvars = {c: jets.Jet.variable(a, self.y0[..., a], n, yorder)
                 for a, c in enumerate(phi.codomain.coords)}
        self.h_yjets = _sym_matrix_jets(h, yvars, batch, yorder, "target metric")
        self.hN_val = _values_matrix(self.h_yjets)
        _require_spd(self.hN_val, self.y0, "target metric")
        hinv_y = _jet_matrix_inverse(self.h_yjets)
        self.gammaN_y = _christoffel_jets(self.h_yjets, hinv_y)

        gnx = [[[None] * n for _ in range(n)] for _ in range(n)]
        for a in range(n):
            for b in range(a, n):
                for c in range(n):
                    j = _compose_to_x(self.gammaN_y[a][b][c], self.phi_jets)
                    gnx[a][b][c] = j
                    gnx[b][a][c] = j
        self.gammaN_x = gnx

        qorder = order - 2
        self.Q_jets = []
        for i in range(m):
            qi = [[None] * n for _ in range(n)]
            for c in range(n):
                for b in range(n):
                    acc = None
                    for a in range(n):
                        ga = gnx[a][b][c]
                        if not np.any(ga.coeffs):
                            continue
                        term = ga * self.Dphi[i][a]
                        acc = term if acc is None else acc + term
                    qi[c][b] = acc if acc is not None else _zero_jet(batch, m, qorder)
            self.Q_jets.append(qi)
        self.Q_val = np.stack(
            [np.stack([np.stack([self.Q_jets[i][c][b].value for b in range(n)],
                                axis=-1) for c in range(n)], axis=-2)
             for i in range(m)], axis=-3)

        self.RN = _curvature_values(self.gammaN_y) if order >= 3 else None
        self._tension = None
        self._bitension = None

    # -- scalar helpers ---------------------------------------------------------

    def scalar_jet(self, source, parameters=None):
        """Jet of a scalar expression in the domain coordinates."""
        node = expr.parse(source) if isinstance(source, str) else source
        v = expr.evaluate(node, expr.EvalContext(self._xvars, parameters or {}))
        if isinstance(v, jets.Jet):
            return v
        arr = np.broadcast_to(np.asarray(v, dtype=float), self.batch_shape)
        return jets.Jet.constant(arr, self.m, self.order)

    def gradient_jets(self, f):
        """Metric gradient of a scalar jet, one component jet per axis."""
        out = []
        for i in range(self.m):
            acc = None
            for j in range(self.m):
                term = self.ginv_jets[i][j] * f.derivative(j)
                acc = term if acc is None else acc + term
            out.append(acc)
        return out

    def scalar_laplacian(self, f):
        """Laplace-Beltrami of a scalar jet, as a jet two orders lower."""
        acc = None
        for i in range(self.m):
            for j in range(i, self.m):
                t = f.derivative(i).derivative(j)
                for k in range(self.m):
                    gk = self.gammaM[i][j][k]
                    if np.any(gk.coeffs):
                        t = t - gk * f.derivative(k)
                term = self.ginv_jets[i][j] * t
                if i != j:
                    term = term * 2.0
                acc = term if acc is None else acc + term
        return acc

    def domain_inner(self, u, v):
        return np.einsum("...ij,...i,...j->...", self.g_val, u, v)

    def target_inner(self, a, b):
        return np.einsum("...ab,...a,...b->...", self.hN_val, a, b)

    # -- sections of the pulled-back bundle --------------------------------------

    def section_from_field(self, field):
        return _eval_components(field.components, self._xvars, field.parameters,
                                self.batch_shape, self.m, self.order)

    def dphi_apply(self, vec):
        """Push a domain vector (jet components) through the differential."""
        out = []
        for a in range(self.n):
            acc = None
            for i in range(self.m):
                term = vec[i] * self.Dphi[i][a]
                acc = term if acc is None else acc + term
            out.append(acc)
        return out

    def covariant_derivative(self, section):
        """Pull-back connection derivative: DS[j][c] = (nabla^phi_j S)^c."""
        out = []
        for j in range(self.m):
            row = []
            for c in range(self.n):
                acc = section[c].derivative(j)
                for b in range(self.n):
                    q = self.Q_jets[j][c][b]
                    if np.any(q.coeffs):
                        acc = acc + q * section[b]
                row.append(acc)
            out.append(row)
        return out

    def directional_covariant(self, vec, section):
        """Values of nabla^phi_Y S for a domain vector Y."""
        ds = self.covariant_derivative(section)
        dsval = np.stack([np.stack([ds[j][c].value for c in range(self.n)], axis=-1)
                          for j in range(self.m)], axis=-2)
        if isinstance(vec[0], jets.Jet):
            yv = np.stack([v.value for v in vec], axis=-1)
        else:
            yv = np.stack([np.broadcast_to(np.asarray(v, dtype=float),
                                           self.batch_shape) for v in vec], axis=-1)
        return np.einsum("...j,...jc->...c", yv, dsval)

    def trace_laplacian(self, section):
        """Values of Trace_g (nabla^phi)^2 S (the rough Laplacian on sections)."""
        if min(s.order for s in section) < 2:
            raise GeometryInputError("trace_laplacian needs order-2 section jets")
        ds = self.covariant_derivative(section)
        m, n = self.m, self.n
        dsval = np.stack([np.stack([ds[j][c].value for c in range(n)], axis=-1)
                          for j in range(m)], axis=-2)
        dds = np.stack(
            [np.stack([np.stack([ds[j][c].derivative(i).value for c in range(n)],
                                axis=-1) for j in range(m)], axis=-2)
             for i in range(m)], axis=-3)
        full = dds + np.einsum("...icb,...jb->...ijc", self.Q_val, dsval)
        return (np.einsum("...ij,...ijc->...c", self.ginv_val, full)
                - np.einsum("...ij,...ijk,...kc->...c", self.ginv_val,
                            self.gammaM_val, dsval))

    def curvature_trace(self, section_values):
        """Values of Trace_g R^N(dphi, S) dphi."""
        if self.RN is None:
            raise GeometryInputError("curvature trace needs jet order >= 3")
        return np.einsum("...ij,...ia,...b,...jk,...ckab->...c", self.ginv_val,
                         self.dphi, section_values, self.dphi, self.RN)

    def jacobi_of(self, section):
        """J(S) = -Trace nabla^2 S + Trace R^N(dphi, S) dphi, as values."""
        sval = np.stack([s.value for s in section], axis=-1)
        return self.curvature_trace(sval) - self.trace_laplacian(section)

    # -- tension and bitension ----------------------------------------------------

    @property
    def tension_jets(self):
        if self._tension is None:
            comps = []
            for c in range(self.n):
                acc = None
                for i in range(self.m):
                    for j in range(i, self.m):
                        t = self.Dphi[i][c].derivative(j)
                        for k in range(self.m):
                            gk = self.gammaM[i][j][k]
                            if np.any(gk.coeffs):
                                t = t - gk * self.Dphi[k][c]
                        for b in range(self.n):
                            qb = self.Q_jets[i][c][b]
                            if np.any(qb.coeffs):
                                t = t + qb * self.Dphi[j][b]
                        term = self.ginv_jets[i][j] * t
                        if i != j:
                            term = term * 2.0
                        acc = term if acc is None else acc + term
                comps.append(acc)
            self._tension = comps
        return self._tension

    @property
    def tension_values(self):
        return np.stack([t.value for t in self.tension_jets], axis=-1)

    @property
    def bitension_values(self):
        """tau2 = Trace nabla^2 tau - Trace R^N(dphi, tau) dphi = -J(tau)."""
        if self._bitension is None:
            if self.order < 4:
                raise GeometryInputError("bitension needs jet order 4")
            tau = self.tension_jets
            tval = np.stack([t.value for t in tau], axis=-1)
            self._bitension = (self.trace_laplacian(tau)
                               - self.curvature_trace(tval))
        return self._bitension

    def compose_codomain_jet(self, jet_y):
        """Compose a jet in target coordinates with this state's map jets."""
        return _compose_to_x(jet_y, self.phi_jets)


# -- public one-shot operators ---------------------------------------------------


def metric_jets(metric, x, order=2):
    """Component jets of a metric at points ``x`` (symmetry and SPD checked)."""
    x, batch, variables = _seeds(metric.domain.coords, x, order)
    metric.domain.require(x)
    rows = _sym_matrix_jets(metric, variables, batch, order, "metric")
    _require_spd(_values_matrix(rows), x, "metric")
    return rows


def christoffel(metric, x):
    """Christoffel values; ``[..., i, j, k]`` is Gamma^k_ij."""
    rows = metric_jets(metric, x, order=2)
    ginv = _jet_matrix_inverse(rows)
    return _gamma_values(_christoffel_jets(rows, ginv))


def curvature_tensor(metric, x):
    """Curvature values R[..., l, k, i, j]; R(e_i,e_j)e_k = R^l_{kij} e_l."""
    rows = metric_jets(metric, x, order=2)
    ginv = _jet_matrix_inverse(rows)
    return _curvature_values(_christoffel_jets(rows, ginv))


def pullback_metric(phi, h, x):
    """Values of (phi^* h)_ij = h_ab(phi) d_i phi^a d_j phi^b."""
    x, batch, variables = _seeds(phi.domain.coords, x, 1)
    phi.domain.require(x)
    pj = _eval_components(phi.components, variables, phi.parameters, batch,
                          phi.domain.dim, 1)
    y0 = np.stack([p.value for p in pj], axis=-1)
    phi.codomain.require(y0)
    n = phi.codomain.dim
    dphi = np.stack([np.stack([pj[a].derivative(i).value for a in range(n)],
                              axis=-1) for i in range(phi.domain.dim)], axis=-2)
    hv = _metric_values(h, y0)
    return np.einsum("...ia,...ab,...jb->...ij", dphi, hv, dphi)


@dataclass(frozen=True)
class ConformalityResult:
    """Outcome of testing phi^* h = lambda^2 g at a batch of points."""
    conformal: bool
    lambda_sq: np.ndarray
    max_residual: float


def conformality_factor(phi, g, h, x, tol=1e-9):
    """Fit lambda^2 = trace(g^-1 phi^*h)/m and measure the residual.

    ``max_residual`` is the largest entry of phi^*h - lambda^2 g over all
    points, divided by 1 + the largest entry of phi^*h.
    """
    x = np.asarray(x, dtype=float)
    pb = pullback_metric(phi, h, x)
    gv = _metric_values(g, x)
    lam2 = np.einsum("...ij,...ji->...", np.linalg.inv(gv), pb) / g.dim
    resid = pb - lam2[..., None, None] * gv
    scale = 1.0 + np.max(np.abs(pb))
    max_res = float(np.max(np.abs(resid)) / scale)
    return ConformalityResult(bool(max_res <= tol and np.all(lam2 > 0.0)),
                              lam2, max_res)


def _as_field(field):
    if isinstance(field, VectorFieldAlongMap):
        return field
    return VectorFieldAlongMap.from_components(tuple(field))


def tension_field(phi, g, h, x):
    """tau(phi) = Trace_g nabla dphi, as target-frame values."""
    return MapState(phi, g, h, x, 2).tension_values


def jacobi_apply(phi, g, h, x, field):
    """Jacobi operator applied to a section given by target-frame expressions."""
    state = MapState(phi, g, h, x, 3)
    return state.jacobi_of(state.section_from_field(_as_field(field)))


def bitension_field(phi, g, h, x):
    """tau2(phi), the bitension field, as target-frame values."""
    return MapState(phi, g, h, x, 4).bitension_values


# -- integral functionals ----------------------------------------------------------


def _quad_grid(box, nodes):
    """Tensor Gauss-Legendre grid over a box; returns points and weights."""
    axes, wts = [], []
    for lo, hi in box:
        t, w = np.polynomial.legendre.leggauss(nodes)
        axes.append(0.5 * (hi + lo) + 0.5 * (hi - lo) * t)
        wts.append(0.5 * (hi - lo) * w)
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(box))
    weight = np.ones(1)
    for w in wts:
        weight = np.outer(weight, w).reshape(-1)
    return grid, weight


def bienergy(phi, g, h, nodes=32):
    """E2(phi) = 1/2 integral |tau(phi)|^2 dv_g over the domain box."""
    grid, w = _quad_grid(phi.domain.box, nodes)
    state = MapState(phi, g, h, grid, 2)
    tau = state.tension_values
    return float(0.5 * np.sum(w * state.target_inner(tau, tau) * state.sqrt_det_g))


def _field_values(field, coords, x):
    ctx = expr.EvalContext({c: x[..., i] for i, c in enumerate(coords)},
                           field.parameters)
    vals = [np.broadcast_to(np.asarray(expr.evaluate(comp, ctx), dtype=float),
                            x.shape[:-1]) for comp in field.components]
    return np.stack(vals, axis=-1)


def first_variation(phi, g, h, field, eps=1e-2, nodes=24):
    """Slope of E2 along a variation field versus its bitension pairing.

    Returns a dict with the central-difference slope at ``eps``, the slope at
    ``eps/2``, and the integral of <tau2, V> dv_g.  For fields vanishing to
    high order on the boundary, slope = VARIATION_SIGN * pairing up to
    O(eps^2).
    """
    field = _as_field(field)
    tname = "__fv_t__"
    if tname in phi.parameters or tname in field.parameters:
        raise GeometryInputError(f"parameter name {tname} is reserved")
    merged = dict(phi.parameters)
    for k, v in field.parameters.items():
        if k in merged and not np.array_equal(merged[k], v):
            raise GeometryInputError(f"parameter {k} bound to conflicting values")
        merged[k] = v
    comps = tuple(expr.Binary("+", pc, expr.Binary("*", expr.Name(tname), vc))
                  for pc, vc in zip(phi.components, field.components))

    def energy(t):
        moved = SmoothMap(phi.domain, phi.codomain, comps, {**merged, tname: t})
        return bienergy(moved, g, h, nodes=nodes)

    slope = (energy(eps) - energy(-eps)) / (2.0 * eps)
    slope_half = (energy(eps / 2.0) - energy(-eps / 2.0)) / eps
    grid, w = _quad_grid(phi.domain.box, nodes)
    state = MapState(phi, g, h, grid, 4)
    tau2 = state.bitension_values
    vvals = _field_values(field, phi.domain.coords, grid)
    pairing = float(np.sum(w * state.target_inner(tau2, vvals) * state.sqrt_det_g))
    return {"slope": float(slope), "slope_half": float(slope_half),
            "pairing": pairing}
