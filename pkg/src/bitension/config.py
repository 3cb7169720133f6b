"""Plain-text run configs: named charts, metrics, maps, and checks.

The format is INI-style with typed section headers::

    [chart NAME]    coords = u v        box = lo:hi lo:hi   (one per coord)
                    exclude = coord:value ...               (optional)
    [params]        name = number ...
    [metric NAME]   chart = CHART, then exactly one of
                      identity = yes
                      conformal = EXPR          (factor multiplying the
                                                 identity components)
                      g_i_j = EXPR entries      (1-based, symmetric; every
                                                 diagonal required, missing
                                                 off-diagonals are zero)
    [map NAME]      from = CHART   to = CHART   components = one EXPR per line
    [factor NAME]   chart = CHART  expr = EXPR  (a conformal scale lambda)
    [check KIND]    tol = number   (optional; KIND names a known check)
    [run]           map = MAP, metric = METRIC, target = METRIC, and
                    optionally induced = METRIC, factor = FACTOR,
                    samples = int, seed = int, name = label

Everything is validated statically before any geometry is evaluated:
referenced names must exist, dimensions must agree, and every expression's
free names must be coordinates of its chart or [params] entries.  Violations
raise ConfigError with the file and section spelled out.
"""
from __future__ import annotations

import configparser
import os.path
from dataclasses import dataclass, field

from . import catalog, expr
from .charts import ChartDomain, RiemannianMetric, SmoothMap


class ConfigError(Exception):
    """A config file that cannot be accepted; message says where and why."""


_SECTION_KINDS = ("chart", "params", "metric", "map", "factor", "check", "run")


@dataclass
class RunConfig:
    """A fully validated run description, ready to assemble."""
    path: str
    name: str
    phi: SmoothMap
    metric: RiemannianMetric
    target: RiemannianMetric
    induced: RiemannianMetric = None
    factor: str = None
    parameters: dict = field(default_factory=dict)
    checks: tuple = ()       # ordered (kind, tol-or-None)
    samples: int = None
    seed: int = None

    def build_case(self):
        return catalog.custom_case(self.name, self.phi, self.metric,
                                   self.target, self.checks,
                                   induced=self.induced, factor=self.factor,
                                   parameters=self.parameters)


def _fail(where, message):
    raise ConfigError(f"{where}: {message}")


def _parse_float(where, key, raw):
    try:
        return float(raw)
    except ValueError:
        _fail(where, f"{key} must be a number, got {raw!r}")


def _parse_expr(where, source, allowed, parameters):
    try:
        node = expr.parse(source)
    except expr.ExprError as err:
        _fail(where, f"cannot parse {source!r}: {err}")
    loose = expr.free_names(node) - set(allowed) - set(parameters)
    if loose:
        name = sorted(loose)[0]
        _fail(where, f"unbound name '{name}' in {source!r}")
    return source


def _split_header(raw, path):
    parts = raw.split()
    kind = parts[0]
    if kind not in _SECTION_KINDS:
        _fail(f"{path} [{raw}]", "unknown section kind "
              f"(expected one of {', '.join(_SECTION_KINDS)})")
    if kind in ("params", "run"):
        if len(parts) != 1:
            _fail(f"{path} [{raw}]", f"section [{kind}] takes no name")
        return kind, None
    if len(parts) != 2:
        _fail(f"{path} [{raw}]", f"section [{kind}] needs exactly one name")
    return kind, parts[1]


def _build_chart(where, body):
    coords = tuple(body.pop("coords", "").split())
    if not coords:
        _fail(where, "coords is required")
    if len(set(coords)) != len(coords):
        _fail(where, "coordinate names must be distinct")
    raw_box = body.pop("box", "").split()
    if len(raw_box) != len(coords):
        _fail(where, f"box needs {len(coords)} lo:hi intervals, "
              f"got {len(raw_box)}")
    box = []
    for piece in raw_box:
        lo, colon, hi = piece.partition(":")
        if not colon:
            _fail(where, f"box interval {piece!r} is not lo:hi")
        lo = _parse_float(where, "box", lo)
        hi = _parse_float(where, "box", hi)
        if not lo < hi:
            _fail(where, f"box interval ({lo:g}, {hi:g}) is empty")
        box.append((lo, hi))
    excluded = []
    for piece in body.pop("exclude", "").split():
        name, colon, value = piece.partition(":")
        if not colon or name not in coords:
            _fail(where, f"exclude entry {piece!r} is not coord:value")
        excluded.append((coords.index(name),
                         _parse_float(where, "exclude", value)))
    if body:
        _fail(where, f"unknown key {sorted(body)[0]!r}")
    return ChartDomain(coords, tuple(box), tuple(excluded))


def _build_metric(where, body, charts, parameters):
    chart_name = body.pop("chart", None)
    if chart_name not in charts:
        _fail(where, f"chart = {chart_name!r} does not name a [chart] section")
    dom = charts[chart_name]
    identity = body.pop("identity", None)
    conformal = body.pop("conformal", None)
    entries = {k: body.pop(k) for k in list(body) if k.startswith("g_")}
    if body:
        _fail(where, f"unknown key {sorted(body)[0]!r}")
    styles = sum(x is not None for x in (identity, conformal)) + bool(entries)
    if styles != 1:
        _fail(where, "give exactly one of identity, conformal, or g_i_j "
              "entries")
    if identity is not None:
        if identity.lower() not in ("yes", "true", "1", "on"):
            _fail(where, f"identity = {identity!r} (say yes)")
        return RiemannianMetric.euclidean(dom), chart_name
    if conformal is not None:
        _parse_expr(where, conformal, dom.coords, parameters)
        return (RiemannianMetric.conformally_flat(dom, conformal,
                                                  dict(parameters)),
                chart_name)
    m = dom.dim
    rows = [["0"] * m for _ in range(m)]
    for key, source in entries.items():
        parts = key.split("_")
        try:
            i, j = int(parts[1]), int(parts[2])
        except (IndexError, ValueError):
            _fail(where, f"entry key {key!r} is not of the form g_i_j")
        if not (1 <= i <= m and 1 <= j <= m):
            _fail(where, f"entry {key} is outside a {m}x{m} metric")
        _parse_expr(where, source, dom.coords, parameters)
        rows[i - 1][j - 1] = source
        rows[j - 1][i - 1] = source
    for i in range(m):
        if rows[i][i] == "0":
            _fail(where, f"diagonal entry g_{i+1}_{i+1} is required")
    return (RiemannianMetric.from_components(dom, rows, dict(parameters)),
            chart_name)


def _build_map(where, body, charts, parameters):
    source_name = body.pop("from", None)
    target_name = body.pop("to", None)
    if source_name not in charts:
        _fail(where, f"from = {source_name!r} does not name a [chart] section")
    if target_name not in charts:
        _fail(where, f"to = {target_name!r} does not name a [chart] section")
    dom, tgt = charts[source_name], charts[target_name]
    comps = [line.strip() for line in body.pop("components", "").splitlines()
             if line.strip()]
    if len(comps) != tgt.dim:
        _fail(where, f"need {tgt.dim} components for chart "
              f"'{target_name}', got {len(comps)}")
    for source in comps:
        _parse_expr(where, source, dom.coords, parameters)
    if body:
        _fail(where, f"unknown key {sorted(body)[0]!r}")
    return (SmoothMap.from_components(dom, tgt, comps, dict(parameters)),
            source_name, target_name)


def load_config(path):
    """Parse and statically validate one run config file."""
    parser = configparser.RawConfigParser(
        delimiters=("=",), comment_prefixes=("#",), strict=True,
        inline_comment_prefixes=None)
    parser.optionxform = str
    try:
        with open(path) as handle:
            parser.read_file(handle, source=str(path))
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err}")
    except configparser.Error as err:
        raise ConfigError(f"{path}: {err}")

    sections = []
    for raw in parser.sections():
        kind, name = _split_header(raw, path)
        sections.append((kind, name, dict(parser.items(raw))))

    parameters = {}
    for kind, name, body in sections:
        if kind == "params":
            for key, raw in body.items():
                parameters[key] = _parse_float(f"{path} [params]", key, raw)

    charts = {}
    for kind, name, body in sections:
        if kind == "chart":
            charts[name] = _build_chart(f"{path} [chart {name}]", body)

    metrics, metric_charts = {}, {}
    maps = {}
    factors, factor_charts = {}, {}
    checks = []
    for kind, name, body in sections:
        where = f"{path} [{kind} {name}]"
        if kind == "metric":
            metrics[name], metric_charts[name] = _build_metric(
                where, body, charts, parameters)
        elif kind == "map":
            maps[name] = _build_map(where, body, charts, parameters)
        elif kind == "factor":
            chart_name = body.pop("chart", None)
            source = body.pop("expr", None)
            if chart_name not in charts:
                _fail(where, f"chart = {chart_name!r} does not name a "
                      "[chart] section")
            if source is None:
                _fail(where, "expr is required")
            if body:
                _fail(where, f"unknown key {sorted(body)[0]!r}")
            _parse_expr(where, source, charts[chart_name].coords, parameters)
            factors[name] = source
            factor_charts[name] = chart_name
        elif kind == "check":
            if name not in catalog.CHECK_KINDS:
                known = ", ".join(sorted(catalog.CHECK_KINDS))
                _fail(where, f"unknown check kind (choose from {known})")
            tol = body.pop("tol", None)
            if tol is not None:
                tol = _parse_float(where, "tol", tol)
                if not tol > 0:
                    _fail(where, "tol must be positive")
            if body:
                _fail(where, f"unknown key {sorted(body)[0]!r}")
            checks.append((name, tol))

    run = None
    for kind, name, body in sections:
        if kind == "run":
            run = body
    if run is None:
        raise ConfigError(f"{path}: a [run] section is required")
    if not checks:
        raise ConfigError(f"{path}: at least one [check KIND] section is "
                          "required")
    where = f"{path} [run]"

    def pick(key, table, label, required=True):
        value = run.pop(key, None)
        if value is None:
            if required:
                _fail(where, f"{key} is required")
            return None
        if value not in table:
            _fail(where, f"{key} = {value!r} does not name a [{label}] "
                  "section")
        return value

    map_name = pick("map", maps, "map")
    metric_name = pick("metric", metrics, "metric")
    target_name = pick("target", metrics, "metric")
    induced_name = pick("induced", metrics, "metric", required=False)
    factor_name = pick("factor", factors, "factor", required=False)

    phi, from_chart, to_chart = maps[map_name]
    if metric_charts[metric_name] != from_chart:
        _fail(where, f"metric '{metric_name}' lives on chart "
              f"'{metric_charts[metric_name]}' but map '{map_name}' starts "
              f"from '{from_chart}'")
    if metric_charts[target_name] != to_chart:
        _fail(where, f"target '{target_name}' lives on chart "
              f"'{metric_charts[target_name]}' but map '{map_name}' lands "
              f"in '{to_chart}'")
    if induced_name and metric_charts[induced_name] != from_chart:
        _fail(where, f"induced '{induced_name}' must live on chart "
              f"'{from_chart}'")
    if factor_name and factor_charts[factor_name] != from_chart:
        _fail(where, f"factor '{factor_name}' must live on chart "
              f"'{from_chart}'")
    needs_factor = {"r3_tangential", "r3_normal", "conformal_recovery"}
    for kind, _ in checks:
        if kind in needs_factor and factor_name is None:
            _fail(where, f"check '{kind}' needs factor = NAME")
        if kind in ("r3_tangential", "r3_normal") and induced_name is None:
            _fail(where, f"check '{kind}' needs induced = NAME")

    samples = run.pop("samples", None)
    seed = run.pop("seed", None)
    label = run.pop("name", None)
    if run:
        _fail(where, f"unknown key {sorted(run)[0]!r}")
    for key, value in (("samples", samples), ("seed", seed)):
        if value is not None and not value.lstrip("-").isdigit():
            _fail(where, f"{key} must be an integer, got {value!r}")
    if samples is not None and int(samples) <= 0:
        _fail(where, "samples must be positive")

    default_label = os.path.splitext(os.path.basename(str(path)))[0]
    return RunConfig(
        path=str(path), name=label or default_label, phi=phi,
        metric=metrics[metric_name], target=metrics[target_name],
        induced=metrics[induced_name] if induced_name else None,
        factor=factors[factor_name] if factor_name else None,
        parameters=parameters, checks=tuple(checks),
        samples=int(samples) if samples is not None else None,
        seed=int(seed) if seed is not None else None)
