"""Command-line front end.

Subcommands:
  catalog list / catalog verify NAME   named verification cases
  check-transform                      randomized conformal-change laws
  cylinder solve                       RK4 vs closed form for the ODE family
  weierstrass check                    complex-coordinate verdict for surfaces
  custom verify                        user-configured geometry

Exit codes: 0 pass, 1 check failure, 2 usage or config error, 3 evaluation
error, 4 domain violation.  BITENSION_SEED overrides the default seed; an
explicit --seed flag wins over the environment.
"""
import argparse
import os
import sys

import numpy as np

from . import catalog, conformal, cylinder, geometry, weierstrass
from .charts import DomainError
from .config import ConfigError, load_config
from .cylinder import CylinderParams
from .expr import ExprEvalError
from .geometry import GeometryInputError
from .report import VERSION, CheckRecord, VerificationReport, to_json, to_text

EXIT_PASS = 0
EXIT_CHECK_FAIL = 1
EXIT_USAGE = 2
EXIT_EVAL = 3
EXIT_DOMAIN = 4

_DEFAULT_SEED = 7


def _resolve_seed(flag, config_value=None):
    if flag is not None:
        return flag
    raw = os.environ.get("BITENSION_SEED")
    if raw is not None:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"BITENSION_SEED must be an integer, "
                              f"got {raw!r}")
    if config_value is not None:
        return config_value
    return _DEFAULT_SEED


def _coerce(raw):
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    for kind in (int, float):
        try:
            return kind(raw)
        except ValueError:
            continue
    return raw


def _case_params(pairs):
    out = {}
    for pair in pairs or ():
        key, eq, raw = pair.partition("=")
        if not eq or not key:
            raise ConfigError(f"--param wants key=value, got {pair!r}")
        out[key] = _coerce(raw)
    return out


def _emit(rep, fmt):
    print(to_json(rep) if fmt == "json" else to_text(rep))
    return EXIT_PASS if rep.passed else EXIT_CHECK_FAIL


# -- catalog -------------------------------------------------------------------


def _cmd_catalog_list(args):
    for name in catalog.CASE_NAMES:
        print(name)
    return EXIT_PASS


def _cmd_catalog_verify(args):
    case = catalog.build_case(args.name, **_case_params(args.param))
    rep = catalog.verify_case(case, samples=args.samples,
                              seed=_resolve_seed(args.seed), tol=args.tol)
    return _emit(rep, args.format)


# -- transformation laws -------------------------------------------------------


def _dims(raw):
    m, comma, n = raw.partition(",")
    try:
        m, n = int(m), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--dims wants m,n, got {raw!r}")
    if not comma or not 2 <= m <= 5 or not 2 <= n <= 6:
        raise argparse.ArgumentTypeError(
            "domain dimension must lie in 2..5 and target in 2..6")
    return m, n


def _cmd_check_transform(args):
    m, n = args.dims
    seed = _resolve_seed(args.seed)
    rng = np.random.default_rng(seed)
    dom, g, h, phi, fld, fac = conformal.random_transform_family(
        m, args.cases, rng, n=n)
    pts = dom.sample(4, seed + 1)
    x = np.broadcast_to(pts, (args.cases,) + pts.shape)
    gbar = conformal.conformal_metric(g, fac)
    if args.law == "tension":
        direct = geometry.tension_field(phi, gbar, h, x)
        law = conformal.tension_transform_rhs(phi, g, h, fac, x)
    elif args.law == "jacobi":
        direct = geometry.jacobi_apply(phi, gbar, h, x, fld)
        law = conformal.jacobi_transform_rhs(phi, g, h, fac, fld, x)
    else:
        direct = geometry.bitension_field(phi, gbar, h, x)
        law = conformal.bitension_transform_rhs(phi, g, h, fac, x)
    rel = np.abs(direct - law) / (
        1.0 + np.maximum(np.abs(direct), np.abs(law)))
    worst = float(np.max(rel))
    passed = worst < args.tol
    rep = VerificationReport(
        VERSION, f"transform_{args.law}_{m}to{n}", seed, args.cases,
        (CheckRecord(f"{args.law}_law_match", worst, worst, args.tol,
                     passed, None),), passed)
    return _emit(rep, args.format)


# -- cylinder ODE --------------------------------------------------------------


def _sign(raw):
    table = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}
    if raw not in table:
        raise argparse.ArgumentTypeError(f"--sign wants + or -, got {raw!r}")
    return table[raw]


def _write_csv(path, run, params):
    c1, _, _ = cylinder.fit_from_initial(params.radius, run.z[0],
                                         run.values[0], run.slopes[0])
    drift = run.slopes ** 2 - run.values ** 2 / params.radius ** 2 - c1
    with open(path, "w") as handle:
        handle.write("z,lambda_sq_closed,lambda_sq_rk4,first_integral_drift\n")
        for k in range(len(run.z)):
            handle.write(f"{run.z[k]:.17g},{run.closed_form[k]:.17g},"
                         f"{run.values[k]:.17g},{drift[k]:.17g}\n")


def _cmd_cylinder_solve(args):
    params = CylinderParams(args.radius, args.c1, args.c2, args.sign,
                            (args.z0, args.z1))
    cylinder.check_positive(params)
    run = cylinder.solve_ode(params, steps=args.steps)
    if args.emit_csv:
        _write_csv(args.emit_csv, run, params)
    ok_dev = run.deviation < args.tol
    ok_drift = run.first_integral_drift < args.drift_tol
    print(f"closed form vs RK4 over [{args.z0:g}, {args.z1:g}] "
          f"with {args.steps} steps")
    print(f"{'PASS' if ok_dev else 'FAIL'}  deviation        "
          f"{run.deviation:.6e}  (tol {args.tol:g})")
    print(f"{'PASS' if ok_drift else 'FAIL'}  integral drift   "
          f"{run.first_integral_drift:.6e}  (tol {args.drift_tol:g})")
    if args.emit_csv:
        print(f"wrote {args.emit_csv}")
    return EXIT_PASS if ok_dev and ok_drift else EXIT_CHECK_FAIL


# -- weierstrass ---------------------------------------------------------------


def _cmd_weierstrass_check(args):
    if args.case:
        case = catalog.build_case(args.case, **_case_params(args.param))
        phi, g, h = case.geometry
        label = args.case
    else:
        cfg = load_config(args.config)
        phi, g, h = cfg.phi, cfg.metric, cfg.target
        label = cfg.name
    seed = _resolve_seed(args.seed)
    pts = phi.domain.sample(args.samples, seed)
    try:
        ws = weierstrass.section(phi, g, h, pts)
    except GeometryInputError as err:
        print(f"not checkable this way: {err}", file=sys.stderr)
        return EXIT_USAGE
    w1, w2 = weierstrass.conformality_sums(ws)
    w3 = weierstrass.w3_residual(ws)
    anti = np.stack([np.abs(weierstrass.wirtinger_dzbar(c).value)
                     for c in ws.components], axis=-1)
    w1_max = float(np.max(np.abs(w1)))
    w2_min = float(np.min(w2))
    w3_max = float(np.max(np.abs(w3)))
    holo_max = float(np.max(np.linalg.norm(anti, axis=-1)))
    print(f"case: {label}  samples: {args.samples}  seed: {seed}")
    print(f"conformality defect  max |sum phi_a^2|   {w1_max:.6e}")
    print(f"immersion scale      min sum |phi_a|^2   {w2_min:.6e}")
    print(f"biharmonicity defect max |(W3)|          {w3_max:.6e}")
    print(f"anti-holomorphy      max |d phi/dzbar|   {holo_max:.6e}")
    if w1_max > args.conformal_tol:
        print("verdict: not conformal")
        return EXIT_CHECK_FAIL
    if w3_max >= args.tol:
        print("verdict: not biharmonic")
        return EXIT_CHECK_FAIL
    if holo_max < 1e-10:
        print("verdict: harmonic")
    else:
        print("verdict: proper biharmonic")
    return EXIT_PASS


# -- custom configs ------------------------------------------------------------


def _cmd_custom_verify(args):
    cfg = load_config(args.config)
    case = cfg.build_case()
    samples = args.samples if args.samples is not None else (cfg.samples or 64)
    rep = catalog.verify_case(case, samples=samples,
                              seed=_resolve_seed(args.seed, cfg.seed),
                              tol=args.tol)
    return _emit(rep, args.format)


# -- parser --------------------------------------------------------------------


def _add_sampling(sub, with_tol=True, with_format=True):
    sub.add_argument("--samples", type=int, default=64)
    sub.add_argument("--seed", type=int, default=None)
    if with_tol:
        sub.add_argument("--tol", type=float, default=None,
                         help="override the tolerance of residual checks")
    if with_format:
        sub.add_argument("--format", choices=("text", "json"), default="text")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="bitension",
        description="verify tension, bitension, and conformal-change "
                    "identities on expression-defined geometries")
    tree = parser.add_subparsers(dest="command", required=True)

    cat = tree.add_parser("catalog", help="built-in verification cases")
    cat_tree = cat.add_subparsers(dest="subcommand", required=True)
    cat_list = cat_tree.add_parser("list", help="print case names")
    cat_list.set_defaults(handler=_cmd_catalog_list)
    cat_verify = cat_tree.add_parser("verify", help="run one case")
    cat_verify.add_argument("name")
    cat_verify.add_argument("--param", action="append", metavar="KEY=VALUE")
    _add_sampling(cat_verify)
    cat_verify.set_defaults(handler=_cmd_catalog_verify)

    law = tree.add_parser(
        "check-transform",
        help="randomized conformal-change law comparisons")
    law.add_argument("--law", choices=("tension", "jacobi", "bitension"),
                     required=True)
    law.add_argument("--dims", type=_dims, required=True, metavar="M,N")
    law.add_argument("--cases", type=int, default=100)
    law.add_argument("--seed", type=int, default=None)
    law.add_argument("--tol", type=float, default=1e-7)
    law.add_argument("--format", choices=("text", "json"), default="text")
    law.set_defaults(handler=_cmd_check_transform)

    cyl = tree.add_parser("cylinder", help="the biharmonic cylinder family")
    cyl_tree = cyl.add_subparsers(dest="subcommand", required=True)
    solve = cyl_tree.add_parser("solve", help="integrate and compare")
    solve.add_argument("--radius", type=float, required=True)
    solve.add_argument("--c1", type=float, required=True)
    solve.add_argument("--c2", type=float, required=True)
    solve.add_argument("--sign", type=_sign, default=1)
    solve.add_argument("--z0", type=float, default=0.0)
    solve.add_argument("--z1", type=float, default=1.0)
    solve.add_argument("--steps", type=int, default=256)
    solve.add_argument("--tol", type=float, default=1e-8,
                       help="bound for the RK4 vs closed-form deviation")
    solve.add_argument("--drift-tol", type=float, default=1e-10)
    solve.add_argument("--emit-csv", metavar="PATH")
    solve.set_defaults(handler=_cmd_cylinder_solve)

    weier = tree.add_parser("weierstrass",
                            help="complex-coordinate surface checks")
    weier_tree = weier.add_subparsers(dest="subcommand", required=True)
    check = weier_tree.add_parser("check", help="classify one immersion")
    pick = check.add_mutually_exclusive_group(required=True)
    pick.add_argument("--case", help="a catalog case name")
    pick.add_argument("--config", help="a run config file")
    check.add_argument("--param", action="append", metavar="KEY=VALUE")
    check.add_argument("--samples", type=int, default=64)
    check.add_argument("--seed", type=int, default=None)
    check.add_argument("--tol", type=float, default=1e-9,
                       help="biharmonicity bound on the mixed third "
                            "derivative")
    check.add_argument("--conformal-tol", type=float, default=1e-9)
    check.set_defaults(handler=_cmd_weierstrass_check)

    custom = tree.add_parser("custom", help="user-configured geometry")
    custom_tree = custom.add_subparsers(dest="subcommand", required=True)
    run = custom_tree.add_parser("verify", help="run a config file")
    run.add_argument("--config", required=True)
    run.add_argument("--samples", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--tol", type=float, default=None)
    run.add_argument("--format", choices=("text", "json"), default="text")
    run.set_defaults(handler=_cmd_custom_verify)

    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as err:
        print(f"domain error: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ExprEvalError, GeometryInputError, FloatingPointError) as err:
        print(f"evaluation error: {err}", file=sys.stderr)
        return EXIT_EVAL
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
