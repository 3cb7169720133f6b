"""Plain-data verification reports with deterministic text/JSON renderings.

Reports carry no timestamps: rendering the same case with the same seed,
sample count, and tolerances is byte-identical, which the tests rely on.

Residual checks store the largest residual in ``max_abs`` (absolute) and
``max_norm`` (scaled by the local field magnitude) and pass when the
absolute value stays below the tolerance.  Magnitude checks — the ones
asserting a quantity is bounded AWAY from zero — reuse the same fields for
the binding (smallest) value and pass when it exceeds the tolerance.
A check whose evaluation raised stores null residuals and fails.
"""

import json
from dataclasses import dataclass

VERSION = "0.1.0"


@dataclass(frozen=True)
class CheckRecord:
    name: str
    max_abs: float  # None when evaluation failed
    max_norm: float
    tol: float
    passed: bool
    worst_point: tuple  # coordinates of the binding sample, None on failure


@dataclass(frozen=True)
class VerificationReport:
    version: str
    case: str
    seed: int
    samples: int
    checks: tuple
    passed: bool


REPORT_SCHEMA = {
    "type": "object",
    "required": ["version", "case", "seed", "samples", "checks", "pass"],
    "additionalProperties": False,
    "properties": {
        "version": {"type": "string"},
        "case": {"type": "string"},
        "seed": {"type": "integer"},
        "samples": {"type": "integer", "minimum": 1},
        "pass": {"type": "boolean"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "max_abs", "max_norm", "tol", "pass",
                             "worst_point"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "max_abs": {"type": ["number", "null"]},
                    "max_norm": {"type": ["number", "null"]},
                    "tol": {"type": "number"},
                    "pass": {"type": "boolean"},
                    "worst_point": {
                        "type": ["array", "null"],
                        "items": {"type": "number"},
                    },
                },
            },
        },
    },
}


def to_json(rep):
    payload = {
        "version": rep.version,
        "case": rep.case,
        "seed": rep.seed,
        "samples": rep.samples,
        "checks": [
            {
                "name": c.name,
                "max_abs": c.max_abs,
                "max_norm": c.max_norm,
                "tol": c.tol,
                "pass": c.passed,
                "worst_point": None if c.worst_point is None
                else list(c.worst_point),
            }
            for c in rep.checks
        ],
        "pass": rep.passed,
    }
    return json.dumps(payload, indent=2)


def _fmt(value):
    return "n/a" if value is None else repr(float(value))


def to_text(rep):
    lines = [f"case {rep.case}  (seed {rep.seed}, {rep.samples} samples, "
             f"version {rep.version})"]
    for c in rep.checks:
        flag = "PASS" if c.passed else "FAIL"
        lines.append(f"  {flag}  {c.name}: value={_fmt(c.max_abs)} "
                     f"normalized={_fmt(c.max_norm)} tol={c.tol!r}")
        if c.worst_point is not None:
            coords = ", ".join(repr(float(p)) for p in c.worst_point)
            lines.append(f"        at ({coords})")
    lines.append("overall: " + ("PASS" if rep.passed else "FAIL"))
    return "\n".join(lines)
