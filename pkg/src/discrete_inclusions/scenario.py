"""Scenario files: one JSON document binding a matrix, nonlinearities and a lambda.

A scenario looks like::

    {
      "name": "second order, truncated square",
      "kind": "corollary32",
      "matrix_spec": {"type": "second_order", "T": 5},
      "nonlinearity_spec": {"breakpoints": [-1, 1], "segments": [[0], [0, 0, 1], [0]],
                            "asymptotic": {"c": 0, "R": 1, "d": 0}},
      "delta": 1.0,
      "lambda": 2.0,
      "solve": {"starts": 64, "seed": 0}
    }

``nonlinearity_spec`` is either one object (shared by every component) or a
list with one object per component.  ``lambda`` may be ``"auto_mid"``.
Matrix specs may also be written compactly as ``"tridiagonal(5, -1, 2)"``.
"""

from __future__ import annotations

import csv
import json
import math
import re
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    HypothesisNotSatisfied,
    InclusionError,
    InconsistentDeclaration,
    NonpositivePotential,
    ParseError,
    UndeclaredAsymptotics,
    ValidationError,
)
from .hypotheses import (
    check_g1,
    check_h_conditions,
    specialize_fourth_order,
    specialize_grid,
    specialize_fourth_order_h,
    specialize_tridiagonal,
)
from .matrix_zoo import (
    GridShape,
    SpdMatrix,
    build_fourth_order,
    build_grid_laplacian,
    build_second_order,
    build_tridiagonal,
)
from .nonlinearity import PiecewiseNonlinearity, WeightVector
from .solvers import SCENARIO_CLAIMS, SolveConfig, find_multiplicity
from .variational import InclusionProblem, certify, residual

__all__ = [
    "Scenario",
    "Resolved",
    "parse_matrix_spec",
    "build_matrix",
    "load_scenario",
    "resolve",
    "auto_mid",
    "run_scenario",
    "write_solutions_csv",
    "recertify_report",
    "EXIT_OK",
    "EXIT_HYPOTHESIS",
    "EXIT_SHORTFALL",
    "EXIT_PARSE",
    "EXIT_VALIDATION",
]

EXIT_OK = 0
EXIT_HYPOTHESIS = 2
EXIT_SHORTFALL = 3
EXIT_PARSE = 64
EXIT_VALIDATION = 65

MATRIX_ARGS = {
    "tridiagonal": ("T", "a", "b"),
    "second_order": ("T",),
    "fourth_order": ("T",),
    "grid": ("m", "n"),
    "explicit": ("entries",),
}

_COMPACT = re.compile(r"^\s*([a-z_]+)\s*\((.*)\)\s*$")


# --- matrices -------------------------------------------------------------------


def parse_matrix_spec(spec) -> dict:
    """Normalize ``{"type": ..., ...}`` or ``"name(arg, ...)"`` to the dict form."""
    if isinstance(spec, str):
        m = _COMPACT.match(spec)
        if not m or m.group(1) not in MATRIX_ARGS or m.group(1) == "explicit":
            raise ParseError(f"cannot parse matrix spec {spec!r}")
        name, names = m.group(1), MATRIX_ARGS[m.group(1)]
        try:
            values = [float(x) for x in m.group(2).split(",")] if m.group(2).strip() else []
        except ValueError as exc:
            raise ParseError(f"non-numeric argument in {spec!r}") from exc
        if len(values) != len(names):
            raise ParseError(f"{name} takes {len(names)} arguments, got {len(values)}")
        return {"type": name, **dict(zip(names, values))}
    if not isinstance(spec, dict) or spec.get("type") not in MATRIX_ARGS:
        raise ParseError(f"matrix_spec needs a 'type' among {sorted(MATRIX_ARGS)}")
    names = MATRIX_ARGS[spec["type"]]
    missing = [n for n in names if n not in spec]
    extra = sorted(set(spec) - set(names) - {"type"})
    if missing or extra:
        raise ParseError(f"matrix_spec {spec['type']}: missing {missing}, unexpected {extra}")
    return dict(spec)


def _as_int(x, name):
    if isinstance(x, bool) or not isinstance(x, (int, float)) or int(x) != x:
        raise ValidationError(f"{name} must be an integer, got {x!r}")
    return int(x)


def build_matrix(spec) -> SpdMatrix:
    spec = parse_matrix_spec(spec)
    kind = spec["type"]
    try:
        if kind == "tridiagonal":
            return build_tridiagonal(_as_int(spec["T"], "T"), float(spec["a"]), float(spec["b"]))
        if kind == "second_order":
            return build_second_order(_as_int(spec["T"], "T"))
        if kind == "fourth_order":
            return build_fourth_order(_as_int(spec["T"], "T"))
        if kind == "grid":
            return build_grid_laplacian(GridShape(_as_int(spec["m"], "m"), _as_int(spec["n"], "n")))
        return SpdMatrix(np.asarray(spec["entries"], dtype=float))
    except ValidationError:
        raise
    except (InclusionError, ValueError, TypeError) as exc:
        raise ValidationError(f"invalid matrix {kind}: {exc}") from exc


# --- scenario -------------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    name: str
    kind: str
    matrix_spec: dict
    nonlinearity_spec: object
    weights: Optional[tuple] = None
    gamma: Optional[float] = None
    delta: Optional[float] = None
    lam: object = "auto_mid"
    solve: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d) -> "Scenario":
        if not isinstance(d, dict):
            raise ParseError("a scenario must be a JSON object")
        d = dict(d)
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        known = {f.name for f in fields(cls)}
        extra = sorted(set(d) - known)
        if extra:
            raise ParseError(f"unknown scenario fields {extra}")
        for req in ("name", "kind", "matrix_spec", "nonlinearity_spec"):
            if req not in d:
                raise ParseError(f"scenario is missing {req!r}")
        if d["kind"] not in SCENARIO_CLAIMS:
            raise ParseError(f"unknown kind {d['kind']!r}; expected one of {sorted(SCENARIO_CLAIMS)}")
        lam = d.get("lam", "auto_mid")
        if not (lam == "auto_mid" or (isinstance(lam, (int, float)) and not isinstance(lam, bool))):
            raise ParseError(f"lambda must be a number or 'auto_mid', got {lam!r}")
        solve = d.get("solve") or {}
        if not isinstance(solve, dict):
            raise ParseError("solve must be an object")
        bad = sorted(set(solve) - {f.name for f in fields(SolveConfig)})
        if bad:
            raise ParseError(f"unknown solve settings {bad}")
        if d.get("weights") is not None:
            d["weights"] = tuple(d["weights"])
        d["matrix_spec"] = parse_matrix_spec(d["matrix_spec"])
        d["solve"] = dict(solve)
        return cls(**d)

    def to_dict(self):
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        if d["weights"] is not None:
            d["weights"] = list(d["weights"])
        return d


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read scenario {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return Scenario.from_dict(data)


def _nonlinearities(spec, T):
    try:
        if isinstance(spec, dict):
            g = PiecewiseNonlinearity.from_dict(spec)
            return [g] * T, g
        if isinstance(spec, list):
            gs = [PiecewiseNonlinearity.from_dict(s) for s in spec]
            if len(gs) != T:
                raise ValidationError(f"{len(gs)} nonlinearities for a matrix of order {T}")
            return gs, None
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed nonlinearity: {exc!r}") from exc
    except ValidationError:
        raise
    except (InclusionError, ValueError) as exc:
        raise ValidationError(f"invalid nonlinearity: {exc}") from exc
    raise ParseError("nonlinearity_spec must be an object or a list of objects")


def auto_mid(left: float, right: float) -> float:
    """Midpoint of ``(left, right)``, or the geometric mean once ``right/left > 100``."""
    if not (0 < left < right and math.isfinite(right)):
        raise ValidationError(f"cannot pick a lambda inside ({left}, {right})")
    if right / left <= 100.0:
        return (left + right) / 2.0
    return math.sqrt(left * right)


@dataclass(frozen=True)
class Resolved:
    """A scenario turned into objects: matrix, problem data, hypothesis verdict and lambda."""

    scenario: Scenario
    matrix: SpdMatrix
    nonlinearities: tuple
    weights: WeightVector
    hypothesis: dict
    satisfied: bool
    admissible: tuple
    lam: Optional[float]
    cfg: SolveConfig

    def problem(self) -> InclusionProblem:
        return InclusionProblem(self.matrix, self.nonlinearities, self.lam, self.weights)


def _require(value, name, kind):
    if value is None:
        raise ValidationError(f"{kind} scenarios need {name}")
    if not value > 0:
        raise ValidationError(f"{name} must be positive, got {value}")
    return float(value)


def _check_three(s, A, gs, weights):
    gamma = _require(s.gamma, "gamma", s.kind)
    delta = _require(s.delta, "delta", s.kind)
    eff = [g.scaled(a) for g, a in zip(gs, weights.alpha)] if s.weights is not None else gs
    spec = s.matrix_spec
    if s.kind == "theorem41":
        if spec["type"] == "tridiagonal":
            a, b = float(spec["a"]), float(spec["b"])
        elif spec["type"] == "second_order":
            a, b = -1.0, 2.0
        else:
            raise ValidationError("theorem41 needs a tridiagonal or second_order matrix")
        report = specialize_tridiagonal(A.order, a, b, eff, gamma, delta)
    elif s.kind == "section42":
        if spec["type"] != "fourth_order":
            raise ValidationError("section42 needs a fourth_order matrix")
        report = specialize_fourth_order(A.order, eff, gamma, delta)
    elif s.kind == "theorem42":
        if spec["type"] != "grid":
            raise ValidationError("theorem42 needs a grid matrix")
        report = specialize_grid(GridShape(int(spec["m"]), int(spec["n"])), eff, gamma, delta)
    else:
        report = check_g1(A, eff, gamma, delta)
    return report.to_dict(), report.satisfied, tuple(report.lambda_interval)


def _check_two(s, A, h, weights):
    delta = _require(s.delta, "delta", s.kind)
    if h is None:
        raise ValidationError(f"{s.kind} scenarios need one shared nonlinearity h")
    if s.kind == "theorem11":
        if s.matrix_spec["type"] != "fourth_order":
            raise ValidationError("theorem11 needs a fourth_order matrix")
        if s.weights is not None:
            raise ValidationError("theorem11 has unit weights; drop the weights field")
        report = specialize_fourth_order_h(A.order, h, delta)
    else:
        report = check_h_conditions(h, weights, A, delta)
    return report.to_dict(), report.satisfied, (report.threshold, math.inf)


def resolve(s: Scenario, seed: Optional[int] = None, tol: Optional[float] = None) -> Resolved:
    """Build everything a run needs and evaluate the scenario's hypotheses.

    ``lam`` stays ``None`` when the hypotheses fail and the scenario asked
    for ``auto_mid``.
    """
    A = build_matrix(s.matrix_spec)
    gs, h = _nonlinearities(s.nonlinearity_spec, A.order)
    try:
        weights = WeightVector(s.weights) if s.weights is not None else WeightVector.ones(A.order)
    except InclusionError as exc:
        raise ValidationError(str(exc)) from exc
    if len(weights) != A.order:
        raise ValidationError(f"{len(weights)} weights for a matrix of order {A.order}")
    overrides = dict(s.solve)
    if seed is not None:
        overrides["seed"] = seed
    if tol is not None:
        overrides["tol_residual"] = tol
    try:
        cfg = SolveConfig(**overrides)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"invalid solve settings: {exc}") from exc

    try:
        if SCENARIO_CLAIMS[s.kind] == "three":
            hyp, ok, admissible = _check_three(s, A, gs, weights)
        else:
            hyp, ok, admissible = _check_two(s, A, h, weights)
    except InconsistentDeclaration as exc:
        raise ValidationError(str(exc)) from exc
    except (UndeclaredAsymptotics, NonpositivePotential, HypothesisNotSatisfied) as exc:
        hyp, ok, admissible = {"error": f"{type(exc).__name__}: {exc}"}, False, (math.nan, math.nan)

    if s.lam == "auto_mid":
        if not ok:
            lam = None
        elif SCENARIO_CLAIMS[s.kind] == "three":
            lam = auto_mid(*admissible)
        else:
            # the corollary range is unbounded above; twice the threshold sits well inside
            lam = 2.0 * admissible[0]
    else:
        lam = float(s.lam)
        if not lam > 0:
            raise ValidationError(f"lambda must be positive, got {lam}")
    return Resolved(s, A, tuple(gs), weights, hyp, ok, admissible, lam, cfg)


# --- outputs --------------------------------------------------------------------


def _finite(x):
    """JSON has no infinities; non-finite floats become null."""
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    return x


def write_solutions_csv(path, solutions, order: int):
    """One row per solution: ``u_1..u_T, residual, energy, kind``, floats in shortest repr."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"u_{k}" for k in range(1, order + 1)] + ["residual", "energy", "kind"])
        for s in solutions:
            w.writerow([repr(x) for x in s.u] + [repr(s.residual), repr(s.energy), s.kind])


def run_scenario(s: Scenario, out_dir=None, seed: Optional[int] = None, tol: Optional[float] = None):
    """Check hypotheses, solve, certify, and write ``report.json`` / ``solutions.csv``.

    Returns ``(exit_code, report)``.  Exit 2 means the hypotheses fail (no
    solve is attempted), exit 3 means fewer solutions than claimed or a
    failed re-certification.
    """
    r = resolve(s, seed, tol)
    report = {
        "scenario": s.to_dict(),
        "kind": s.kind,
        "hypothesis": r.hypothesis,
        "hypotheses_satisfied": r.satisfied,
        "admissible": list(r.admissible),
        "lambda": r.lam,
        "solve": asdict(r.cfg),
        "claims_met": False,
        "all_certified": False,
        "solutions": [],
        "warnings": [],
    }
    solutions = []
    if not r.satisfied:
        code = EXIT_HYPOTHESIS
    else:
        p = r.problem()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            mult = find_multiplicity(
                p, r.cfg, s.kind, delta=s.delta, admissible=r.admissible
            )
        solutions = list(mult.solutions)
        certified = all(residual(p, sol.u) <= r.cfg.tol_residual for sol in solutions)
        report.update(
            claims_met=mult.claims_met,
            all_certified=certified,
            solutions=[sol.to_dict() for sol in solutions],
            warnings=list(mult.warnings),
        )
        code = EXIT_OK if mult.claims_met and certified else EXIT_SHORTFALL
    report["exit_code"] = code
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(_finite(report), indent=2) + "\n")
        write_solutions_csv(out / "solutions.csv", solutions, r.matrix.order)
    return code, report


def recertify_report(report_path) -> list:
    """Recompute every stored solution's residual; returns ``(stored, recomputed)`` pairs."""
    report = json.loads(Path(report_path).read_text())
    s = Scenario.from_dict(report["scenario"])
    r = resolve(s)
    p = InclusionProblem(r.matrix, r.nonlinearities, report["lambda"], r.weights)
    return [(sol["residual"], certify(p, sol["u"]).residual) for sol in report["solutions"]]
