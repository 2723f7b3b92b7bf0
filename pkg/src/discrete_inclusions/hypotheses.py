"""Checks of the three-solution hypotheses and the admissible lambda ranges.

Everything is phrased through two scalars of the matrix: its smallest
eigenvalue ``lambda_1`` and ``1^T A 1`` (the sum of all entries).  With

    lhs = sum_k sup_{|x|<=gamma} G_k(x) / gamma**2
    rhs = lambda_1 / (1^T A 1) * sum_k G_k(delta) / delta**2

three solutions are guaranteed for every lambda in

    ( (1^T A 1)/2 * delta**2 / sum_k G_k(delta),
      lambda_1/2 * gamma**2 / sum_k sup G_k )

provided ``delta > sqrt(lambda_1 / 1^T A 1) * gamma``, ``lhs < rhs`` and
``limsup G_k(x)/x**2 < lambda_1/2`` for every k.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    DimensionMismatch,
    HypothesisNotSatisfied,
    InternalConsistencyError,
    InvalidSign,
    NonpositivePotential,
    UndeclaredAsymptotics,
)
from .matrix_zoo import (
    GridShape,
    SpdMatrix,
    build_fourth_order,
    build_grid_laplacian,
    build_tridiagonal,
    ones_quadratic,
    spectrum,
    tridiagonal_eigenvalue,
)
from .nonlinearity import (
    PiecewiseNonlinearity,
    WeightVector,
    asymptotic_linear_bound,
    asymptotic_quadratic_bound,
    _real_roots_in,
    _trim,
)

__all__ = [
    "HypothesisReport",
    "CorollaryReport",
    "check_g1",
    "check_g2",
    "lambda_interval",
    "check_h_conditions",
    "optimize_threshold",
    "minimize_delta_ratio",
    "sum_potential_exact",
    "specialize_tridiagonal",
    "specialize_fourth_order",
    "specialize_grid",
    "specialize_fourth_order_h",
    "weighted",
]

REL_SLACK = 1e-12
GRID_POINTS = 256
REFINE_ROUNDS = 2
SHRINK = 4.0


def _strictly_less(a, b):
    """``a < b`` with a relative float slack of 1e-12."""
    return a < b - REL_SLACK * max(abs(a), abs(b))


@dataclass(frozen=True)
class HypothesisReport:
    gamma: float
    delta: float
    lambda_1: float
    ones_quadratic: float
    delta_lower_bound: float
    g1_lhs: float
    g1_rhs: float
    g2_margin: Optional[float]
    lambda_interval: tuple
    satisfied: bool

    @property
    def interval_nonempty(self) -> bool:
        left, right = self.lambda_interval
        return _strictly_less(left, right)

    def to_dict(self):
        d = asdict(self)
        d["lambda_interval"] = list(self.lambda_interval)
        return d


@dataclass(frozen=True)
class CorollaryReport:
    delta: float
    threshold: float
    h1_ok: bool
    h2_ok: bool
    h3_ok: bool
    optimized_threshold: Optional[float] = None
    optimal_delta: Optional[float] = None

    @property
    def satisfied(self) -> bool:
        return self.h1_ok and self.h2_ok and self.h3_ok

    def to_dict(self):
        d = asdict(self)
        d["satisfied"] = self.satisfied
        return d


def weighted(h: PiecewiseNonlinearity, alpha: WeightVector) -> list:
    """The per-component nonlinearities ``alpha_k * h``."""
    return [h.scaled(a) for a in alpha.alpha]


def _check_inputs(A, gs, *positives):
    if len(gs) != A.order:
        raise DimensionMismatch(f"{len(gs)} nonlinearities for a matrix of order {A.order}")
    for name, x in positives:
        if not x > 0:
            raise InvalidSign(f"{name} must be positive, got {x}")


def sum_potential_exact(gs, delta) -> Fraction:
    """``sum_k G_k(delta)`` as an exact rational."""
    return sum((g.potential_exact(delta) for g in gs), Fraction(0))


def _sum_sup(gs, gamma) -> Fraction:
    # the maximizing candidate is found in floats, then G is re-evaluated exactly there
    return sum((_sup_exact(g, gamma) for g in gs), Fraction(0))


def _sup_exact(g, gamma):
    candidates = [-gamma, gamma] + [b for b in g.breakpoints if -gamma < b < gamma]
    for i, seg in enumerate(g.segments):
        lo, hi = g.segment_bounds(i)
        lo, hi = max(lo, -gamma), min(hi, gamma)
        if lo < hi:
            candidates.extend(_real_roots_in(seg, lo, hi))
    return max(g.potential_exact(x) for x in candidates)


def _endpoints(ones, lam1, sum_g_delta, sum_sup, gamma, delta):
    """Interval endpoints; rational inputs keep the left end correctly rounded."""
    F = Fraction
    left = float(F(ones) / 2 * F(delta) ** 2 / sum_g_delta) if sum_g_delta > 0 else math.inf
    right = float(F(lam1) / 2 * F(gamma) ** 2 / sum_sup) if sum_sup > 0 else math.inf
    return left, right


def check_g2(A: SpdMatrix, gs: Sequence[PiecewiseNonlinearity], lambda_1: Optional[float] = None) -> float:
    """``lambda_1/2 - max_k c_k`` over the declared bounds ``limsup G_k/x^2 <= c_k``."""
    if len(gs) != A.order:
        raise DimensionMismatch(f"{len(gs)} nonlinearities for a matrix of order {A.order}")
    lam1 = spectrum(A).lambda_min if lambda_1 is None else lambda_1
    return lam1 / 2.0 - max(asymptotic_quadratic_bound(g) for g in gs)


def check_g1(A: SpdMatrix, gs: Sequence[PiecewiseNonlinearity], gamma: float, delta: float) -> HypothesisReport:
    """Evaluate every quantity of the three-solution hypotheses for one (gamma, delta).

    Undeclared asymptotics leave ``g2_margin`` as ``None`` and the report
    unsatisfied.
    """
    _check_inputs(A, gs, ("gamma", gamma), ("delta", delta))
    lam1 = spectrum(A).lambda_min
    ones = ones_quadratic(A)
    ratio = lam1 / ones
    sum_sup = _sum_sup(gs, gamma)
    sum_g_delta = sum_potential_exact(gs, delta)
    lhs = float(sum_sup / Fraction(gamma) ** 2)
    rhs = float(Fraction(ratio) * sum_g_delta / Fraction(delta) ** 2)
    bound = math.sqrt(ratio) * gamma
    try:
        margin = check_g2(A, gs, lam1)
    except UndeclaredAsymptotics:
        margin = None
    satisfied = (
        _strictly_less(bound, delta)
        and _strictly_less(lhs, rhs)
        and margin is not None
        and margin > REL_SLACK * lam1
    )
    return HypothesisReport(
        gamma=float(gamma),
        delta=float(delta),
        lambda_1=lam1,
        ones_quadratic=ones,
        delta_lower_bound=bound,
        g1_lhs=lhs,
        g1_rhs=rhs,
        g2_margin=margin,
        lambda_interval=_endpoints(ones, lam1, sum_g_delta, sum_sup, gamma, delta),
        satisfied=bool(satisfied),
    )


def lambda_interval(A: SpdMatrix, gs: Sequence[PiecewiseNonlinearity], gamma: float, delta: float) -> tuple:
    """Open lambda interval with three guaranteed solutions; raises when the hypotheses fail."""
    report = check_g1(A, gs, gamma, delta)
    if not report.satisfied:
        raise HypothesisNotSatisfied(
            f"hypotheses fail for gamma={gamma}, delta={delta}: "
            f"lhs={report.g1_lhs:.6g}, rhs={report.g1_rhs:.6g}, "
            f"delta bound={report.delta_lower_bound:.6g}, g2 margin={report.g2_margin}"
        )
    return report.lambda_interval


# --- two-nontrivial-solution conditions ---------------------------------------------


def _positive_on(coeffs, lo, hi):
    """Whether a polynomial is > 0 throughout the open interval (lo, hi)."""
    c = _trim(coeffs)
    if not np.any(c):
        return False
    roots = sorted(
        r.real for r in (P.polyroots(c) if c.size > 1 else [])
        if abs(r.imag) <= 1e-10 * max(1.0, abs(r.real)) and lo < r.real < hi
    )
    if roots:
        return False
    return P.polyval((lo + hi) / 2.0, c) > 0


def _h1(h, delta):
    for lo, hi in ((-delta, 0.0), (0.0, delta)):
        for i, seg in enumerate(h.segments):
            a, b = h.segment_bounds(i)
            a, b = max(a, lo), min(b, hi)
            if a < b and not _positive_on(seg, a, b):
                return False
    return True


def _h2(h):
    # h(t) = o(t) at 0+ on the piece right of zero: no constant and no linear term
    seg = h.segments[h.segment_index(0.0)]
    return all(c == 0.0 for c in seg[:2])


def _ratio(h, d):
    H = h.potential_exact(d)
    return float(Fraction(d) ** 2 / H) if H > 0 else math.inf


def minimize_delta_ratio(h: PiecewiseNonlinearity, delta_range: tuple, points: int = GRID_POINTS) -> tuple:
    """Minimize ``delta**2 / H(delta)`` over a log grid with two local refinements.

    Breakpoints of ``h`` inside the range join the candidates, since kinks of
    the ratio sit there.  Returns ``(delta_star, ratio)``.
    """
    lo, hi = (float(x) for x in delta_range)
    if not (0 < lo < hi):
        raise InvalidSign(f"delta range must satisfy 0 < lo < hi, got {delta_range}")
    kinks = [b for b in h.breakpoints if lo <= b <= hi]
    best_d, best_r = None, math.inf
    a, b = math.log(lo), math.log(hi)
    for _ in range(REFINE_ROUNDS + 1):
        grid = np.exp(np.linspace(a, b, points))
        for d in list(grid) + kinks:
            r = _ratio(h, float(d))
            if r < best_r:
                best_d, best_r = float(d), r
        if best_d is None:
            break
        half = (b - a) / (2.0 * SHRINK)
        c = math.log(best_d)
        a, b = max(math.log(lo), c - half), min(math.log(hi), c + half)
    if best_d is None:
        raise NonpositivePotential(f"H(delta) <= 0 on the whole range {delta_range}")
    return best_d, best_r


def _prefactor(A, alpha):
    return ones_quadratic(A) / 2.0 / alpha.total


def optimize_threshold(h: PiecewiseNonlinearity, alpha: WeightVector, A: SpdMatrix, delta_range: tuple) -> float:
    """Smallest lambda threshold over delta: prefactor times ``min delta**2 / H(delta)``."""
    d_star, _ = minimize_delta_ratio(h, delta_range)
    return float(_exact_prefactor(A, alpha) * Fraction(d_star) ** 2 / h.potential_exact(d_star))


def _exact_prefactor(A, alpha):
    return Fraction(ones_quadratic(A)) / 2 / sum((Fraction(a) for a in alpha.alpha), Fraction(0))


def check_h_conditions(
    h: PiecewiseNonlinearity,
    alpha: WeightVector,
    A: SpdMatrix,
    delta: float,
    delta_range: Optional[tuple] = None,
) -> CorollaryReport:
    """Conditions for two nontrivial solutions of ``Au in lam alpha_k [h-, h+]``.

    The threshold is ``(1^T A 1 / 2) / sum(alpha) * delta**2 / H(delta)``.
    ``delta_range`` defaults to ``(delta/1000, 1000 delta)`` for the
    optimized threshold.
    """
    if not delta > 0:
        raise InvalidSign(f"delta must be positive, got {delta}")
    if len(alpha) != A.order:
        raise DimensionMismatch(f"{len(alpha)} weights for a matrix of order {A.order}")
    H = h.potential_exact(delta)
    if not H > 0:
        raise NonpositivePotential(f"H({delta}) = {H} is not positive")
    lam1 = spectrum(A).lambda_min
    d = asymptotic_linear_bound(h)
    h3 = _strictly_less(d, lam1 / alpha.total)
    threshold = float(_exact_prefactor(A, alpha) * Fraction(delta) ** 2 / H)
    if delta_range is None:
        delta_range = (delta / 1000.0, delta * 1000.0)
    d_star, _ = minimize_delta_ratio(h, delta_range)
    optimized = float(_exact_prefactor(A, alpha) * Fraction(d_star) ** 2 / h.potential_exact(d_star))
    return CorollaryReport(
        delta=float(delta),
        threshold=threshold,
        h1_ok=_h1(h, delta),
        h2_ok=_h2(h),
        h3_ok=bool(h3),
        optimized_threshold=optimized,
        optimal_delta=d_star,
    )


# --- the structured matrices -----------------------------------------------------------


def _agree(name, generic, closed, tol=1e-12):
    if abs(generic - closed) > tol * max(1.0, abs(closed)):
        raise InternalConsistencyError(f"{name}: generic value {generic!r} != closed form {closed!r}")


def specialize_tridiagonal(T, a, b, gs, gamma, delta) -> HypothesisReport:
    A = build_tridiagonal(T, a, b)
    report = check_g1(A, gs, gamma, delta)
    _agree("lambda_1", report.lambda_1, tridiagonal_eigenvalue(1, T, a, b))
    _agree("1^T A 1", report.ones_quadratic, b * T + 2 * a * (T - 1))
    closed_bound = math.sqrt((b + 2 * a * math.cos(math.pi / (T + 1))) / (b * T + 2 * a * (T - 1))) * gamma
    _agree("delta lower bound", report.delta_lower_bound, closed_bound)
    return report


def specialize_fourth_order(T, gs, gamma, delta) -> HypothesisReport:
    A = build_fourth_order(T)
    report = check_g1(A, gs, gamma, delta)
    if T >= 2:
        _agree("1^T A 1", report.ones_quadratic, 4.0)
        _agree("delta lower bound", report.delta_lower_bound, math.sqrt(report.lambda_1) / 2.0 * gamma)
        sum_g = float(sum_potential_exact(gs, delta))
        if sum_g > 0:
            _agree("left endpoint", report.lambda_interval[0], 2.0 * delta**2 / sum_g)
    return report


def specialize_grid(shape: GridShape, gs, gamma, delta) -> HypothesisReport:
    A = build_grid_laplacian(shape)
    report = check_g1(A, gs, gamma, delta)
    m_plus_n = shape.m + shape.n
    _agree("1^T B 1", report.ones_quadratic, 2.0 * m_plus_n)
    _agree("delta lower bound", report.delta_lower_bound, math.sqrt(report.lambda_1 / (2.0 * m_plus_n)) * gamma)
    sum_g = float(sum_potential_exact(gs, delta))
    if sum_g > 0:
        _agree("left endpoint", report.lambda_interval[0], m_plus_n * delta**2 / sum_g)
    return report


def specialize_fourth_order_h(T: int, h: PiecewiseNonlinearity, delta: float, delta_range: Optional[tuple] = None) -> CorollaryReport:
    """Two nontrivial solutions of the fourth-order inclusion; threshold ``2/T * min delta^2/H``."""
    A = build_fourth_order(T)
    report = check_h_conditions(h, WeightVector.ones(T), A, delta, delta_range)
    if T >= 2:
        _agree("prefactor", _prefactor(A, WeightVector.ones(T)), 2.0 / T)
    return report
