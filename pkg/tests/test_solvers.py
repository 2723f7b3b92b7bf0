import numpy as np
import pytest

from discrete_inclusions import (
    AsymptoticBound,
    DidNotConverge,
    InclusionProblem,
    PathCollapse,
    SolveConfig,
    SpdMatrix,
    TooLarge,
    brute_force_oracle,
    build_fourth_order,
    build_second_order,
    constant,
    find_multiplicity,
    minimize_from,
    mountain_pass,
    multistart,
    polish,
    residual,
    shared,
    step,
)
from discrete_inclusions.solvers import distinct, start_box_radius


def _values(solutions):
    return sorted(round(float(x), 9) for s in solutions for x in s.u)


def _match(a, b, tol=1e-4):
    """Bijection between two solution lists under the sup-norm tolerance."""
    if len(a) != len(b):
        return False
    used = set()
    for s in a:
        hits = [i for i, t in enumerate(b) if i not in used and np.max(np.abs(s.vector - t.vector)) < tol]
        if not hits:
            return False
        used.add(hits[0])
    return True


# --- configuration -----------------------------------------------------------------


@pytest.mark.parametrize(
    "kw", [{"tol_residual": 0.0}, {"starts": 0}, {"path_nodes": 4}, {"path_nodes": 1}, {"seed": -1}, {"workers": 0}]
)
def test_solve_config_validation(kw):
    with pytest.raises(ValueError):
        SolveConfig(**kw)


# --- minimize_from -----------------------------------------------------------------


def test_minimize_from_zero_stays(scalar_problem):
    s = minimize_from(scalar_problem, [0.0])
    assert s.u == (0.0,) and s.kind == "trivial" and s.residual == 0.0


def test_minimize_from_below_the_saddle_goes_to_zero(scalar_problem):
    # 0.5 is a local maximum of J on the line, so descent from 0.4 falls to 0
    s = minimize_from(scalar_problem, [0.4])
    assert abs(s.u[0]) < 1e-8 and s.residual <= 1e-10


@pytest.mark.parametrize("start", [0.6, 0.9, 1.0])
def test_minimize_from_above_the_saddle_reaches_the_kink(scalar_problem, start):
    s = minimize_from(scalar_problem, [start])
    assert s.u == (1.0,) and s.residual <= 1e-10 and s.kind == "local_min"


@pytest.mark.parametrize("start", [0.1, 0.5, 0.9])
def test_small_lambda_has_only_trivial_solution(h, start):
    p = InclusionProblem(SpdMatrix([[2.0]]), [h], 1.0)
    s = minimize_from(p, [start])
    assert abs(s.u[0]) < 1e-8


def test_descent_is_monotone(h, rng):
    p = InclusionProblem(build_fourth_order(6), shared(h, 6), 3.0)
    for _ in range(5):
        hist = []
        minimize_from(p, rng.uniform(-2, 2, 6), history=hist)
        assert all(b <= a for a, b in zip(hist, hist[1:]))


def test_iteration_cap_reports_best_point(scalar_problem):
    with pytest.raises(DidNotConverge) as exc:
        minimize_from(scalar_problem, [0.3], SolveConfig(max_iters=1))
    assert exc.value.best is not None and exc.value.best.residual > 1e-8


def test_descent_lands_exactly_on_kinks(h):
    # the minimizer has u_2 = u_8 = 1 sitting on the jump of h
    p = InclusionProblem(build_fourth_order(9), shared(h, 9), 4 / 3)
    s = minimize_from(p, np.ones(9))
    assert s.residual <= 1e-12 and s.u[1] == 1.0 and s.u[7] == 1.0
    assert s.energy < -2.9


def test_polish_reduces_residual(scalar_problem):
    v = polish(scalar_problem, [0.52])
    assert residual(scalar_problem, v) <= 1e-14 and v[0] == pytest.approx(0.5)
    w = polish(scalar_problem, [1.0 + 1e-9])
    assert w[0] == 1.0 and residual(scalar_problem, w) == 0.0


# --- multistart -------------------------------------------------------------------


def test_multistart_scalar_finds_both_minima(scalar_problem):
    r = multistart(scalar_problem, SolveConfig(), delta=1.0)
    assert _values(r.solutions) == [0.0, 1.0]


def test_multistart_small_lambda(h):
    r = multistart(InclusionProblem(SpdMatrix([[2.0]]), [h], 1.0))
    assert _values(r.solutions) == [0.0]


def test_multistart_zero_nonlinearity():
    p = InclusionProblem(build_second_order(3), shared(constant(0.0), 3), 1.0)
    r = multistart(p)
    assert len(r.solutions) == 1 and r.solutions[0].kind == "trivial"


def test_multistart_is_deterministic_across_workers(h):
    p = InclusionProblem(build_second_order(4), shared(h, 4), 3.0)
    one = multistart(p, SolveConfig(seed=7, starts=24), delta=1.0)
    four = multistart(p, SolveConfig(seed=7, starts=24, workers=4), delta=1.0)
    assert one == four


def test_start_box_radius(scalar_problem):
    # M = sup_{|x|<=1} G = 1/3, lambda_1 = 2: sqrt(2 * 1 * (4/3) / 2) < 1
    assert start_box_radius(scalar_problem, 1.0) == 2.0


def test_distinct_keeps_lowest_residual(scalar_problem):
    from discrete_inclusions import CertifiedSolution

    a = CertifiedSolution((1.0,), 0.0, -1 / 3)
    b = CertifiedSolution((1.0 + 1e-6,), 1e-9, -1 / 3)
    c = CertifiedSolution((0.5,), 0.0, 1 / 12)
    kept = distinct([b, a, c], 1e-4)
    assert a in kept and b not in kept and c in kept


# --- mountain pass ----------------------------------------------------------------


def test_mountain_pass_scalar_saddle(scalar_problem):
    s = mountain_pass(scalar_problem, [0.0], [1.0])
    assert s.u[0] == pytest.approx(0.5, abs=1e-12)
    assert s.kind == "saddle_candidate" and s.residual <= 1e-10
    assert s.energy == pytest.approx(0.25 - 4 * 0.125 / 3, rel=1e-12)


def test_mountain_pass_equal_endpoints(scalar_problem):
    with pytest.raises(ValueError):
        mountain_pass(scalar_problem, [1.0], [1.0])


def test_mountain_pass_flat_problem_collapses():
    p = InclusionProblem(build_second_order(2), shared(constant(0.0), 2), 1.0)
    with pytest.raises(PathCollapse):
        mountain_pass(p, [0.0, 0.0], [1.0, 1.0])


def test_mountain_pass_resolves_narrow_barrier(h):
    # at large lambda the saddle sits much closer to 0 than one node spacing
    p = InclusionProblem(build_fourth_order(4), shared(h, 4), 47.0)
    far = minimize_from(p, np.ones(4))
    s = mountain_pass(p, np.zeros(4), far.vector)
    assert s.residual <= 1e-8 and 0 < s.sup_norm < 0.1


# --- orchestration ----------------------------------------------------------------


def test_find_multiplicity_scalar(scalar_problem):
    r = find_multiplicity(scalar_problem, SolveConfig(), "theorem31", delta=1.0)
    assert r.claims_met and _values(r.solutions) == [0.0, 0.5, 1.0]
    routes = {round(s.u[0], 6): s.route for s in r.solutions}
    assert routes[0.5] == "mountain_pass"


def test_find_multiplicity_second_order_two_nontrivial(h):
    p = InclusionProblem(build_second_order(5), shared(h, 5), 2.0)
    r = find_multiplicity(p, SolveConfig(), "corollary32", delta=1.0, admissible=(0.6, np.inf))
    assert r.claims_met and len(r.nontrivial) >= 2
    for s in r.solutions:
        assert residual(p, s.u) <= 1e-8
    for i, a in enumerate(r.solutions):
        for b in r.solutions[i + 1:]:
            assert np.max(np.abs(a.vector - b.vector)) >= 1e-4


def test_find_multiplicity_below_threshold_warns(h):
    p = InclusionProblem(SpdMatrix([[2.0]]), [h], 0.1)
    with pytest.warns(UserWarning):
        r = find_multiplicity(p, SolveConfig(), "theorem31", admissible=(3.0, 300.0))
    assert not r.claims_met and _values(r.solutions) == [0.0]
    assert r.warnings


def test_find_multiplicity_rejects_unknown_kind(scalar_problem):
    with pytest.raises(ValueError):
        find_multiplicity(scalar_problem, SolveConfig(), "theorem99")


def test_report_to_dict(scalar_problem):
    d = find_multiplicity(scalar_problem, SolveConfig(), "theorem31").to_dict()
    assert d["claims_met"] is True and len(d["solutions"]) == 3


# --- oracle -----------------------------------------------------------------------


def test_oracle_scalar(scalar_problem):
    sols = brute_force_oracle(scalar_problem, 2.0, 4001)
    assert _values(sols) == [0.0, 0.5, 1.0]
    assert all(s.residual <= 1e-10 for s in sols)


def test_oracle_zero_nonlinearity():
    p = InclusionProblem(build_second_order(2), shared(constant(0.0), 2), 3.0)
    sols = brute_force_oracle(p, 2.0, 101)
    assert len(sols) == 1 and sols[0].kind == "trivial"


def test_oracle_refuses_large_orders(h):
    p = InclusionProblem(build_second_order(4), shared(h, 4), 1.0)
    with pytest.raises(TooLarge):
        brute_force_oracle(p, 1.0, 5)


@pytest.mark.parametrize("lam", [2.0, 8.0, 20.0])
def test_oracle_solution_set_is_swap_symmetric(h, lam):
    p = InclusionProblem(build_second_order(2), shared(h, 2), lam)
    sols = brute_force_oracle(p, 3.0, 301)
    swapped = [type(s)(tuple(reversed(s.u)), s.residual, s.energy) for s in sols]
    assert _match(sols, swapped)


def test_oracle_with_discontinuous_steps():
    # 2u in lam * step: solutions are u = 0 (0 in [0, lam] at the jump) and u = lam/2
    g = step(0.0, 0.0, 1.0, AsymptoticBound(c=0.0))
    p = InclusionProblem(SpdMatrix([[2.0]]), [g], 3.0)
    assert _values(brute_force_oracle(p, 4.0, 801)) == [0.0, 1.5]


@pytest.mark.parametrize("lam", [1.0, 3.0, 4.0, 8.0])
def test_solver_agrees_with_oracle_scalar(h, lam):
    p = InclusionProblem(SpdMatrix([[2.0]]), [h], lam)
    found = find_multiplicity(p, SolveConfig(), "theorem31", delta=1.0).solutions
    assert _match(list(found), brute_force_oracle(p, 3.0, 6001))


@pytest.mark.parametrize("lam", [0.5, 2.0, 3.0, 8.0])
def test_solver_agrees_with_oracle_pair(h, lam):
    p = InclusionProblem(build_second_order(2), shared(h, 2), lam)
    found = find_multiplicity(p, SolveConfig(), "theorem31", delta=1.0).solutions
    assert _match(list(found), brute_force_oracle(p, 3.0, 301))


def test_symmetric_problem_has_symmetric_solution_set(h):
    p = InclusionProblem(build_second_order(3), shared(h, 3), 6.0)
    sols = find_multiplicity(p, SolveConfig(), "theorem31", delta=1.0).solutions
    mirrored = [type(s)(tuple(reversed(s.u)), s.residual, s.energy) for s in sols]
    assert _match(list(sols), mirrored)
