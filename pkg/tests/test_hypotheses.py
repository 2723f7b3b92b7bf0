import math

import numpy as np
import pytest

from discrete_inclusions import (
    AsymptoticBound,
    DimensionMismatch,
    GridShape,
    HypothesisNotSatisfied,
    InternalConsistencyError,
    NonpositivePotential,
    PiecewiseNonlinearity,
    UndeclaredAsymptotics,
    WeightVector,
    build_second_order,
    check_g1,
    check_g2,
    check_h_conditions,
    constant,
    lambda_interval,
    linear,
    minimize_delta_ratio,
    optimize_threshold,
    shared,
    specialize_fourth_order,
    specialize_grid,
    specialize_fourth_order_h,
    specialize_tridiagonal,
)
from discrete_inclusions import hypotheses

LAM1_T5 = 2 - math.sqrt(3)


@pytest.fixture
def A5():
    return build_second_order(5)


def test_check_g1_satisfied_small_gamma(A5, h):
    r = check_g1(A5, shared(h, 5), 0.01, 1.0)
    assert r.satisfied
    assert r.g1_lhs == pytest.approx(5 * 0.01 / 3, rel=1e-12)
    assert r.g1_rhs == pytest.approx(LAM1_T5 / 2 * 5 / 3, rel=1e-12)
    assert r.delta_lower_bound == pytest.approx(math.sqrt(LAM1_T5 / 2) * 0.01, rel=1e-12)


def test_check_g1_fails_for_equal_constants(A5, h):
    r = check_g1(A5, shared(h, 5), 1.0, 1.0)
    assert r.delta_lower_bound == pytest.approx(math.sqrt(LAM1_T5 / 2), rel=1e-12)
    assert r.delta_lower_bound < 1.0
    assert r.g1_lhs >= r.g1_rhs
    assert not r.satisfied


def test_check_g1_zero_nonlinearity(A5):
    r = check_g1(A5, shared(constant(0.0, AsymptoticBound(c=0.0)), 5), 0.01, 1.0)
    assert r.g1_rhs == 0.0 and not r.satisfied


def test_check_g1_dimension_mismatch(A5, h):
    with pytest.raises(DimensionMismatch):
        check_g1(A5, shared(h, 4), 0.01, 1.0)


def test_check_g1_without_declaration_is_unsatisfied(A5):
    g = PiecewiseNonlinearity((-1.0, 1.0), ((0.0,), (0.0, 0.0, 1.0), (0.0,)))
    r = check_g1(A5, shared(g, 5), 0.01, 1.0)
    assert r.g2_margin is None and not r.satisfied


def test_check_g2_examples(A5, h):
    assert check_g2(A5, shared(h, 5)) == pytest.approx(LAM1_T5 / 2, rel=1e-12)
    from discrete_inclusions import SpdMatrix

    assert check_g2(SpdMatrix(np.eye(2)), shared(linear(1.0, AsymptoticBound(c=0.5)), 2)) == 0.0
    zero = constant(0.0, AsymptoticBound(c=0.0))
    assert check_g2(A5, shared(zero, 5)) == pytest.approx(LAM1_T5 / 2)
    with pytest.raises(UndeclaredAsymptotics):
        check_g2(A5, shared(linear(1.0), 5))


def test_lambda_interval_second_order(A5, h):
    left, right = lambda_interval(A5, shared(h, 5), 0.01, 1.0)
    assert left == 0.6
    assert right == pytest.approx(LAM1_T5 / 2 * 3 / (5 * 0.01), rel=1e-12)
    with pytest.raises(HypothesisNotSatisfied):
        lambda_interval(A5, shared(h, 5), 1.0, 1.0)


def test_lambda_interval_grid(h):
    r = specialize_grid(GridShape(2, 2), shared(h, 4), 0.01, 1.0)
    assert r.lambda_interval[0] == 3.0
    assert r.ones_quadratic == 8.0


def test_grid_three_by_two_left_endpoint(h):
    r = specialize_grid(GridShape(3, 2), shared(h, 6), 0.01, 0.8)
    assert r.lambda_interval[0] == pytest.approx(5 * 0.8**2 / (6 * 0.8**3 / 3), rel=1e-14)


def test_specialize_tridiagonal_closed_forms(h):
    r = specialize_tridiagonal(5, -1.0, 2.0, shared(h, 5), 0.01, 1.0)
    assert r.lambda_1 == pytest.approx(LAM1_T5, rel=1e-12)
    assert r.ones_quadratic == 2.0
    assert specialize_tridiagonal(2, -1.0, 2.0, shared(h, 2), 0.01, 1.0).ones_quadratic == 2.0


def test_specialize_fourth_order(h):
    for T in (2, 4, 9):
        r = specialize_fourth_order(T, shared(h, T), 0.0001, 1.0)
        assert r.ones_quadratic == 4.0
        assert r.lambda_interval[0] == pytest.approx(2.0 / (T / 3), rel=1e-15)


def test_consistency_guard_fires():
    with pytest.raises(InternalConsistencyError):
        hypotheses._agree("x", 1.0, 1.0 + 1e-9)


def test_check_h_conditions_example(A5, h):
    c = check_h_conditions(h, WeightVector.ones(5), A5, 1.0)
    assert c.threshold == 0.6
    assert c.h1_ok and c.h2_ok and c.h3_ok and c.satisfied


def test_corollary_threshold_equals_left_endpoint(A5, h):
    for delta in (0.3, 0.7, 1.0):
        c = check_h_conditions(h, WeightVector.ones(5), A5, delta)
        left = check_g1(A5, shared(h, 5), 0.001, delta).lambda_interval[0]
        assert c.threshold == pytest.approx(left, rel=1e-15)


def test_h2_fails_for_absolute_value(A5):
    absval = PiecewiseNonlinearity((0.0,), ((0.0, -1.0), (0.0, 1.0)), AsymptoticBound(c=0.5, linear=1.0))
    c = check_h_conditions(absval, WeightVector.ones(5), A5, 1.0)
    assert c.h1_ok and not c.h2_ok


def test_h1_fails_when_h_vanishes_somewhere(A5):
    g = PiecewiseNonlinearity((0.5,), ((0.0, 0.0, 1.0), (0.0,)), AsymptoticBound(c=0.0, linear=0.0))
    assert not check_h_conditions(g, WeightVector.ones(5), A5, 1.0).h1_ok
    assert check_h_conditions(g, WeightVector.ones(5), A5, 0.5).h1_ok


def test_h3_uses_weight_total(A5):
    # linear growth 0.05 against lambda_1 / sum(alpha)
    g = PiecewiseNonlinearity((1.0,), ((0.0, 0.0, 1.0), (0.95, 0.05)), AsymptoticBound(c=0.025, linear=0.05))
    assert check_h_conditions(g, WeightVector.ones(5), A5, 1.0).h3_ok == (0.05 < LAM1_T5 / 5)
    assert check_h_conditions(g, WeightVector((0.1,) * 5), A5, 1.0).h3_ok


def test_zero_h_is_nonpositive(A5):
    with pytest.raises(NonpositivePotential):
        check_h_conditions(constant(0.0, AsymptoticBound(c=0.0, linear=0.0)), WeightVector.ones(5), A5, 1.0)
    with pytest.raises(NonpositivePotential):
        minimize_delta_ratio(constant(0.0), (0.1, 2.0))


def test_optimize_threshold_truncated_square(A5, h):
    d, ratio = minimize_delta_ratio(h, (1e-3, 2.0))
    assert d == 1.0 and ratio == 3.0
    assert optimize_threshold(h, WeightVector.ones(5), A5, (1e-3, 2.0)) == 0.6


def test_optimize_threshold_linear_is_flat(A5):
    g = linear(1.0)
    d, ratio = minimize_delta_ratio(g, (0.1, 10.0))
    assert ratio == pytest.approx(2.0, rel=1e-14)


def test_fourth_order_h_threshold(h):
    r = specialize_fourth_order_h(9, h, 1.0)
    assert r.threshold == pytest.approx(2 / 9 * 3, rel=1e-15)
    assert r.optimized_threshold == pytest.approx(2 / 3, rel=1e-15)


def test_scaling_nonlinearity_rescales_interval(A5, h, rng):
    for _ in range(20):
        gamma, delta = rng.uniform(0.001, 0.1), rng.uniform(0.2, 1.0)
        base = check_g1(A5, shared(h, 5), gamma, delta).lambda_interval
        for c in (0.5, 2.0, 10.0):
            scaled = check_g1(A5, shared(h.scaled(c), 5), gamma, delta).lambda_interval
            assert scaled[0] == pytest.approx(base[0] / c, rel=1e-12)
            assert scaled[1] == pytest.approx(base[1] / c, rel=1e-12)


def test_report_serializes(A5, h):
    d = check_g1(A5, shared(h, 5), 0.01, 1.0).to_dict()
    assert d["satisfied"] is True and d["lambda_interval"][0] == 0.6
    c = check_h_conditions(h, WeightVector.ones(5), A5, 1.0).to_dict()
    assert c["satisfied"] is True
