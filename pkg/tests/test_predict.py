import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsparsity.predict import (
    ConcentrationInterval,
    alpha_dependence,
    alpha_hat_sparse,
    alpha_p,
    concentration_interval,
    predict,
    regime_reference,
    sparsity_dependence_gap,
)
from tsparsity.rates import DomainError, RateParams

HALF = RateParams(0.5)


def alpha_hat_oracle(n, t, p):
    """The location formula evaluated term by term at 50 digits."""
    with mpmath.workdps(50):
        p, t, n = mpmath.mpf(p), mpmath.mpf(t), mpmath.mpf(n)
        b = 1 / (1 - p)
        lb = lambda x: mpmath.log(x) / mpmath.log(b)
        tlogt = 0 if t == 0 else t * lb(t)
        e = mpmath.e
        val = 2 * lb(n) + (t - 2) * lb(lb(n * p)) - tlogt + t * lb(2 * b * p * e) + 2 * lb(e / 2) + 1
        return float(val)


def test_alpha_hat_examples():
    assert alpha_hat_sparse(10**4, 0, HALF) == pytest.approx(21.2227, abs=1e-3)
    assert alpha_hat_sparse(10**4, 1, HALF) == pytest.approx(27.2845, abs=1e-3)


@pytest.mark.parametrize("n,t,p", [(10**4, 0, 0.5), (10**4, 1, 0.5), (100, 0, 0.5), (80, 1, 0.5),
                                   (10**6, 2.5, 0.1), (10**3, Fraction(1, 3), 0.7)])
def test_alpha_hat_against_high_precision(n, t, p):
    assert alpha_hat_sparse(n, t, RateParams(p)) == pytest.approx(alpha_hat_oracle(n, float(t), p), abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(50, 10**9), st.floats(0.05, 0.9))
def test_zero_sparsity_is_classical_independence_location(n, p):
    P = RateParams(p)
    if P.log_b(n * p) <= 1.01:
        return
    assert alpha_hat_sparse(n, 0, P) == pytest.approx(alpha_p(n, P), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(100, 10**9), st.floats(0.05, 0.9), st.floats(0.01, 10))
def test_shift_identity(n, p, t):
    P = RateParams(p)
    if P.log_b(n * p) <= 1.01:
        return
    lhs = alpha_hat_sparse(n, t, P)
    rhs = alpha_hat_sparse(n, 0, P) + t * P.log_b(2 * P.b * p * math.e / t * P.log_b(n * p))
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_alpha_dependence_examples():
    assert alpha_dependence(10**4, 0, HALF) == pytest.approx(alpha_hat_sparse(10**4, 0, HALF), abs=1e-12)
    assert alpha_dependence(10**4, 1, HALF) == pytest.approx(24.3990, abs=1e-3)


def test_gap_at_one():
    gap = alpha_hat_sparse(10**4, 1, HALF) - alpha_dependence(10**4, 1, HALF)
    assert gap == pytest.approx(2 * math.log2(math.e), abs=1e-4)
    assert gap == pytest.approx(2.88539, abs=1e-4)


@pytest.mark.parametrize("t", range(0, 12))
@pytest.mark.parametrize("p", [0.1, 0.5, 0.8])
def test_gap_identity(t, p):
    P = RateParams(p)
    gap = alpha_hat_sparse(10**5, t, P) - alpha_dependence(10**5, t, P)
    want = 2 * P.log_b(math.factorial(t) * math.e**t / (t**t if t else 1))
    assert gap == pytest.approx(want, abs=1e-9)
    assert sparsity_dependence_gap(t, P) == pytest.approx(want, abs=1e-9)


@pytest.mark.parametrize("p", [0.2, 0.5])
def test_gap_stirling_trend(p):
    P = RateParams(p)
    diffs = [abs(sparsity_dependence_gap(t, P) - P.log_b(2 * math.pi * t)) for t in (10, 100, 1000)]
    assert diffs[0] > diffs[1] > diffs[2]
    assert diffs[2] < 1e-3


def test_alpha_dependence_rejects_fractional_t():
    with pytest.raises(DomainError):
        alpha_dependence(10**4, 1.5, HALF)


@pytest.mark.parametrize("n,p", [(10**4, 0.5), (10**6, 0.1), (500, 0.3)])
def test_alpha_hat_nondecreasing_in_t(n, p):
    P = RateParams(p)
    L = math.log(n * p)
    top = L / math.log(L)
    vals = [alpha_hat_sparse(n, top * i / 100, P) for i in range(101)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("n,p", [(4, 0.5), (2, 0.5), (10, 0.01)])
def test_prediction_outside_validity(n, p):
    with pytest.raises(DomainError, match="outside formula validity"):
        alpha_hat_sparse(n, 0, RateParams(p))


def test_negative_t_rejected():
    with pytest.raises(DomainError):
        alpha_hat_sparse(10**4, -1, HALF)


def test_interval_examples():
    iv = concentration_interval(10**4, 0, HALF, 0.3)
    assert (iv.k_minus, iv.k_plus) == (20, 21)
    iv = concentration_interval(10**4, 1, HALF, 0.3)
    assert (iv.k_minus, iv.k_plus) == (26, 27)
    # both floors coincide once the window does not straddle an integer
    iv = concentration_interval(10**4, 0, HALF, 0.1)
    assert iv.k_minus == iv.k_plus == 21
    assert iv.width == 0


@settings(max_examples=100, deadline=None)
@given(st.integers(50, 10**8), st.floats(0.05, 0.9), st.floats(0, 6), st.floats(0.01, 3))
def test_interval_invariants(n, p, t, delta):
    P = RateParams(p)
    if P.log_b(n * p) <= 1.01:
        return
    iv = concentration_interval(n, t, P, delta)
    assert iv.k_minus <= iv.k_plus <= iv.k_plus_ceil
    assert iv.k_plus - iv.k_minus <= math.ceil(2 * delta) + 1


def test_interval_contains_with_widening():
    iv = ConcentrationInterval(20, 21, 22)
    assert iv.contains(20) and iv.contains(21) and not iv.contains(22)
    assert iv.contains(19, widen=1) and iv.contains(22, widen=1)


def test_predict_requires_positive_delta():
    with pytest.raises(DomainError):
        predict(10**4, 0, HALF, 0)


def test_prediction_record_is_flat():
    rec = predict(10**4, Fraction(1, 2), HALF, 0.3).as_record()
    assert list(rec) == ["n", "p", "t", "delta", "alpha_hat", "k_minus", "k_plus"]
    assert rec["t"] == "1/2"


def test_regime_reference():
    small, large = regime_reference(10**4, 0, HALF)
    assert small == pytest.approx(2 * math.log2(5000), abs=1e-12)
    assert small == pytest.approx(24.575, abs=1e-3)
    assert large == 0
    s2, l2 = regime_reference(10**4, 3, HALF)
    s4, l4 = regime_reference(10**4, 6, HALF)
    assert s2 == s4 == small
    assert l4 == 2 * l2


def test_regime_reference_needs_np_above_one():
    with pytest.raises(DomainError):
        regime_reference(2, 0, RateParams(0.4))
