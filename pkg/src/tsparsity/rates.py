"""Binomial large-deviation machinery.

Everything here works in natural-log space.  ``lambda_star`` is the
Bernoulli(p) rate function; the binomial lower tail is computed exactly
(``binom_cdf_log``) and bracketed by the Chernoff-type sandwich
(``binom_tail_bounds``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

INF = math.inf

# Stop summing tail terms once the remaining geometric tail is below this
# fraction of the running sum.
_TAIL_EPS = 1e-18

PSI_TOL = 1e-12
PSI_MAX_ITER = 200

# Additive constant c0 in the lower mode of ``sparse_prob``; certified on a
# (k, p, t) grid by the test suite.
DEFAULT_C0 = 0.1

# Constant for the lower side of ``binom_tail_bounds``; the smallest ratio
# seen on the certification grid is exp(-1) (at r = 1).
DEFAULT_LOWER_CONSTANT = 0.25


class DomainError(ValueError):
    """A documented precondition of a formula or bound is violated."""


def as_rational(value) -> Fraction:
    """Exact rational image of ``value``; floats are read by their shortest repr."""
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class RateParams:
    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"p must lie in (0, 1), got {self.p!r}")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def b(self) -> float:
        return 1.0 / (1.0 - self.p)

    @property
    def ln_b(self) -> float:
        return -math.log1p(-self.p)

    def log_b(self, x: float) -> float:
        """Logarithm to base ``b = 1/(1-p)``."""
        return math.log(x) / self.ln_b


def lambda_star(x: float, params: RateParams) -> float:
    """Rate function ``x ln(x/p) + (1-x) ln((1-x)/q)`` on [0, 1], +inf elsewhere."""
    p = params.p
    if x < 0.0 or x > 1.0 or math.isnan(x):
        return INF
    if x == 0.0:
        return params.ln_b
    if x == 1.0:
        return -math.log(p)
    if x == p:
        return 0.0
    val = x * math.log(x / p) + (1.0 - x) * (math.log1p(-x) - math.log1p(-p))
    # rounding can push values near the minimum a hair below zero
    return max(val, 0.0)


@dataclass(frozen=True)
class TailQuery:
    """A lower-tail question ``Pr(Bin(trials, p) <= threshold)``."""

    trials: int
    threshold: float
    params: RateParams

    def log_cdf(self) -> float:
        return binom_cdf_log(self.trials, self.threshold, self.params)

    def bounds(self, lower_constant: float) -> tuple[float, float]:
        return binom_tail_bounds(self.trials, self.threshold, self.params, lower_constant)


def _log_pmf(trials: int, j: int, params: RateParams) -> float:
    # high precision so the anchor does not inherit lgamma cancellation
    with mpmath.workdps(40):
        val = (
            mpmath.loggamma(trials + 1)
            - mpmath.loggamma(j + 1)
            - mpmath.loggamma(trials - j + 1)
            + j * mpmath.log(mpmath.mpf(params.p))
            + (trials - j) * mpmath.log1p(-mpmath.mpf(params.p))
        )
        return float(val)


def binom_cdf_log(trials: int, threshold: float, params: RateParams) -> float:
    """``ln Pr(Bin(trials, p) <= floor(threshold))``.

    The largest term of the truncated sum is evaluated in extended precision;
    neighbours follow from exact pmf ratios, summed relative to that anchor.
    """
    if threshold < 0:
        return -INF
    if trials == 0:
        return 0.0
    top = math.floor(threshold)
    if top >= trials:
        return 0.0

    p, q = params.p, params.q
    mode = math.floor((trials + 1) * p)
    anchor = min(top, mode)
    total = 1.0

    # downward from the anchor: ratios shrink, so the tail is geometric
    term = 1.0
    down = q / p
    for j in range(anchor, 0, -1):
        ratio = j / (trials - j + 1) * down
        term *= ratio
        total += term
        if ratio < 1.0 and term / (1.0 - ratio) < _TAIL_EPS * total:
            break

    # upward from the mode to the threshold, when the threshold lies past it
    term = 1.0
    up = p / q
    for j in range(anchor, top):
        ratio = (trials - j) / (j + 1) * up
        term *= ratio
        total += term
        if ratio < 1.0 and term / (1.0 - ratio) < _TAIL_EPS * total:
            break

    return min(_log_pmf(trials, anchor, params) + math.log(total), 0.0)


def binom_tail_bounds(
    trials: int, threshold: float, params: RateParams, lower_constant: float
) -> tuple[float, float]:
    """Log lower and upper bounds on ``Pr(Bin(trials, p) <= threshold)``.

    ``lower_constant`` is the unspecified absolute constant of the lower
    bound; callers supply it.
    """
    n, r = trials, threshold
    if not r >= 1:
        raise DomainError(f"tail bound needs r >= 1, got r={r}")
    if not r <= n - 1:
        raise DomainError(f"tail bound needs r <= N-1, got r={r}, N={n}")
    if not r <= n * params.p:
        raise DomainError(f"tail bound needs r <= N*p, got r={r}, N*p={n * params.p}")
    if lower_constant <= 0:
        raise DomainError("lower_constant must be positive")
    log_upper = -n * lambda_star(r / n, params)
    log_lower = math.log(lower_constant) - 0.5 * math.log(min(r, n - r)) + log_upper
    return log_lower, log_upper


def _check_sparse_hypothesis(k: int, t: Fraction, params: RateParams) -> None:
    if t < 1:
        raise DomainError(f"sparse-set bound hypothesis t >= 1 violated (t={t})")
    if float(t) > params.p * (k - 1):
        raise DomainError(
            f"sparse-set bound hypothesis t <= p(k-1) violated (t={t}, p(k-1)={params.p * (k - 1)})"
        )


def sparse_prob(
    k: int, t, params: RateParams, mode: str = "exact", c0: float = DEFAULT_C0
) -> float:
    """Log-probability that a fixed ``k``-set of G(n, p) is ``t``-sparse.

    A k-set is t-sparse iff its Bin(C(k,2), p) edge count is at most
    ``floor(k t / 2)``.  ``mode`` selects the exact value or one side of the
    rate-function sandwich.
    """
    t = as_rational(t)
    if k < 2:
        raise DomainError(f"sparse_prob needs k >= 2, got {k}")
    pairs = k * (k - 1) // 2
    if mode == "exact":
        quota = math.floor(k * t / 2)
        return binom_cdf_log(pairs, quota, params)
    if mode not in ("upper", "lower"):
        raise ValueError(f"unknown mode {mode!r}")
    _check_sparse_hypothesis(k, t, params)
    if mode == "upper":
        return -pairs * lambda_star(float(t) / (k - 1), params)
    # evaluate at the integral quota, which the edge count actually has to meet
    quota = math.floor(k * t / 2)
    return -pairs * lambda_star(quota / pairs, params) - 0.5 * math.log(k) + math.log(c0)


def psi_solve(params: RateParams, xi: float) -> float:
    """Return psi in (0, 1) with ``lambda_star(psi * p) == (1 - xi) * ln b``.

    ``lambda_star`` falls strictly from ln b to 0 on [0, p], so plain
    bisection on [0, 1] always converges.
    """
    if not 0.0 < xi < 1.0:
        raise DomainError(f"xi must lie in (0, 1), got {xi}")
    target = (1.0 - xi) * params.ln_b
    lo, hi = 0.0, 1.0
    for _ in range(PSI_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if lambda_star(mid * params.p, params) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo < PSI_TOL:
            break
    return 0.5 * (lo + hi)


def lambda_expansion_check(t: float, k: int, params: RateParams, eps: float) -> tuple[float, float]:
    """Compare the exact rate shift with its first-order approximation.

    Returns ``(exact, approx)`` where ``exact`` is
    ``lambda_star((1+eps) t/(k-1)) - lambda_star(t/(k-1))`` and ``approx`` is
    ``-(eps t / k) ln(p k / t)``.
    """
    if not -1.0 <= eps <= 1.0:
        raise DomainError(f"expansion needs |eps| <= 1, got {eps}")
    if k < 2:
        raise DomainError(f"expansion needs k >= 2, got {k}")
    if not 0.0 < t <= params.p * (k - 1):
        raise DomainError(f"expansion needs 0 < t <= p(k-1), got t={t}, k={k}")
    base = t / (k - 1)
    exact = lambda_star((1.0 + eps) * base, params) - lambda_star(base, params)
    approx = -(eps * t / k) * math.log(params.p * k / t)
    return exact, approx
