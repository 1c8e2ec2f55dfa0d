"""First and second moments of the number of t-sparse k-sets in G(n, p).

All quantities are natural logs.  Asymptotic ``(1 + o(1))`` substitutions
of the textbook argument are replaced by exact rate-function values, so
every bound here is a finite-n number rather than an order of magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Optional

from .rates import DomainError, RateParams, as_rational, lambda_star, psi_solve, sparse_prob

DEFAULT_EPS = 0.2
DEFAULT_XI = 0.1

NEG_INF = -math.inf


def log_binom(n: int, k: int) -> float:
    if k < 0 or k > n:
        return NEG_INF
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def log_sum_exp(values) -> float:
    """Stable ``ln sum exp``, summed in the given order."""
    values = list(values)
    top = max(values, default=NEG_INF)
    if top == NEG_INF:
        return NEG_INF
    if top == math.inf:
        return math.inf
    return top + math.log(math.fsum(math.exp(v - top) for v in values))


def _lower_tail_exponent(trials: int, x: float, params: RateParams) -> float:
    # Chernoff exponent for Pr(Bin(trials, p) <= x * trials); trivial above the mean
    if trials == 0 or x >= params.p:
        return 0.0
    return -trials * lambda_star(x, params)


@dataclass(frozen=True)
class MomentReport:
    n: int
    k: int
    t: Fraction
    params: RateParams
    log_E_exact: float
    log_E_upper: Optional[float] = None
    log_E_lower: Optional[float] = None


def log_expected_count(n: int, k: int, t, params: RateParams, mode: str = "exact") -> MomentReport:
    """Log of the expected number of t-sparse k-sets.

    ``mode="bounds"`` adds the rate-function sandwich when its hypotheses
    (1 <= t <= p(k-1)) hold; otherwise the bounds stay ``None``.
    """
    t = as_rational(t)
    if not 2 <= k <= n:
        raise DomainError(f"expected count needs 2 <= k <= n, got k={k}, n={n}")
    comb = log_binom(n, k)
    exact = comb + sparse_prob(k, t, params)
    if mode == "exact":
        return MomentReport(n, k, t, params, exact)
    if mode != "bounds":
        raise ValueError(f"unknown mode {mode!r}")
    try:
        upper = comb + sparse_prob(k, t, params, "upper")
        lower = comb + sparse_prob(k, t, params, "lower")
    except DomainError:
        return MomentReport(n, k, t, params, exact)
    return MomentReport(n, k, t, params, exact, upper, lower)


def s_ell(n: int, k: int, ell: int, params: RateParams) -> float:
    """``ln( C(k,l)^2 l! b^C(l,2) / n^l )``."""
    if not 1 <= ell <= k:
        raise DomainError(f"s_ell needs 1 <= l <= k, got l={ell}, k={k}")
    return (
        2 * log_binom(k, ell)
        + math.lgamma(ell + 1)
        - ell * math.log(n)
        + ell * (ell - 1) // 2 * params.ln_b
    )


def log_overlap_ratio(n: int, k: int, ell: int) -> float:
    """Exact ``ln( C(k,l) C(n-k,k-l) / C(n,k) )``."""
    return log_binom(k, ell) + log_binom(n - k, k - ell) - log_binom(n, k)


def log_overlap_ratio_bound(n: int, k: int, ell: int) -> float:
    """``ln( 2^(2k+1) (k/n)^l )``, the coarse bound on ``log_overlap_ratio``."""
    return (2 * k + 1) * math.log(2) + ell * math.log(k / n)


@dataclass(frozen=True)
class OverlapScenario:
    """Two k-sets sharing ``ell`` vertices, with the bookkeeping of the overlap split."""

    k: int
    ell: int
    t: Fraction
    params: RateParams
    eps: float = DEFAULT_EPS
    xi: float = DEFAULT_XI

    def __post_init__(self):
        if not 1 <= self.ell <= self.k - 1:
            raise DomainError(f"overlap needs 1 <= l <= k-1, got l={self.ell}, k={self.k}")
        if not 0 < self.eps < 0.25:
            raise DomainError(f"eps must lie in (0, 1/4), got {self.eps}")
        if not 0 < self.xi < 1:
            raise DomainError(f"xi must lie in (0, 1), got {self.xi}")
        object.__setattr__(self, "t", as_rational(self.t))

    @property
    def lambda1(self) -> float:
        return self.eps * self.k / 2

    @property
    def lambda2(self) -> float:
        return (1 - self.eps) * self.k

    @property
    def regime(self) -> int:
        if self.ell < self.lambda1:
            return 1
        if self.ell < self.lambda2:
            return 2
        return 3

    @cached_property
    def psi(self) -> float:
        return psi_solve(self.params, self.xi)

    @property
    def overlap_pairs(self) -> int:
        return self.ell * (self.ell - 1) // 2

    @property
    def cross_pairs(self) -> int:
        # edge slots of one set not inside the overlap
        return (self.k - self.ell) * (self.k + self.ell - 1) // 2

    @property
    def quota(self) -> Fraction:
        """``t k / 2``, the edge allowance of a t-sparse k-set."""
        return self.t * self.k / 2

    @property
    def mu_raw(self) -> float:
        return float(self.quota) - self.cross_pairs * self.psi * self.params.p

    @property
    def mu(self) -> int:
        return max(0, math.floor(self.mu_raw))

    @property
    def p1_empty(self) -> bool:
        """True when the low-overlap-edge part of the split has no terms."""
        return self.mu_raw < 0

    @property
    def x_I(self) -> float:
        return float(self.t * self.k) / (self.ell * (self.ell - 1)) if self.ell > 1 else math.inf

    @property
    def x_AB(self) -> float:
        return float(self.t * self.k) / (self.k * (self.k - 1) - self.ell * (self.ell - 1))


def _require_regime3(sc: OverlapScenario) -> None:
    if sc.ell < sc.lambda2:
        raise DomainError(f"bound needs l >= lambda2 = {sc.lambda2:.6g}, got l={sc.ell}")
    if sc.ell < 2:
        raise DomainError("bound needs an overlap of at least two vertices")


def log_p1_upper(sc: OverlapScenario) -> float:
    """Bound on both sets being t-sparse with at most ``mu`` overlap edges."""
    _require_regime3(sc)
    if sc.p1_empty:
        return NEG_INF
    pairs = sc.overlap_pairs
    if sc.mu > sc.params.p * pairs:
        raise DomainError(f"p1 bound needs mu <= p C(l,2), got mu={sc.mu}, p C(l,2)={sc.params.p * pairs}")
    return -pairs * lambda_star(sc.mu / pairs, sc.params)


def log_p2_upper(sc: OverlapScenario) -> float:
    """Bound on both sets being t-sparse with more than ``mu`` overlap edges."""
    _require_regime3(sc)
    pairs = sc.overlap_pairs
    if float(sc.quota) > sc.params.p * pairs:
        raise DomainError(
            f"p2 bound needs t k/2 <= p C(l,2), got t k/2={float(sc.quota)}, p C(l,2)={sc.params.p * pairs}"
        )
    return (
        -pairs * lambda_star(sc.x_I, sc.params)
        - sc.cross_pairs * (2 - 2 * sc.xi) * sc.params.ln_b
    )


@dataclass(frozen=True)
class _FirstMoment:
    log_E: float
    log_pr: float  # ln Pr(a fixed k-set is t-sparse)
    log_comb: float


def _first_moment(n: int, k: int, t: Fraction, params: RateParams) -> _FirstMoment:
    log_pr = sparse_prob(k, t, params)
    comb = log_binom(n, k)
    return _FirstMoment(comb + log_pr, log_pr, comb)


def _overlap_upper(n: int, sc: OverlapScenario, fm: _FirstMoment, coarse_ratio: bool = False) -> float:
    k, ell, params = sc.k, sc.ell, sc.params
    regime = sc.regime
    if regime == 1:
        return 2 * fm.log_E + math.log(2) + s_ell(n, k, ell, params)
    if regime == 2:
        k_pairs = k * (k - 1) // 2
        joint = _lower_tail_exponent(sc.overlap_pairs, sc.x_I, params) + 2 * _lower_tail_exponent(
            k_pairs - sc.overlap_pairs, sc.x_AB, params
        )
        ratio = log_overlap_ratio_bound(n, k, ell) if coarse_ratio else log_overlap_ratio(n, k, ell)
        return 2 * fm.log_E + ratio + joint - 2 * fm.log_pr
    placements = fm.log_comb + log_binom(k, ell) + log_binom(n - k, k - ell)
    return placements + log_sum_exp([log_p1_upper(sc), log_p2_upper(sc)])


def overlap_upper(
    n: int,
    k: int,
    ell: int,
    t,
    params: RateParams,
    eps: float = DEFAULT_EPS,
    xi: float = DEFAULT_XI,
    coarse_ratio: bool = False,
) -> tuple[float, int]:
    """Upper bound on ``ln f(l)`` (ordered pairs of t-sparse k-sets meeting in l vertices).

    Returns ``(log_f_upper, regime)``.

    * regime 1 (l < eps k/2): conditioning on an empty overlap, ``2 ln E + ln 2 + s_l``;
    * regime 2: placement ratio times Chernoff bounds for the overlap and
      the two private edge sets, over ``Pr(A sparse)^2``.  The exact placement
      ratio is used unless ``coarse_ratio`` asks for ``2^(2k+1) (k/n)^l``,
      which swamps everything at desk-scale n;
    * regime 3 (l >= (1-eps) k): placements times the split bounds p1 + p2.
    """
    sc = OverlapScenario(k, ell, t, params, eps, xi)
    fm = _first_moment(n, k, sc.t, params)
    return _overlap_upper(n, sc, fm, coarse_ratio), sc.regime


@dataclass(frozen=True)
class OverlapRow:
    ell: int
    regime: int
    log_f_upper: float


@dataclass(frozen=True)
class JansonReport:
    n: int
    k: int
    t: Fraction
    params: RateParams
    eps: float
    xi: float
    log_E: float
    log_delta: float
    log_bound: float
    rows: tuple[OverlapRow, ...]


def janson_log_bound(log_E: float, log_delta: float) -> float:
    """``-E^2 / (E + Delta)`` from the logs of E and Delta, capped at 0."""
    if log_E == NEG_INF:
        return 0.0
    return -math.exp(2 * log_E - log_sum_exp([log_E, log_delta]))


def janson_report(
    n: int,
    k: int,
    t,
    params: RateParams,
    eps: float = DEFAULT_EPS,
    xi: float = DEFAULT_XI,
    coarse_ratio: bool = False,
) -> JansonReport:
    """Janson bound on Pr(no t-sparse k-set), with the per-overlap rows.

    Delta runs over overlaps 2 <= l <= k-1; sets meeting in fewer than two
    vertices share no edge slot and are independent.  Delta is replaced by
    the sum of the per-overlap upper bounds, so the result is a valid but
    weaker bound than the exact Janson value.
    """
    t = as_rational(t)
    if not 2 <= k <= n:
        raise DomainError(f"Janson bound needs 2 <= k <= n, got k={k}, n={n}")
    fm = _first_moment(n, k, t, params)
    rows = []
    for ell in range(2, k):
        sc = OverlapScenario(k, ell, t, params, eps, xi)
        rows.append(OverlapRow(ell, sc.regime, _overlap_upper(n, sc, fm, coarse_ratio)))
    log_delta = log_sum_exp(r.log_f_upper for r in rows)
    return JansonReport(
        n, k, t, params, eps, xi, fm.log_E, log_delta, janson_log_bound(fm.log_E, log_delta), tuple(rows)
    )


def janson_bound(
    n: int,
    k: int,
    t,
    params: RateParams,
    eps: float = DEFAULT_EPS,
    xi: float = DEFAULT_XI,
    coarse_ratio: bool = False,
) -> float:
    return janson_report(n, k, t, params, eps, xi, coarse_ratio).log_bound
