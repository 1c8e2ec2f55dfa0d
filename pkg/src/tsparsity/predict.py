"""Closed-form location of the t-sparsity number of G(n, p)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .rates import DomainError, RateParams, as_rational


def _iterated_log(n: int, params: RateParams) -> float:
    inner = params.log_b(n * params.p)
    if not inner > 1.0:
        raise DomainError(
            f"prediction outside formula validity: log_b(np) = {inner:.6g} must exceed 1"
        )
    return params.log_b(inner)


def _xlogb_x(t: float, params: RateParams) -> float:
    # 0 ln 0 = 0
    return 0.0 if t == 0 else t * params.log_b(t)


def alpha_p(n: int, params: RateParams) -> float:
    """Classical two-point location of the independence number."""
    return (
        2 * params.log_b(n)
        - 2 * _iterated_log(n, params)
        + 2 * params.log_b(math.e / 2)
        + 1
    )


def alpha_hat_sparse(n: int, t, params: RateParams) -> float:
    """Predicted t-sparsity number of G(n, p)."""
    t = float(as_rational(t))
    if t < 0:
        raise DomainError(f"t must be nonnegative, got {t}")
    p, b = params.p, params.b
    return (
        2 * params.log_b(n)
        + (t - 2) * _iterated_log(n, params)
        - _xlogb_x(t, params)
        + t * params.log_b(2 * b * p * math.e)
        + 2 * params.log_b(math.e / 2)
        + 1
    )


def alpha_dependence(n: int, t: int, params: RateParams) -> float:
    """Predicted t-dependence number (maximum induced degree at most t)."""
    if int(t) != t or t < 0:
        raise DomainError(f"t-dependence needs an integer t >= 0, got {t}")
    t = int(t)
    p, b = params.p, params.b
    log_ratio = (_xlogb_x(t, params) * params.ln_b - 2 * math.lgamma(t + 1)) / params.ln_b
    return (
        2 * params.log_b(n)
        + (t - 2) * _iterated_log(n, params)
        + log_ratio
        + t * params.log_b(2 * b * p / math.e)
        + 2 * params.log_b(math.e / 2)
        + 1
    )


def sparsity_dependence_gap(t: int, params: RateParams) -> float:
    """``2 log_b(t! e^t / t^t)``, the spacing between the two predictions."""
    t = int(t)
    return 2 * (math.lgamma(t + 1) + t - (t * math.log(t) if t else 0.0)) / params.ln_b


@dataclass(frozen=True)
class ConcentrationInterval:
    k_minus: int
    k_plus: int
    # ceiling variant of the upper point, as used by the first-moment argument
    k_plus_ceil: int

    @property
    def width(self) -> int:
        return self.k_plus - self.k_minus

    def contains(self, value: int, widen: int = 0) -> bool:
        return self.k_minus - widen <= value <= self.k_plus + widen


@dataclass(frozen=True)
class Prediction:
    n: int
    t: Fraction
    params: RateParams
    alpha_hat: float
    delta: float

    @property
    def interval(self) -> ConcentrationInterval:
        return _interval(self.alpha_hat, self.delta)

    def as_record(self) -> dict:
        iv = self.interval
        return {
            "n": self.n,
            "p": self.params.p,
            "t": str(self.t),
            "delta": self.delta,
            "alpha_hat": self.alpha_hat,
            "k_minus": iv.k_minus,
            "k_plus": iv.k_plus,
        }


def _interval(alpha_hat: float, delta: float) -> ConcentrationInterval:
    return ConcentrationInterval(
        k_minus=math.floor(alpha_hat - delta),
        k_plus=math.floor(alpha_hat + delta),
        k_plus_ceil=math.ceil(alpha_hat + delta),
    )


def predict(n: int, t, params: RateParams, delta: float) -> Prediction:
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    t = as_rational(t)
    return Prediction(n, t, params, alpha_hat_sparse(n, t, params), float(delta))


def concentration_interval(n: int, t, params: RateParams, delta: float) -> ConcentrationInterval:
    """Floors of ``alpha_hat -/+ delta``."""
    return predict(n, t, params, delta).interval


def regime_reference(n: int, t, params: RateParams) -> tuple[float, float]:
    """Coarse references: ``2 log_b(np)`` for small t and ``t / p`` for large t."""
    if not n * params.p > 1:
        raise DomainError(f"regime reference needs np > 1, got {n * params.p}")
    return 2 * params.log_b(n * params.p), float(as_rational(t)) / params.p
