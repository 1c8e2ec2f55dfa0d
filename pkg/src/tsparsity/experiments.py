"""Monte Carlo checks of two-point concentration and first-moment scans.

Per-sample seeds are the SplitMix64 stream of the master seed:
``seed_i = mix64(master + (i + 1) * 0x9E3779B97F4A7C15 mod 2**64)``.
Since the increment is odd and ``mix64`` is a bijection, distinct sample
indices get distinct seeds.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .graphs import GOLDEN_GAMMA, MASK64, gnp_sample, mix64
from .moments import log_expected_count
from .predict import ConcentrationInterval, predict
from .rates import RateParams, as_rational

CONCENTRATION_COLUMNS = ("value", "count", "predicted_low", "predicted_high", "hit_rate")
SCAN_COLUMNS = ("k", "log_E_exact", "log_E_upper", "log_E_lower")


def sample_seed(master_seed: int, index: int) -> int:
    return mix64((master_seed + (index + 1) * GOLDEN_GAMMA) & MASK64)


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    p: float
    t: Fraction
    delta: float
    samples: int
    master_seed: int = 0
    solver_budget: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError(f"samples must be at least 1, got {self.samples}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        object.__setattr__(self, "t", as_rational(self.t))

    @property
    def params(self) -> RateParams:
        return RateParams(self.p)

    def as_record(self) -> dict:
        rec = asdict(self)
        rec["t"] = str(self.t)
        # worker count never changes results, so it stays out of the outputs
        del rec["workers"]
        return rec


@dataclass(frozen=True)
class SampleOutcome:
    index: int
    seed: int
    size: int
    optimal: bool


def _solve_sample(args) -> SampleOutcome:
    from .solver import sparsity_exact

    config, index = args
    seed = sample_seed(config.master_seed, index)
    graph = gnp_sample(config.n, config.p, seed)
    res = sparsity_exact(graph, config.t, config.solver_budget, config.params)
    return SampleOutcome(index, seed, res.size, res.optimal)


@dataclass(frozen=True)
class ConcentrationSummary:
    config: ExperimentConfig
    alpha_hat: float
    predicted: ConcentrationInterval
    histogram: dict = field(default_factory=dict)
    unsolved: int = 0
    hit_rate: Optional[float] = None
    widened_hit_rate: Optional[float] = None
    ceil_hit_rate: Optional[float] = None

    @property
    def solved(self) -> int:
        return sum(self.histogram.values())

    @property
    def mode(self) -> Optional[int]:
        if not self.histogram:
            return None
        # lowest value wins ties
        return max(sorted(self.histogram), key=lambda v: self.histogram[v])

    def as_record(self) -> dict:
        return {
            "config": self.config.as_record(),
            "alpha_hat": self.alpha_hat,
            "k_minus": self.predicted.k_minus,
            "k_plus": self.predicted.k_plus,
            "k_plus_ceil": self.predicted.k_plus_ceil,
            "histogram": {str(k): v for k, v in self.histogram.items()},
            "unsolved": self.unsolved,
            "hit_rate": self.hit_rate,
            "widened_hit_rate": self.widened_hit_rate,
            "ceil_hit_rate": self.ceil_hit_rate,
        }


def _rate(histogram: dict, low: int, high: int) -> Optional[float]:
    total = sum(histogram.values())
    if total == 0:
        return None
    return sum(c for v, c in histogram.items() if low <= v <= high) / total


def summarize(config: ExperimentConfig, outcomes: Sequence[SampleOutcome]) -> ConcentrationSummary:
    """Aggregate per-sample outcomes; unsolved samples are counted, never imputed."""
    pred = predict(config.n, config.t, config.params, config.delta)
    iv = pred.interval
    hist = Counter(o.size for o in outcomes if o.optimal)
    histogram = dict(sorted(hist.items()))
    return ConcentrationSummary(
        config=config,
        alpha_hat=pred.alpha_hat,
        predicted=iv,
        histogram=histogram,
        unsolved=sum(1 for o in outcomes if not o.optimal),
        hit_rate=_rate(histogram, iv.k_minus, iv.k_plus),
        widened_hit_rate=_rate(histogram, iv.k_minus - 1, iv.k_plus + 1),
        ceil_hit_rate=_rate(histogram, iv.k_minus, iv.k_plus_ceil),
    )


def run_samples(config: ExperimentConfig) -> list[SampleOutcome]:
    jobs = [(config, i) for i in range(config.samples)]
    if config.workers == 1:
        outcomes = [_solve_sample(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_solve_sample, jobs))
    return sorted(outcomes, key=lambda o: o.index)


def run_concentration(config: ExperimentConfig) -> ConcentrationSummary:
    """Sample, solve exactly, and histogram the t-sparsity numbers."""
    # fail fast if the prediction is undefined
    predict(config.n, config.t, config.params, config.delta)
    return summarize(config, run_samples(config))


@dataclass(frozen=True)
class ScanRow:
    k: int
    log_E_exact: float
    log_E_upper: Optional[float]
    log_E_lower: Optional[float]


@dataclass(frozen=True)
class MomentScan:
    n: int
    p: float
    t: Fraction
    rows: tuple

    @property
    def k_star(self) -> Optional[int]:
        """Smallest k whose expected count of t-sparse k-sets is below one."""
        for row in self.rows:
            if row.log_E_exact < 0:
                return row.k
        return None


def moment_scan(n: int, params: RateParams, t, k_range) -> MomentScan:
    t = as_rational(t)
    ks = list(k_range)
    if ks and (min(ks) < 2 or max(ks) > n):
        raise ValueError(f"k range must lie within [2, {n}]")
    rows = []
    for k in ks:
        rep = log_expected_count(n, k, t, params, mode="bounds")
        rows.append(ScanRow(k, rep.log_E_exact, rep.log_E_upper, rep.log_E_lower))
    return MomentScan(n, params.p, t, tuple(rows))


def fmt_number(x) -> str:
    """Full-precision text for a number; ``None`` becomes an empty field."""
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x + 0.0)  # folds -0.0 into 0.0
    return str(x)


def _config_lines(record: dict) -> list[str]:
    return [f"# {key}={fmt_number(value)}" for key, value in record.items()]


def concentration_csv(summary: ConcentrationSummary) -> str:
    buf = io.StringIO()
    for line in _config_lines(summary.config.as_record()):
        buf.write(line + "\n")
    buf.write(f"# alpha_hat={fmt_number(summary.alpha_hat)}\n")
    buf.write(f"# unsolved={summary.unsolved}\n")
    buf.write(f"# widened_hit_rate={fmt_number(summary.widened_hit_rate)}\n")
    buf.write(f"# ceil_hit_rate={fmt_number(summary.ceil_hit_rate)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CONCENTRATION_COLUMNS)
    hit = "undefined" if summary.hit_rate is None else fmt_number(summary.hit_rate)
    for value, count in summary.histogram.items():
        writer.writerow([value, count, summary.predicted.k_minus, summary.predicted.k_plus, hit])
    return buf.getvalue()


def scan_csv(scan: MomentScan) -> str:
    buf = io.StringIO()
    for line in _config_lines({"n": scan.n, "p": scan.p, "t": str(scan.t)}):
        buf.write(line + "\n")
    buf.write(f"# k_star={fmt_number(scan.k_star) or 'absent'}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCAN_COLUMNS)
    for row in scan.rows:
        writer.writerow([row.k, fmt_number(row.log_E_exact), fmt_number(row.log_E_upper), fmt_number(row.log_E_lower)])
    return buf.getvalue()


def to_jsonl(obj) -> str:
    """One JSON object per line: a header record, then one per bucket or scan row."""
    if isinstance(obj, ConcentrationSummary):
        head = {"type": "concentration", **obj.as_record()}
        del head["histogram"]
        lines = [head] + [{"type": "bucket", "value": v, "count": c} for v, c in obj.histogram.items()]
    elif isinstance(obj, MomentScan):
        lines = [{"type": "scan", "n": obj.n, "p": obj.p, "t": str(obj.t), "k_star": obj.k_star}]
        lines += [{"type": "row", **asdict(row)} for row in obj.rows]
    else:
        raise TypeError(f"cannot export {type(obj).__name__}")
    return "".join(json.dumps(rec, sort_keys=False) + "\n" for rec in lines)


def from_jsonl(text: str):
    records = [json.loads(line) for line in text.splitlines() if line.strip()]
    if not records:
        raise ValueError("empty JSONL document")
    head, body = records[0], records[1:]
    if head["type"] == "concentration":
        cfg = dict(head["config"])
        cfg["t"] = Fraction(cfg["t"])
        config = ExperimentConfig(**cfg)
        return ConcentrationSummary(
            config=config,
            alpha_hat=head["alpha_hat"],
            predicted=ConcentrationInterval(head["k_minus"], head["k_plus"], head["k_plus_ceil"]),
            histogram={rec["value"]: rec["count"] for rec in body},
            unsolved=head["unsolved"],
            hit_rate=head["hit_rate"],
            widened_hit_rate=head["widened_hit_rate"],
            ceil_hit_rate=head["ceil_hit_rate"],
        )
    if head["type"] == "scan":
        rows = tuple(ScanRow(**{k: v for k, v in rec.items() if k != "type"}) for rec in body)
        return MomentScan(head["n"], head["p"], Fraction(head["t"]), rows)
    raise ValueError(f"unknown record type {head['type']!r}")


def render(obj, fmt: str = "csv") -> str:
    if fmt == "jsonl":
        return to_jsonl(obj)
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(obj, ConcentrationSummary):
        return concentration_csv(obj)
    if isinstance(obj, MomentScan):
        return scan_csv(obj)
    raise TypeError(f"cannot export {type(obj).__name__}")


def export(obj, fmt: str, path) -> None:
    text = render(obj, fmt)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {fmt} output to {path}: {exc.strerror}") from exc
