"""Convergence and prediction measurements against synthetic ground truth.

kl_trajectory streams source samples through a fresh estimator per seed and
records the realized per-symbol log ratio (1/n) log(dmu^n / dnu^n), in bits,
at each checkpoint. prediction_error_trajectory does the same while racing
the estimator's one-step functional predictions against the source's exact
conditional means, Cesaro-averaged. pinsker_check verifies the
total-variation / KL inequality used to carry density convergence over to
set-wise convergence.

Seeds are embarrassingly parallel; jobs > 1 fans them out to a process pool
with an order-preserving map, so output order never depends on scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import ConfigError
from .ingest import RunConfig, build_estimator

__all__ = [
    "CheckpointRecord",
    "RunMetrics",
    "PinskerResult",
    "kl_trajectory",
    "prediction_error_trajectory",
    "pinsker_check",
    "median_at",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class CheckpointRecord:
    """Snapshot of running metrics after n observations."""

    n: int
    kl_bits: float
    posterior_weights: tuple
    cum_pred_sq_error: Optional[float] = None
    cum_pred_abs_error: Optional[float] = None


@dataclass(frozen=True)
class RunMetrics:
    """One seed's checkpoint trail plus the config digest that produced it."""

    seed: int
    digest: str
    checkpoints: tuple


class PinskerResult(NamedTuple):
    tv: float
    kl_bits: float
    bound: float
    holds: bool


def _check_match(source, config: RunConfig):
    est = build_estimator(config)
    if est.reference != source.reference():
        raise ConfigError("estimator reference measure does not match the source's")
    return est


def _kl_one_seed(args) -> RunMetrics:
    source, config, seed, checkpoints = args
    est = build_estimator(config)
    xs = source.sample(checkpoints[-1], seed)
    true_sum = 0.0
    last = None
    records = []
    targets = iter(checkpoints)
    target = next(targets)
    for j, x in enumerate(xs, 1):
        true_sum += source.true_log_density(x, last)
        est.observe(x)
        last = x
        if j == target:
            kl = (true_sum - est.joint_log_density) / (j * _LN2)
            records.append(CheckpointRecord(j, kl, tuple(est.posterior_weights)))
            target = next(targets, None)
    return RunMetrics(seed, config.digest, tuple(records))


def _pred_one_seed(args) -> RunMetrics:
    source, config, r, bound, seed, checkpoints, predictor = args
    est = build_estimator(config)
    xs = source.sample(checkpoints[-1], seed)
    true_sum = 0.0
    sq = 0.0
    ab = 0.0
    last = None
    records = []
    targets = iter(checkpoints)
    target = next(targets)
    for j, x in enumerate(xs, 1):
        # forecast strictly before consuming: one-step-ahead semantics
        if predictor is None:
            pred = est.predict_functional(r, bound)
        else:
            pred = predictor(last)
        truth = source.conditional_mean(r, last, bound)
        diff = truth - pred
        sq += diff * diff
        ab += abs(diff)
        true_sum += source.true_log_density(x, last)
        est.observe(x)
        last = x
        if j == target:
            kl = (true_sum - est.joint_log_density) / (j * _LN2)
            records.append(
                CheckpointRecord(j, kl, tuple(est.posterior_weights), sq / j, ab / j)
            )
            target = next(targets, None)
    return RunMetrics(seed, config.digest, tuple(records))


def _fan_out(worker, arglists, jobs: int):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, arglists))
    return [worker(a) for a in arglists]


def kl_trajectory(
    source,
    config: RunConfig,
    seeds: Optional[Sequence[int]] = None,
    checkpoints: Optional[Sequence[int]] = None,
    jobs: int = 1,
) -> list[RunMetrics]:
    """Realized per-symbol KL against the source oracle, per seed and checkpoint."""
    _check_match(source, config)
    seeds = tuple(seeds if seeds is not None else config.seeds)
    checkpoints = tuple(checkpoints if checkpoints is not None else config.checkpoints)
    args = [(source, config, s, checkpoints) for s in seeds]
    return _fan_out(_kl_one_seed, args, jobs)


def prediction_error_trajectory(
    source,
    config: RunConfig,
    r,
    bound: Optional[float] = None,
    seeds: Optional[Sequence[int]] = None,
    checkpoints: Optional[Sequence[int]] = None,
    jobs: int = 1,
    predictor=None,
) -> list[RunMetrics]:
    """Cesaro-averaged squared and absolute one-step prediction errors.

    predictor overrides the estimator's forecast (callable of the previous
    observation); passing the source's own conditional mean must yield zero.
    """
    _check_match(source, config)
    seeds = tuple(seeds if seeds is not None else config.seeds)
    checkpoints = tuple(checkpoints if checkpoints is not None else config.checkpoints)
    args = [(source, config, r, bound, s, checkpoints, predictor) for s in seeds]
    return _fan_out(_pred_one_seed, args, jobs)


def pinsker_check(p, q) -> PinskerResult:
    """Total variation vs sqrt(2 ln2 KL_bits) for finite (sub-)distributions.

    tv is the exact maximum over subsets of |p(A) - q(A)|; for proper
    distributions this equals half the L1 distance. A support violation
    (p puts mass where q has none) reports infinite KL and holds vacuously.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError("need two equal-length probability vectors")
    if np.any(p < 0) or np.any(q < 0):
        raise ValueError("probabilities must be nonnegative")
    d = p - q
    tv = max(float(d[d > 0].sum()) if np.any(d > 0) else 0.0,
             float(-d[d < 0].sum()) if np.any(d < 0) else 0.0)
    mask = p > 0
    if np.any(q[mask] == 0):
        kl = math.inf
    else:
        kl = float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))
    bound = math.sqrt(2.0 * _LN2 * kl) if math.isfinite(kl) else math.inf
    return PinskerResult(tv, kl, bound, tv <= bound + 1e-12)


def median_at(metrics: Sequence[RunMetrics], n: int, attr: str = "kl_bits") -> float:
    """Median across seeds of one checkpoint metric."""
    vals = []
    for m in metrics:
        for rec in m.checkpoints:
            if rec.n == n:
                vals.append(getattr(rec, attr))
    if not vals:
        raise ValueError(f"no checkpoint at n={n}")
    return float(np.median(vals))
