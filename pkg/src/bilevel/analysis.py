"""Sampling-error bound, transition-error metric and the seeded noise experiment."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import HypothesisViolated, TooFewRecovered
from .kernel import CumulativeKernel, PiecewisePolyKernel, cumulative, h0_kernel
from .recovery import RecoveryOptions, RecoveryResult, recover
from .sampler import add_bounded_noise, sample_at, sample_series, uniform_times
from .signal import BilevelSignal, random_signal, x0_signal

__all__ = [
    "stability_bound",
    "sup_sample_deviation",
    "sample_deviations",
    "transition_error",
    "ExperimentConfig",
    "TrialRecord",
    "ReportRow",
    "ExperimentReport",
    "trial_seed",
    "run_noise_experiment",
    "ExampleOutcome",
    "unit_box_example",
]

_RATE_RTOL = 1e-12


def stability_bound(kernel: PiecewisePolyKernel, rate: float, period: float, delta: float) -> float:
    """Worst-case sample deviation ``(floor(M R T) + 2) * ||h||_inf * delta``.

    Valid when every transition moves by at most ``delta < 1/(2R)`` and ``R <= 1/T``.
    """
    if rate < 0 or delta < 0:
        raise HypothesisViolated("rate and delta must be nonnegative")
    if rate * period > 1.0 + _RATE_RTOL:
        raise HypothesisViolated(f"rate {rate!r} exceeds sampling rate 1/T = {1.0 / period!r}")
    if rate > 0 and not 2.0 * delta * rate < 1.0:
        raise HypothesisViolated(f"delta {delta!r} is not below 1/(2R) = {0.5 / rate!r}")
    M = kernel.support_periods
    # guard floor() against MRT landing a hair below an integer
    mrt = M * rate * period
    k = math.floor(mrt + _RATE_RTOL * max(1.0, mrt))
    return (k + 2) * kernel.sup_norm * delta


def sample_deviations(x: BilevelSignal, x_tilde: BilevelSignal, cum: CumulativeKernel,
                      period: float, count: int) -> np.ndarray:
    """``|x*h(nT) - x~*h(nT)|`` for ``n = 1..count``."""
    t = uniform_times(period, count)
    return np.abs(sample_at(x, cum, t) - sample_at(x_tilde, cum, t))


def sup_sample_deviation(x: BilevelSignal, x_tilde: BilevelSignal, cum: CumulativeKernel,
                         period: float, count: int) -> float:
    if count <= 0:
        return 0.0
    return float(np.max(sample_deviations(x, x_tilde, cum, period, count)))


def transition_error(truth: BilevelSignal, recovered, first_k: int = 10) -> float:
    """Largest position error over the first ``first_k`` transitions."""
    rec = recovered.transitions if isinstance(recovered, (RecoveryResult, BilevelSignal)) \
        else np.asarray(recovered, dtype=float)
    if rec.size < first_k:
        raise TooFewRecovered(f"recovered {rec.size} transitions, need {first_k}")
    if truth.transitions.size < first_k:
        raise ValueError(f"truth has only {truth.transitions.size} transitions")
    if first_k == 0:
        return 0.0
    return float(np.max(np.abs(rec[:first_k] - truth.transitions[:first_k])))


@dataclass(frozen=True)
class ExperimentConfig:
    master_seed: int = 0
    trials: int = 50
    delta_grid: tuple = tuple(np.linspace(0.0, 0.03, 31).tolist())
    box_count: int = 5
    gap_range: tuple = (1.1, 1.9)
    first_transition_range: tuple = (0.0, 1.0)
    kernel: PiecewisePolyKernel = field(default_factory=h0_kernel)
    period: float = 1.0
    sample_count: int = 14
    fixed_signal: bool = True
    # None -> eps_pos = delta, snap_eta = 1e-6 * H(T)
    eps_pos: float | None = None
    snap_eta: float | None = None
    # raise the detection threshold by the propagated error of earlier edges
    propagate_threshold: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials: must be >= 1")
        grid = np.asarray(self.delta_grid, dtype=float)
        if grid.size == 0 or np.any(grid < 0) or np.any(np.diff(grid) < 0):
            raise ValueError("delta_grid: must be nonempty, nonnegative and ascending")
        object.__setattr__(self, "delta_grid", tuple(float(d) for d in grid))
        if not math.isclose(self.kernel.period, self.period, rel_tol=1e-12):
            raise ValueError("kernel: validated against a different period")
        if self.sample_count < 1:
            raise ValueError("sample_count: must be >= 1")

    @property
    def expected_transitions(self) -> int:
        return 2 * self.box_count


def trial_seed(master_seed: int, delta_index: int, trial_index: int) -> np.random.SeedSequence:
    """Seed material depending only on the triple, never on run order or grid size."""
    return np.random.SeedSequence([master_seed, delta_index, trial_index])


@dataclass(frozen=True)
class TrialRecord:
    delta: float
    trial: int
    P: float          # nan for a failed trial
    failed: bool
    recovered_count: int


@dataclass(frozen=True)
class ReportRow:
    delta: float
    max_P: float
    mean_P: float
    median_P: float
    failures: int


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple
    trials: tuple

    def row(self, delta: float) -> ReportRow:
        for r in self.rows:
            if math.isclose(r.delta, delta, abs_tol=1e-15):
                return r
        raise KeyError(delta)


def _one_trial(cfg: ExperimentConfig, cum: CumulativeKernel, base_signal, di: int,
               delta: float, trial: int) -> TrialRecord:
    ss = trial_seed(cfg.master_seed, di, trial)
    sig_seed, noise_seed = ss.spawn(2)
    if base_signal is None:
        x = random_signal(int(sig_seed.generate_state(1)[0]), cfg.box_count,
                          cfg.gap_range, cfg.first_transition_range)
    else:
        x = base_signal
    count = cfg.sample_count
    if base_signal is None and x.box_count:
        # drawn signals can outrun the fixed horizon; cover the last box
        count = max(count, math.ceil(x.transitions[-1] / cfg.period) + cfg.kernel.support_periods)
    clean = sample_series(x, cum, uniform_times(cfg.period, count))
    noisy = add_bounded_noise(clean, delta, int(noise_seed.generate_state(1)[0]))
    eps = delta if cfg.eps_pos is None else cfg.eps_pos
    opts = RecoveryOptions(
        eps_pos=None if eps == 0 else eps,
        snap_eta=1e-6 * cum.H_T if cfg.snap_eta is None else cfg.snap_eta,
        noise_level=delta if cfg.propagate_threshold else 0.0,
    )
    res = recover(noisy, cum, opts)
    k = cfg.expected_transitions
    if res.transitions.size != k:
        return TrialRecord(delta, trial, math.nan, True, int(res.transitions.size))
    return TrialRecord(delta, trial, transition_error(x, res, k), False, k)


def run_noise_experiment(config: ExperimentConfig | None = None) -> ExperimentReport:
    """Sample, perturb with bounded uniform noise, recover and score every (delta, trial).

    A trial that recovers a transition count other than ``2 * box_count`` is
    a failure; failures are counted per row and excluded from max/mean/median.
    """
    cfg = config or ExperimentConfig()
    cum = cumulative(cfg.kernel)
    base = x0_signal() if cfg.fixed_signal else None
    if base is not None and base.box_count != cfg.box_count:
        raise ValueError("fixed_signal: x0 has 5 boxes; box_count must be 5")
    records = []
    rows = []
    for di, delta in enumerate(cfg.delta_grid):
        recs = [_one_trial(cfg, cum, base, di, delta, t) for t in range(cfg.trials)]
        records.extend(recs)
        ok = np.array([r.P for r in recs if not r.failed])
        fails = sum(r.failed for r in recs)
        if ok.size:
            rows.append(ReportRow(delta, float(ok.max()), float(ok.mean()),
                                  float(np.median(ok)), fails))
        else:
            rows.append(ReportRow(delta, math.nan, math.nan, math.nan, fails))
    return ExperimentReport(tuple(rows), tuple(records))


@dataclass(frozen=True)
class ExampleOutcome:
    """Sample and position deviations between the unit-box signal and a perturbed copy."""

    epsilon: float
    count: int
    sample_dev: np.ndarray          # |x*h(n) - x~*h(n)|, n = 1..count
    transition_dev: np.ndarray      # |t~_i - t_i|

    @property
    def sup_from_2(self) -> float:
        return float(np.max(self.sample_dev[1:])) if self.count > 1 else 0.0

    @property
    def differing_indices(self) -> np.ndarray:
        return np.flatnonzero(self.sample_dev > 1e-12) + 1


def _unit_box_pair(example: int, epsilon: float, count: int):
    from .kernel import h1_kernel
    from .signal import example1_signal
    h1 = h1_kernel()
    # enough boxes that truncation never reaches the first `count` windows
    boxes = count // 2 + h1.support_periods + 2
    x1 = example1_signal(boxes)
    if example == 1:
        xe = example1_signal(boxes, stretch=epsilon)
    elif example == 2:
        xe = example1_signal(boxes, shift=epsilon)
    else:
        raise ValueError(f"example: must be 1 or 2, got {example!r}")
    return x1, xe, cumulative(h1)


def unit_box_example(example: int, epsilon: float, count: int = 50) -> ExampleOutcome:
    """Dilated (example 1) or translated (example 2) unit boxes sampled by ``chi_[0,2)``."""
    x1, xe, cum = _unit_box_pair(example, epsilon, count)
    dev = sample_deviations(x1, xe, cum, 1.0, count)
    return ExampleOutcome(epsilon, count, dev, np.abs(xe.transitions - x1.transitions))
