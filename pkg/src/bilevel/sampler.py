"""Exact generalized sampling ``y(s) = (x * h)(s)`` of bilevel signals, plus bounded noise."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import BadTimes, NegativeDelta
from .kernel import CumulativeKernel
from .signal import BilevelSignal

__all__ = ["SampleSet", "sample_at", "sample_series", "uniform_times",
           "add_bounded_noise", "detect_period"]

_GRID_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Sampling instants and values; ``period`` is set only for the grid ``s_n = n*T``."""

    times: np.ndarray
    values: np.ndarray
    period: float | None = None
    noise_level: float = 0.0

    def __post_init__(self):
        for name in ("times", "values"):
            arr = np.array(getattr(self, name), dtype=float).reshape(-1)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return self.times.size

    @property
    def is_uniform(self) -> bool:
        return self.period is not None

    @property
    def density(self) -> float:
        """Largest gap between consecutive instants, counting the gap from 0 to ``s_1``."""
        if self.times.size == 0:
            return 0.0
        return float(np.max(np.diff(np.concatenate(([0.0], self.times)))))

    def __eq__(self, other):
        if not isinstance(other, SampleSet):
            return NotImplemented
        return (np.array_equal(self.times, other.times)
                and np.array_equal(self.values, other.values)
                and self.period == other.period and self.noise_level == other.noise_level)


def sample_at(signal: BilevelSignal, cum: CumulativeKernel, s):
    """Closed-form convolution value at time(s) ``s``.

    Each box ``[a, b)`` contributes ``H(s - a) - H(s - b)`` with arguments
    clipped to the kernel support, so the result is exact up to rounding.
    """
    s_arr = np.asarray(s, dtype=float)
    if signal.box_count == 0:
        out = np.zeros(s_arr.shape)
    else:
        d = s_arr[..., None]
        out = np.sum(cum(d - signal.rising) - cum(d - signal.falling), axis=-1)
    return float(out) if out.ndim == 0 else out


def uniform_times(period: float, count: int) -> np.ndarray:
    return period * np.arange(1, count + 1, dtype=float)


def detect_period(times: np.ndarray) -> float | None:
    """Return ``T`` if ``times`` is the grid ``T, 2T, ..., KT`` (to 1e-12 relative), else None."""
    if times.size == 0:
        return None
    T = float(times[0])
    if T <= 0:
        return None
    grid = uniform_times(T, times.size)
    if np.all(np.abs(times - grid) <= _GRID_ATOL * np.maximum(1.0, grid)):
        return T
    return None


def sample_series(signal: BilevelSignal, cum: CumulativeKernel,
                  times: Sequence[float]) -> SampleSet:
    t = np.asarray(times, dtype=float).reshape(-1)
    if t.size and (not np.all(np.isfinite(t)) or t[0] <= 0):
        raise BadTimes("times: must be finite and positive")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise BadTimes("times: must be strictly increasing")
    period = detect_period(t)
    if period is not None:
        t = uniform_times(period, t.size)
    return SampleSet(t, sample_at(signal, cum, t), period)


def add_bounded_noise(samples: SampleSet, delta: float, seed: int) -> SampleSet:
    """Add ``delta * eps_n`` with ``eps_n`` i.i.d. uniform on [-1, 1] (PCG64, seeded)."""
    if delta < 0:
        raise NegativeDelta(f"delta: must be >= 0, got {delta!r}")
    rng = np.random.default_rng(seed)
    eps = rng.uniform(-1.0, 1.0, size=samples.values.size)
    return replace(samples, values=samples.values + delta * eps, noise_level=float(delta))
