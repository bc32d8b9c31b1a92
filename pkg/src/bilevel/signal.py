"""Bilevel causal signals: finite unions of half-open boxes ``[t_{2i-1}, t_{2i})``."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (InvalidRange, LengthMismatch, NegativeTransition, NotSorted,
                     OddCount, OrderBroken)

__all__ = [
    "BilevelSignal",
    "PerturbationSpec",
    "new_bilevel",
    "evaluate",
    "max_local_rate",
    "perturb",
    "random_signal",
    "X0_TRANSITIONS",
    "x0_signal",
    "example1_signal",
]

# Test signal with five boxes used in the noise experiment.
X0_TRANSITIONS = (0.3791, 1.9885, 3.1306, 4.3440, 5.7552,
                  7.1820, 8.7423, 10.1052, 11.4200, 12.6884)


@dataclass(frozen=True, eq=False)
class BilevelSignal:
    """A {0, 1}-valued causal signal given by its ordered transition times.

    Odd-indexed transitions (1-based) are rising edges, even-indexed ones falling.
    Construct through :func:`new_bilevel` to get validation.
    """

    transitions: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.transitions, dtype=float).reshape(-1)
        arr.setflags(write=False)
        object.__setattr__(self, "transitions", arr)

    @property
    def rising(self) -> np.ndarray:
        return self.transitions[0::2]

    @property
    def falling(self) -> np.ndarray:
        return self.transitions[1::2]

    @property
    def box_count(self) -> int:
        return self.transitions.size // 2

    def __len__(self) -> int:
        return self.transitions.size

    def __eq__(self, other):
        if not isinstance(other, BilevelSignal):
            return NotImplemented
        return np.array_equal(self.transitions, other.transitions)

    def __hash__(self):
        return hash(self.transitions.tobytes())

    def __repr__(self):
        return f"BilevelSignal({self.transitions.tolist()!r})"

    def __call__(self, t):
        return evaluate(self, t)


@dataclass(frozen=True)
class PerturbationSpec:
    """Signed offsets applied transition-wise, ``t_i -> t_i + deltas[i]``."""

    deltas: tuple

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))

    @property
    def delta_sup(self) -> float:
        return max((abs(d) for d in self.deltas), default=0.0)

    def __neg__(self) -> "PerturbationSpec":
        return PerturbationSpec(tuple(-d for d in self.deltas))


def new_bilevel(transitions: Sequence[float]) -> BilevelSignal:
    """Validate a raw transition list and wrap it as a :class:`BilevelSignal`."""
    arr = np.asarray(transitions, dtype=float).reshape(-1)
    if arr.size and not np.all(np.isfinite(arr)):
        raise NotSorted("transitions: non-finite value")
    if arr.size > 1:
        bad = np.flatnonzero(np.diff(arr) <= 0)
        if bad.size:
            i = int(bad[0])
            raise NotSorted(f"transitions: t[{i}]={arr[i]!r} >= t[{i + 1}]={arr[i + 1]!r}")
    if arr.size and arr[0] < 0:
        raise NegativeTransition(f"transitions: first transition {arr[0]!r} is negative")
    if arr.size % 2:
        raise OddCount(f"transitions: odd count {arr.size}, final box is open")
    return BilevelSignal(arr)


def evaluate(signal: BilevelSignal, t):
    """Level of the signal at ``t`` (scalar or array); boxes are left-closed, right-open."""
    t_arr = np.asarray(t, dtype=float)
    # number of transitions <= t; odd means inside a box
    k = np.searchsorted(signal.transitions, t_arr, side="right")
    level = (k % 2).astype(int)
    return int(level) if level.ndim == 0 else level


def max_local_rate(signal: BilevelSignal) -> float:
    """Reciprocal of the smallest gap between consecutive transitions, 0 if fewer than two."""
    if signal.transitions.size < 2:
        return 0.0
    return float(1.0 / np.min(np.diff(signal.transitions)))


def perturb(signal: BilevelSignal, spec: PerturbationSpec) -> BilevelSignal:
    if len(spec.deltas) != signal.transitions.size:
        raise LengthMismatch(
            f"deltas: length {len(spec.deltas)} != transition count {signal.transitions.size}")
    moved = signal.transitions + np.asarray(spec.deltas, dtype=float)
    try:
        return new_bilevel(moved)
    except (NotSorted, NegativeTransition) as exc:
        raise OrderBroken(f"perturbed transitions invalid: {exc}") from exc


def random_signal(seed: int, box_count: int, gap_range=(1.1, 1.9),
                  first_transition_range=(0.0, 1.0)) -> BilevelSignal:
    """Draw a signal with ``t_1 ~ U[a, b]`` and i.i.d. gaps ``~ U[lo, hi]``.

    Uses numpy's PCG64 generator seeded with ``seed``, so the result is a pure
    function of the arguments.
    """
    lo, hi = map(float, gap_range)
    a, b = map(float, first_transition_range)
    if lo <= 0 or lo > hi:
        raise InvalidRange(f"gap_range: need 0 < lo <= hi, got {gap_range!r}")
    if a < 0 or a > b:
        raise InvalidRange(f"first_transition_range: need 0 <= a <= b, got {first_transition_range!r}")
    if box_count < 0:
        raise InvalidRange(f"box_count: must be >= 0, got {box_count}")
    if box_count == 0:
        return new_bilevel([])
    rng = np.random.default_rng(seed)
    first = rng.uniform(a, b)
    gaps = rng.uniform(lo, hi, size=2 * box_count - 1)
    return new_bilevel(first + np.concatenate(([0.0], np.cumsum(gaps))))


def x0_signal() -> BilevelSignal:
    return new_bilevel(X0_TRANSITIONS)


def example1_signal(box_count: int, stretch: float = 0.0, shift: float = 0.0) -> BilevelSignal:
    """Unit boxes ``[2i-1, 2i)``, optionally stretched by ``1 + stretch`` or shifted.

    ``stretch=eps`` gives the dilated signal with transitions ``i(1 + eps)``;
    ``shift=eps`` gives the translated signal with transitions ``i + eps``.
    """
    i = np.arange(1, 2 * box_count + 1, dtype=float)
    return new_bilevel(i * (1.0 + stretch) + shift)
