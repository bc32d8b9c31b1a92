"""Inductive recovery of transition positions from (possibly noisy) samples.

Each sampling interval ``[s_{n-1}, s_n)`` (with ``s_0 = 0``) holds at most one
transition. The contribution of everything already recovered is subtracted
exactly from the next sample; what remains is the cumulative kernel evaluated
at the distance from the new transition to ``s_n``, which is inverted on the
first period.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DensityViolated, NoSamples, PeriodMismatch
from .kernel import CumulativeKernel, invert_cumulative, invert_first_period
from .sampler import SampleSet
from .signal import BilevelSignal, new_bilevel

__all__ = ["RecoveryOptions", "DiagnosticRow", "RecoveryResult",
           "predicted_contribution", "recover", "recover_nonuniform"]

# Noiseless threshold/snap, relative to H(T): a few orders above accumulated rounding.
DEFAULT_EPS_REL = 1e-12
DEFAULT_SNAP_REL = 1e-12
DEFAULT_TOL_REL = 1e-13
ROUNDING_REL = 1e-14


@dataclass(frozen=True)
class RecoveryOptions:
    """Noise-hardening knobs. ``None`` means the noiseless default for the kernel at hand.

    eps_pos
        Floor of the detection threshold: a corrected sample must exceed the
        threshold to announce a transition.
    snap_eta
        Corrected samples within ``snap_eta`` of ``H(T)`` put the transition
        on the interval's left sampling instant.
    inversion_tol
        Time tolerance for bisection when inverting ``H``.
    noise_level
        Known bound on ``|eps_n|`` (zero: rounding only). The threshold at
        each step is at least this bound plus the first-order sample error
        propagated from the uncertainty of already-recovered transitions.
    """

    eps_pos: float | None = None
    snap_eta: float | None = None
    inversion_tol: float | None = None
    noise_level: float = 0.0

    def __post_init__(self):
        for name in ("eps_pos", "snap_eta", "inversion_tol", "noise_level"):
            v = getattr(self, name)
            if v is not None and not v >= 0:
                raise ValueError(f"{name}: must be nonnegative, got {v!r}")

    @classmethod
    def for_noise(cls, delta: float, cum: CumulativeKernel) -> "RecoveryOptions":
        """Options for samples with noise bounded by ``delta``."""
        if delta == 0:
            return cls()
        return cls(eps_pos=delta, snap_eta=1e-6 * cum.H_T, noise_level=delta)

    def resolve(self, cum: CumulativeKernel) -> "RecoveryOptions":
        eps = DEFAULT_EPS_REL * cum.H_T if self.eps_pos is None else self.eps_pos
        snap = DEFAULT_SNAP_REL * cum.H_T if self.snap_eta is None else self.snap_eta
        tol = DEFAULT_TOL_REL * cum.period if self.inversion_tol is None else self.inversion_tol
        if eps >= cum.H_T / 2:
            raise ValueError(f"eps_pos: {eps!r} must be below H(T)/2 = {cum.H_T / 2!r}")
        return RecoveryOptions(eps, snap, tol, self.noise_level)


@dataclass(frozen=True)
class DiagnosticRow:
    n: int                 # 1-based sample index
    case: str              # "1" nothing yet, "2a" inside a box, "2b" between boxes
    y_corrected: float
    clamped: bool
    emitted_t: float       # nan when nothing was emitted
    threshold: float = 0.0


@dataclass(frozen=True, eq=False)
class RecoveryResult:
    transitions: np.ndarray
    open_box: bool
    diagnostics: tuple = field(default=(), repr=False)

    @property
    def closed_transitions(self) -> np.ndarray:
        """Transitions of complete boxes (drops a pending rising edge)."""
        n = self.transitions.size - (self.transitions.size % 2)
        return self.transitions[:n]

    @property
    def signal(self) -> BilevelSignal:
        return new_bilevel(self.closed_transitions)

    def __len__(self):
        return self.transitions.size


def predicted_contribution(recovered: Sequence[float], inside: bool | None,
                           cum: CumulativeKernel, s_next: float) -> float:
    """Sample value at ``s_next`` explained by already-recovered transitions.

    Between boxes (``inside=False``) this is the response to the closed boxes.
    Inside a box (last recovered edge rising) the open box is extended up to
    ``s_next``, so the true sample falls short of it by ``H(s_next - t_fall)``
    when the falling edge lands before ``s_next``.
    """
    r = np.asarray(recovered, dtype=float)
    if inside is None:
        inside = bool(r.size % 2)
    if inside != bool(r.size % 2):
        raise ValueError("inside: parity disagrees with the number of recovered transitions")
    n_closed = r.size - (r.size % 2)
    total = 0.0
    if n_closed:
        d = s_next - r[:n_closed]
        total = float(np.sum(cum(d[0::2]) - cum(d[1::2])))
    if inside:
        total += cum(s_next - r[-1])
    return total


def _look_back(cum, y_tilde, H_w, s, left, prev_left, found, opts) -> float:
    """Place a transition for a corrected sample above ``H(width)``.

    Noiseless, this only happens by rounding and the edge sits on ``left``.
    Under noise it usually means an edge just before ``left`` was missed in
    the previous interval; if ``H`` keeps growing past the interval width and
    that interval emitted nothing, invert ``H`` on the two-interval span.
    Otherwise clamp, which puts the edge on ``left``.
    """
    if y_tilde - H_w <= opts.snap_eta:
        return left
    if found and found[-1] >= prev_left:
        return left
    span = s - prev_left
    H_span = cum(span)
    if H_span <= H_w:
        return left
    lag = invert_cumulative(cum, min(y_tilde, H_span), span, opts.inversion_tol)
    t = s - lag
    if found and t <= found[-1]:
        return left
    return min(t, left)


def _run(times: np.ndarray, values: np.ndarray, cum: CumulativeKernel,
         opts: RecoveryOptions) -> RecoveryResult:
    opts = opts.resolve(cum)
    h = cum.kernel
    h_floor = 1e-3 * h.sup_norm
    # without noise, sample rounding is what propagates
    base = opts.noise_level or ROUNDING_REL * (1.0 + cum.total_mass)
    found: list[float] = []
    # first-order position-error bound per recovered transition
    err: list[float] = []
    rows = []
    prev_left = left = 0.0
    for k, (s, y) in enumerate(zip(times, values)):
        width = s - left
        H_w = cum.H_T if width >= cum.period else cum(width)
        inside = bool(len(found) % 2)
        if not found:
            case, y_tilde = "1", y
        elif inside:
            case, y_tilde = "2a", predicted_contribution(found, True, cum, s) - y
        else:
            case, y_tilde = "2b", y - predicted_contribution(found, False, cum, s)
        budget = base
        if found:
            budget += float(np.sum(np.abs(h(s - np.asarray(found))) * np.asarray(err)))
        threshold = max(opts.eps_pos, budget)
        clamped = False
        emitted = math.nan
        if y_tilde > threshold:
            if y_tilde > H_w:
                clamped = True
                t = _look_back(cum, y_tilde, H_w, s, left, prev_left, found, opts)
            elif H_w - y_tilde <= opts.snap_eta:
                t = left
            else:
                u = min(invert_first_period(cum, y_tilde, opts.inversion_tol), width)
                t = s - u
            if t < s and (not found or t > found[-1]):
                found.append(float(t))
                err.append(budget / max(float(h(s - t)), h_floor))
                emitted = float(t)
        rows.append(DiagnosticRow(k + 1, case, float(y_tilde), clamped, emitted, threshold))
        prev_left, left = left, s
    arr = np.asarray(found, dtype=float)
    arr.setflags(write=False)
    return RecoveryResult(arr, bool(arr.size % 2), tuple(rows))


def recover(samples: SampleSet, cum: CumulativeKernel,
            opts: RecoveryOptions | None = None) -> RecoveryResult:
    """Recover transitions from uniform samples ``y_n = (x*h)(nT)``, ``n = 1..K``.

    All-zero (sub-threshold) samples yield the empty signal. A rising edge with
    no falling edge before the horizon is kept and flagged via ``open_box``.
    """
    if len(samples) == 0:
        raise NoSamples("samples: empty")
    if samples.period is None:
        raise PeriodMismatch("samples: not a uniform grid n*T; use recover_nonuniform")
    if not math.isclose(samples.period, cum.period, rel_tol=1e-12):
        raise PeriodMismatch(
            f"samples: period {samples.period!r} != kernel period {cum.period!r}")
    return _run(samples.times, samples.values, cum, opts or RecoveryOptions())


def recover_nonuniform(samples: SampleSet, cum: CumulativeKernel,
                       opts: RecoveryOptions | None = None) -> RecoveryResult:
    """Same induction on arbitrary instants with every gap (and ``s_1``) at most ``T``."""
    if len(samples) == 0:
        raise NoSamples("samples: empty")
    gaps = np.diff(np.concatenate(([0.0], samples.times)))
    limit = cum.period * (1 + 1e-12)
    if np.any(gaps > limit):
        i = int(np.argmax(gaps))
        raise DensityViolated(
            f"times: gap {gaps[i]!r} before sample {i + 1} exceeds period {cum.period!r}")
    return _run(samples.times, samples.values, cum, opts or RecoveryOptions())
