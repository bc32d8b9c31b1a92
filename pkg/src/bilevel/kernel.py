"""Causal piecewise-polynomial sampling kernels and their cumulative integrals."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import BadSupport, NotCausal, NotPositive, OutOfRange, ReversedWindow

__all__ = [
    "PiecewisePolyKernel",
    "CumulativeKernel",
    "new_kernel",
    "cumulative",
    "invert_first_period",
    "invert_cumulative",
    "integrate_window",
    "box_kernel",
    "h0_kernel",
    "h1_kernel",
    "MAX_DEGREE",
    "random_pl_kernel",
]

MAX_DEGREE = 3
_SUPPORT_RTOL = 1e-12
_MAX_BISECT = 200


def _critical_points(coeffs: np.ndarray, length: float) -> np.ndarray:
    """Real roots of the derivative of a local polynomial that lie in (0, length)."""
    d = P.polyder(coeffs) if coeffs.size > 1 else np.zeros(1)
    d = np.trim_zeros(d, "b")
    if d.size < 2:
        return np.empty(0)
    roots = P.polyroots(d)
    roots = roots.real[np.abs(roots.imag) <= 1e-12 * max(1.0, length)]
    return np.sort(roots[(roots > 0) & (roots < length)])


@dataclass(frozen=True, eq=False)
class PiecewisePolyKernel:
    """Kernel ``h`` equal to ``pieces[j](t - breakpoints[j])`` on ``[b_j, b_{j+1})``, zero elsewhere.

    Pieces hold ascending-power coefficients in the local variable. Build with
    :func:`new_kernel`, which validates causality, support and positivity on
    ``(0, period)``.
    """

    breakpoints: np.ndarray
    pieces: tuple
    period: float
    sup_norm: float = field(default=float("nan"))

    @property
    def support_end(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def support_periods(self) -> int:
        """Integer M with support ``[0, M*period)``."""
        return int(round(self.support_end / self.period))

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        j = np.searchsorted(self.breakpoints, t_arr, side="right") - 1
        out = np.zeros(t_arr.shape)
        inside = (j >= 0) & (j < len(self.pieces))
        for k, c in enumerate(self.pieces):
            sel = inside & (j == k)
            if np.any(sel):
                out[sel] = P.polyval(t_arr[sel] - self.breakpoints[k], c)
        return float(out) if out.ndim == 0 else out

    def to_dict(self) -> dict:
        return {"breakpoints": self.breakpoints.tolist(),
                "pieces": [c.tolist() for c in self.pieces]}


def new_kernel(breakpoints: Sequence[float], pieces: Sequence[Sequence[float]],
               period: float) -> PiecewisePolyKernel:
    b = np.asarray(breakpoints, dtype=float).reshape(-1)
    T = float(period)
    if not T > 0:
        raise BadSupport(f"period: must be positive, got {period!r}")
    if b.size < 2:
        raise BadSupport("breakpoints: need at least two entries")
    if b[0] != 0.0:
        raise NotCausal(f"breakpoints: first breakpoint must be 0, got {b[0]!r}")
    if np.any(np.diff(b) <= 0):
        raise BadSupport("breakpoints: must be strictly increasing")
    if len(pieces) != b.size - 1:
        raise BadSupport(f"pieces: expected {b.size - 1} pieces, got {len(pieces)}")
    M = b[-1] / T
    if round(M) < 1 or abs(M - round(M)) > _SUPPORT_RTOL * max(1.0, M):
        raise BadSupport(f"breakpoints: support end {b[-1]!r} is not a multiple of period {T!r}")

    polys = []
    for j, c in enumerate(pieces):
        c = np.trim_zeros(np.asarray(c, dtype=float).reshape(-1), "b")
        if c.size == 0:
            c = np.zeros(1)
        if c.size - 1 > MAX_DEGREE:
            raise BadSupport(f"pieces[{j}]: degree {c.size - 1} exceeds {MAX_DEGREE}")
        if not np.all(np.isfinite(c)):
            raise BadSupport(f"pieces[{j}]: non-finite coefficient")
        c.setflags(write=False)
        polys.append(c)

    sup = 0.0
    for j, c in enumerate(polys):
        length = b[j + 1] - b[j]
        checks = np.concatenate(([0.0], _critical_points(c, length), [length]))
        sup = max(sup, float(np.max(np.abs(P.polyval(checks, c)))))
        _check_positive_piece(c, b[j], length, T, j)

    b.setflags(write=False)
    return PiecewisePolyKernel(b, tuple(polys), T, sup)


def _check_positive_piece(c, start, length, T, j):
    """Exact positivity of one piece on its overlap with (0, T).

    Between consecutive checkpoints (piece ends, derivative roots, T) the
    polynomial is monotone, so its values there plus one midpoint per
    sub-interval decide the sign on the whole open overlap.
    """
    lo, hi = 0.0, min(length, T - start)
    if hi <= 0:
        return
    pts = np.concatenate(([lo], _critical_points(c, length), [hi]))
    pts = np.unique(pts[(pts >= lo) & (pts <= hi)])
    mids = 0.5 * (pts[:-1] + pts[1:])
    interior = np.concatenate((pts[1:-1], mids))
    if start > 0:
        # h(start) itself lies in (0, T)
        interior = np.append(interior, 0.0)
    vals = P.polyval(interior, c)
    if np.any(vals <= 0):
        where = start + interior[int(np.argmin(vals))]
        raise NotPositive(f"pieces[{j}]: h({where:.17g}) = {np.min(vals):.6g} is not positive on (0, T)")
    # endpoint limits may vanish but not go negative
    if np.any(P.polyval(np.array([lo, hi]), c) < 0):
        raise NotPositive(f"pieces[{j}]: negative endpoint value inside [0, T]")


@dataclass(frozen=True, eq=False)
class CumulativeKernel:
    """Exact antiderivative ``H(t) = int_0^t h`` stored piecewise on the kernel breakpoints."""

    kernel: PiecewisePolyKernel
    offsets: np.ndarray       # H at each breakpoint
    antider: tuple            # local antiderivative pieces, zero at piece start
    H_T: float

    @property
    def period(self) -> float:
        return self.kernel.period

    @property
    def breakpoints(self) -> np.ndarray:
        return self.kernel.breakpoints

    @property
    def total_mass(self) -> float:
        return float(self.offsets[-1])

    def __call__(self, t):
        """H evaluated at ``t`` after clipping to ``[0, support_end]``."""
        b = self.kernel.breakpoints
        t_arr = np.clip(np.asarray(t, dtype=float), 0.0, b[-1])
        j = np.clip(np.searchsorted(b, t_arr, side="right") - 1, 0, len(self.antider) - 1)
        if t_arr.ndim == 0:
            jj = int(j)
            return float(self.offsets[jj] + P.polyval(t_arr - b[jj], self.antider[jj]))
        out = np.empty(t_arr.shape)
        for k, g in enumerate(self.antider):
            sel = j == k
            if np.any(sel):
                out[sel] = self.offsets[k] + P.polyval(t_arr[sel] - b[k], g)
        return out


def cumulative(kernel: PiecewisePolyKernel) -> CumulativeKernel:
    b = kernel.breakpoints
    antider = []
    offsets = [0.0]
    for j, c in enumerate(kernel.pieces):
        g = P.polyint(c)
        g.setflags(write=False)
        antider.append(g)
        offsets.append(offsets[-1] + float(P.polyval(b[j + 1] - b[j], g)))
    offsets = np.asarray(offsets)
    offsets.setflags(write=False)
    cum = CumulativeKernel(kernel, offsets, tuple(antider), float("nan"))
    object.__setattr__(cum, "H_T", cum(kernel.period))
    return cum


def _solve_quadratic(a1: float, a2: float, r: float) -> float:
    """Nonnegative root of ``a1*u + a2*u**2 = r`` for ``r >= 0`` (cancellation-free form)."""
    if r <= 0:
        return 0.0
    if a2 == 0.0:
        return r / a1
    disc = a1 * a1 + 4.0 * a2 * r
    if disc < 0:
        # only reachable through rounding at the piece's right end
        return -a1 / (2.0 * a2)
    return 2.0 * r / (a1 + np.sqrt(disc))


def invert_first_period(cum: CumulativeKernel, y: float, tol: float | None = None) -> float:
    """Return ``t`` in ``[0, T]`` with ``H(t) = y``.

    Linear and quadratic antiderivative pieces are inverted in closed form;
    higher degrees fall back to bisection down to an interval width of ``tol``
    (default ``1e-13 * T``).
    """
    return invert_cumulative(cum, y, cum.period, tol)


def invert_cumulative(cum: CumulativeKernel, y: float, upper: float,
                      tol: float | None = None) -> float:
    """Smallest ``t`` in ``[0, upper]`` with ``H(t) = y``; ``upper`` is at most the support end.

    Past the first period ``H`` may be flat (where ``h`` vanishes), hence the
    smallest preimage. :func:`invert_first_period` is the ``upper = T`` case.
    """
    T = cum.period
    y = float(y)
    upper = min(float(upper), cum.kernel.support_end)
    H_up = cum.H_T if upper == T else cum(upper)
    if not (0.0 <= y <= H_up):
        raise OutOfRange(f"y={y!r} outside [0, H({upper!r})={H_up!r}]")
    if y == 0.0:
        return 0.0
    if y == H_up and upper <= T:
        return upper
    if tol is None:
        tol = 1e-13 * T
    b = cum.breakpoints
    # first piece whose end offset reaches y; pieces start inside [0, upper)
    n_first = int(np.searchsorted(b, upper, side="left"))
    j = int(np.searchsorted(cum.offsets[1:n_first + 1], y, side="left"))
    j = max(0, min(j, n_first - 1))
    start = b[j]
    length = min(b[j + 1], upper) - start
    g = cum.antider[j]
    r = y - cum.offsets[j]
    if g.size <= 3:
        a1 = g[1] if g.size > 1 else 0.0
        a2 = g[2] if g.size > 2 else 0.0
        if a1 == 0.0 and a2 == 0.0:
            u = 0.0
        else:
            u = _solve_quadratic(a1, a2, r)
    else:
        lo, hi = 0.0, length
        for _ in range(_MAX_BISECT):
            if hi - lo <= tol:
                break
            mid = 0.5 * (lo + hi)
            if P.polyval(mid, g) < r:
                lo = mid
            else:
                hi = mid
        u = 0.5 * (lo + hi)
    return float(min(max(start + min(max(u, 0.0), length), 0.0), upper))


def integrate_window(cum: CumulativeKernel, a: float, b: float) -> float:
    """``int_a^b h`` with both limits clipped to the kernel support."""
    if a > b:
        raise ReversedWindow(f"window: a={a!r} > b={b!r}")
    if a == b:
        return 0.0
    return cum(b) - cum(a)


def box_kernel(period: float = 1.0, length: float | None = None) -> PiecewisePolyKernel:
    """Indicator ``chi_[0, length)``; ``length`` defaults to one period."""
    length = period if length is None else length
    return new_kernel([0.0, length], [[1.0]], period)


def h0_kernel(period: float = 1.0) -> PiecewisePolyKernel:
    """``(t+1)/2`` on ``[0,1)`` and ``2t-1`` on ``[1,2)``; the experiment kernel (T=1)."""
    return new_kernel([0.0, 1.0, 2.0], [[0.5, 0.5], [1.0, 2.0]], period)


def h1_kernel(period: float = 1.0) -> PiecewisePolyKernel:
    """``chi_[0, 2)``, the kernel of the instability examples."""
    return box_kernel(period, 2.0)


def random_pl_kernel(seed: int, period: float = 1.0, support_periods: int = 2,
                     knots_per_period: int = 3, value_range=(0.2, 2.0)) -> PiecewisePolyKernel:
    """Continuous piecewise-linear kernel with random node values.

    Node values inside ``[0, T]`` are drawn from ``value_range`` (so ``h > 0`` on
    ``(0, T)``); later nodes may also be zero. Deterministic in ``seed``.
    """
    rng = np.random.default_rng(seed)
    m = support_periods * knots_per_period
    b = np.linspace(0.0, support_periods * period, m + 1)
    lo, hi = value_range
    vals = rng.uniform(lo, hi, size=m + 1)
    tail = b > period
    vals[tail] *= rng.uniform(size=tail.sum()) > 0.2
    pieces = [[vals[j], (vals[j + 1] - vals[j]) / (b[j + 1] - b[j])] for j in range(m)]
    return new_kernel(b, pieces, period)
