"""On-disk formats: signal/kernel JSON, sample and diagnostics CSV, report CSV and SVG."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import BilevelError
from .kernel import PiecewisePolyKernel, new_kernel
from .sampler import SampleSet, detect_period, uniform_times
from .signal import BilevelSignal, new_bilevel

__all__ = [
    "FormatError", "fmt", "signal_to_json", "read_signal", "write_signal",
    "kernel_to_json", "read_kernel", "write_kernel", "read_samples", "write_samples",
    "read_times", "write_diagnostics", "write_report", "write_raw", "report_svg",
]


class FormatError(BilevelError):
    """Malformed JSON or CSV input."""


def fmt(x: float) -> str:
    """17 significant digits: enough for an exact double round trip."""
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(float(x), ".17g")


def _load_json(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise FormatError(f"{path}: expected a JSON object")
    return data


def _dump_json(obj, path) -> None:
    # json emits repr() for floats, which already round-trips exactly
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def signal_to_json(signal: BilevelSignal) -> dict:
    return {"transitions": [float(t) for t in signal.transitions]}


def read_signal(path) -> BilevelSignal:
    data = _load_json(path)
    if "transitions" not in data or not isinstance(data["transitions"], list):
        raise FormatError(f"{path}: field 'transitions' missing or not a list")
    try:
        values = [float(v) for v in data["transitions"]]
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{path}: field 'transitions' has a non-numeric entry") from exc
    return new_bilevel(values)


def write_signal(signal: BilevelSignal, path, **extra) -> None:
    _dump_json({**signal_to_json(signal), **extra}, path)


def kernel_to_json(kernel: PiecewisePolyKernel) -> dict:
    return kernel.to_dict()


def read_kernel(path, period: float) -> PiecewisePolyKernel:
    data = _load_json(path)
    for key in ("breakpoints", "pieces"):
        if key not in data or not isinstance(data[key], list):
            raise FormatError(f"{path}: field '{key}' missing or not a list")
    try:
        return new_kernel(data["breakpoints"], data["pieces"], period)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, BilevelError):
            raise
        raise FormatError(f"{path}: fields 'breakpoints'/'pieces' malformed ({exc})") from exc


def write_kernel(kernel: PiecewisePolyKernel, path) -> None:
    _dump_json(kernel_to_json(kernel), path)


def write_samples(samples: SampleSet, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "t", "y"])
        for n, (t, y) in enumerate(zip(samples.times, samples.values), start=1):
            w.writerow([n, fmt(t), fmt(y)])


def _read_csv(path, required) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise FormatError(f"{path}: empty CSV")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise FormatError(f"{path}: missing column(s) {', '.join(missing)}")
        return list(reader)


def read_samples(path, noise_level: float = 0.0) -> SampleSet:
    rows = _read_csv(path, ("n", "t", "y"))
    times, values = [], []
    for i, row in enumerate(rows, start=2):
        try:
            times.append(float(row["t"]))
            values.append(float(row["y"]))
        except (TypeError, ValueError) as exc:
            raise FormatError(f"{path}: line {i}: non-numeric 't' or 'y'") from exc
    t = np.asarray(times)
    period = detect_period(t)
    if period is not None:
        t = uniform_times(period, t.size)
    return SampleSet(t, np.asarray(values), period, noise_level)


def read_times(path) -> np.ndarray:
    """Sampling instants from a CSV with a ``t`` column, or one number per line."""
    text = Path(path).read_text().split()
    if text and text[0].split(",")[0].strip() in ("t", "n"):
        rows = _read_csv(path, ("t",))
        vals = [row["t"] for row in rows]
    else:
        vals = [line.split(",")[0] for line in text]
    try:
        return np.asarray([float(v) for v in vals])
    except ValueError as exc:
        raise FormatError(f"{path}: non-numeric sampling time") from exc


def write_diagnostics(result, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "case", "y_corrected", "clamped", "emitted_t"])
        for r in result.diagnostics:
            w.writerow([r.n, r.case, fmt(r.y_corrected), int(r.clamped),
                        "" if math.isnan(r.emitted_t) else fmt(r.emitted_t)])


def write_report(report, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["delta", "max_P", "mean_P", "failures"])
        for r in report.rows:
            w.writerow([fmt(r.delta), fmt(r.max_P), fmt(r.mean_P), r.failures])


def write_raw(report, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["delta", "trial", "P", "failed"])
        for r in report.trials:
            w.writerow([fmt(r.delta), r.trial, fmt(r.P), int(r.failed)])


def report_svg(report, width: int = 480, height: int = 300) -> str:
    """Max (solid) and mean (dashed) transition error against noise level."""
    rows = [r for r in report.rows if not math.isnan(r.max_P)]
    pad_l, pad_r, pad_t, pad_b = 56, 16, 16, 40
    x_hi = max((r.delta for r in report.rows), default=1.0) or 1.0
    y_hi = max((r.max_P for r in rows), default=1.0) or 1.0
    pw, ph = width - pad_l - pad_r, height - pad_t - pad_b

    def X(d):
        return pad_l + pw * d / x_hi

    def Y(p):
        return pad_t + ph * (1.0 - p / y_hi)

    def poly(attr, style):
        pts = " ".join(f"{X(r.delta):.2f},{Y(getattr(r, attr)):.2f}" for r in rows)
        return f'<polyline fill="none" stroke="black" stroke-width="1.5"{style} points="{pts}"/>'

    x0, y0 = pad_l, pad_t + ph
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<line x1="{x0}" y1="{y0}" x2="{x0 + pw}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{pad_t}" stroke="black"/>',
        f'<text x="{x0 + pw / 2:.0f}" y="{height - 8}" font-size="12" text-anchor="middle">noise level</text>',
        f'<text x="{x0 - 4}" y="{y0 + 14}" font-size="10" text-anchor="end">0</text>',
        f'<text x="{x0 + pw}" y="{y0 + 14}" font-size="10" text-anchor="end">{x_hi:g}</text>',
        f'<text x="{x0 - 4}" y="{pad_t + 10}" font-size="10" text-anchor="end">{y_hi:.3g}</text>',
        f'<text x="14" y="{pad_t + ph / 2:.0f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 14 {pad_t + ph / 2:.0f})">P</text>',
        poly("max_P", ""),
        poly("mean_P", ' stroke-dasharray="6,4"'),
        "</svg>",
    ]
    return "\n".join(parts) + "\n"
