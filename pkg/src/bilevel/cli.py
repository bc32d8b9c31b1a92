"""Command-line front end: ``bilevel {sample,recover,experiment,bound-check,demo}``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .analysis import (ExperimentConfig, run_noise_experiment, stability_bound,
                       sup_sample_deviation, unit_box_example)
from .errors import BilevelError
from .kernel import cumulative, new_kernel
from .recovery import RecoveryOptions, recover, recover_nonuniform
from .sampler import add_bounded_noise, sample_series, uniform_times
from .signal import PerturbationSpec, max_local_rate, perturb

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INCOMPLETE = 3


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise argparse.ArgumentTypeError(f"no such file: {path}")
    return p


def _writable(path: str) -> Path:
    p = Path(path)
    if not p.parent.exists():
        raise argparse.ArgumentTypeError(f"directory does not exist: {p.parent}")
    return p


def _nonneg(text: str) -> float:
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text}")
    return v


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bilevel",
                                description="Sample and recover bilevel causal signals.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="exact kernel samples of a signal, optionally noisy")
    s.add_argument("--signal", type=_existing, required=True)
    s.add_argument("--kernel", type=_existing, required=True)
    s.add_argument("--period", type=_positive, required=True)
    s.add_argument("--count", type=int, help="number of uniform samples n*T, n = 1..count")
    s.add_argument("--times", type=_existing, help="explicit sampling instants (CSV)")
    s.add_argument("--noise", type=_nonneg, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", type=_writable, required=True)

    r = sub.add_parser("recover", help="recover transitions from a samples CSV")
    r.add_argument("--samples", type=_existing, required=True)
    r.add_argument("--kernel", type=_existing, required=True)
    r.add_argument("--period", type=_positive, required=True)
    r.add_argument("--eps-pos", type=_nonneg)
    r.add_argument("--snap", type=_nonneg)
    r.add_argument("--tol", type=_nonneg)
    r.add_argument("--noise", type=_nonneg, default=0.0,
                   help="known noise bound; enables the propagated detection threshold")
    r.add_argument("--out", type=_writable, required=True)
    r.add_argument("--diag", type=_writable)

    e = sub.add_parser("experiment", help="seeded Monte Carlo noise sweep")
    e.add_argument("--config", type=_existing, required=True)
    e.add_argument("--out", type=_writable, required=True)
    e.add_argument("--raw", type=_writable)
    e.add_argument("--svg", type=_writable)

    b = sub.add_parser("bound-check", help="random perturbations against the sampling-error bound")
    b.add_argument("--signal", type=_existing, required=True)
    b.add_argument("--kernel", type=_existing, required=True)
    b.add_argument("--period", type=_positive, required=True)
    b.add_argument("--delta", type=_nonneg, required=True)
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)

    d = sub.add_parser("demo", help="unit-box instability examples")
    d.add_argument("--example", type=int, choices=(1, 2), required=True)
    d.add_argument("--epsilon", type=_positive, required=True)
    d.add_argument("--count", type=int, default=50)
    return p


def _cmd_sample(a) -> int:
    signal = io.read_signal(a.signal)
    cum = cumulative(io.read_kernel(a.kernel, a.period))
    if a.times is not None:
        times = io.read_times(a.times)
    elif a.count is not None and a.count >= 1:
        times = uniform_times(a.period, a.count)
    else:
        raise BilevelError("count: give --count >= 1 or --times")
    samples = sample_series(signal, cum, times)
    if a.noise > 0:
        samples = add_bounded_noise(samples, a.noise, a.seed)
    io.write_samples(samples, a.out)
    return EXIT_OK


def _cmd_recover(a) -> int:
    samples = io.read_samples(a.samples, a.noise)
    cum = cumulative(io.read_kernel(a.kernel, a.period))
    if a.noise > 0:
        base = RecoveryOptions.for_noise(a.noise, cum)
    else:
        base = RecoveryOptions()
    opts = RecoveryOptions(
        eps_pos=base.eps_pos if a.eps_pos is None else a.eps_pos,
        snap_eta=base.snap_eta if a.snap is None else a.snap,
        inversion_tol=a.tol,
        noise_level=base.noise_level,
    )
    if samples.is_uniform and math.isclose(samples.period, a.period, rel_tol=1e-12):
        result = recover(samples, cum, opts)
    else:
        result = recover_nonuniform(samples, cum, opts)
    extra = {}
    if result.open_box:
        extra = {"open_box": True, "pending_rising_edge": float(result.transitions[-1])}
    io.write_signal(result.signal, a.out, **extra)
    if a.diag is not None:
        io.write_diagnostics(result, a.diag)
    if result.open_box:
        print(f"open box: rising edge at {io.fmt(result.transitions[-1])} has no falling edge "
              "before the last sample", file=sys.stderr)
        return EXIT_INCOMPLETE
    return EXIT_OK


_CONFIG_KEYS = {"master_seed", "trials", "delta_grid", "delta_max", "delta_steps", "box_count",
                "gap_range", "first_transition_range", "kernel", "period", "sample_count",
                "fixed_signal", "eps_pos", "snap_eta", "propagate_threshold"}


def config_from_dict(data: dict) -> ExperimentConfig:
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise BilevelError(f"config: unknown field(s) {', '.join(sorted(unknown))}")
    kw = {k: data[k] for k in data if k not in ("kernel", "delta_max", "delta_steps")}
    period = float(data.get("period", 1.0))
    if "kernel" in data:
        k = data["kernel"]
        if not isinstance(k, dict) or "breakpoints" not in k or "pieces" not in k:
            raise BilevelError("config: field 'kernel' needs 'breakpoints' and 'pieces'")
        kw["kernel"] = new_kernel(k["breakpoints"], k["pieces"], period)
    if "delta_grid" not in data and ("delta_max" in data or "delta_steps" in data):
        kw["delta_grid"] = tuple(np.linspace(0.0, float(data.get("delta_max", 0.03)),
                                             int(data.get("delta_steps", 31))).tolist())
    for key in ("gap_range", "first_transition_range", "delta_grid"):
        if key in kw:
            kw[key] = tuple(kw[key])
    try:
        return ExperimentConfig(**kw)
    except TypeError as exc:
        raise BilevelError(f"config: {exc}") from exc


def _cmd_experiment(a) -> int:
    try:
        data = json.loads(Path(a.config).read_text())
    except json.JSONDecodeError as exc:
        raise io.FormatError(f"{a.config}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise io.FormatError(f"{a.config}: expected a JSON object")
    report = run_noise_experiment(config_from_dict(data))
    io.write_report(report, a.out)
    if a.raw is not None:
        io.write_raw(report, a.raw)
    if a.svg is not None:
        Path(a.svg).write_text(io.report_svg(report))
    failures = sum(r.failures for r in report.rows)
    for r in report.rows:
        print(f"delta={r.delta:.4f}  max_P={r.max_P:.6f}  mean_P={r.mean_P:.6f}  failures={r.failures}")
    return EXIT_INCOMPLETE if failures else EXIT_OK


def _cmd_bound_check(a) -> int:
    signal = io.read_signal(a.signal)
    kernel = io.read_kernel(a.kernel, a.period)
    cum = cumulative(kernel)
    rate = max_local_rate(signal)
    bound = stability_bound(kernel, rate, a.period, a.delta)
    rng = np.random.default_rng(a.seed)
    last = signal.transitions[-1] if len(signal) else 0.0
    count = math.ceil((last + a.delta) / a.period) + kernel.support_periods + 1
    worst, violations = 0.0, 0
    for _ in range(a.trials):
        d = rng.uniform(-a.delta, a.delta, size=len(signal))
        if len(signal):
            # keep the perturbed signal causal
            d[0] = max(d[0], -signal.transitions[0])
        dev = sup_sample_deviation(signal, perturb(signal, PerturbationSpec(d)), cum,
                                   a.period, count)
        worst = max(worst, dev)
        violations += dev > bound + 1e-12
    print(f"rate={rate:.6g}  bound={io.fmt(bound)}  worst={io.fmt(worst)}  "
          f"trials={a.trials}  violations={violations}")
    return EXIT_INCOMPLETE if violations else EXIT_OK


def _cmd_demo(a) -> int:
    out = unit_box_example(a.example, a.epsilon, a.count)
    print(f"example {a.example}, epsilon={a.epsilon:g}, samples n=1..{a.count}")
    print(f"sup_(2<=n<={a.count}) |sample difference| = {out.sup_from_2:.6g}")
    print(f"indices with differing samples: {out.differing_indices.tolist()}")
    print("i  transition_difference")
    for i, dev in enumerate(out.transition_dev[:a.count], start=1):
        print(f"{i:<3d}{dev:.6g}")
    return EXIT_OK


_COMMANDS = {
    "sample": _cmd_sample,
    "recover": _cmd_recover,
    "experiment": _cmd_experiment,
    "bound-check": _cmd_bound_check,
    "demo": _cmd_demo,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (BilevelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
