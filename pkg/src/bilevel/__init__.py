"""Exact sampling and recovery of bilevel causal signals through positive causal kernels."""
from .errors import *  # noqa: F401,F403
from .signal import (BilevelSignal, PerturbationSpec, evaluate, example1_signal,
                     max_local_rate, new_bilevel, perturb, random_signal, x0_signal)
from .kernel import (CumulativeKernel, PiecewisePolyKernel, box_kernel, cumulative,
                     h0_kernel, h1_kernel, integrate_window, invert_cumulative,
                     invert_first_period, new_kernel, random_pl_kernel)
from .sampler import SampleSet, add_bounded_noise, sample_at, sample_series, uniform_times
from .recovery import (RecoveryOptions, RecoveryResult, predicted_contribution, recover,
                       recover_nonuniform)
from .analysis import (ExperimentConfig, ExperimentReport, run_noise_experiment,
                       stability_bound, sup_sample_deviation, transition_error,
                       unit_box_example)

__version__ = "0.1.0"
