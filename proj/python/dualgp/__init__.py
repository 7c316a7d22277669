"""Sparse variational Gaussian processes in the dual parameterization.

The heavy lifting lives in the compiled extension ``_dualgp``; this package
re-exports its surface. States are immutable value objects: every operation
returns a new state, so fitted models can be shared freely.
"""

try:
    # Wheel layout: the extension is installed inside this package.
    from ._dualgp import (
        ConfigError,
        DualState,
        NumericalError,
        dual_condition,
        elbo,
        expected_improvement,
        fantasize_batch,
        fit,
        generate_banana,
        load_csv,
        make_state,
        maximize_acquisition,
        natgrad_step,
        partition_stream,
        predict,
        predict_full_cov,
        predict_y,
        run_streaming_summary,
        save_csv,
        state_from_json,
        state_to_json,
        success_probability,
        to_moments,
    )
except ImportError:
    # In-tree builds put the extension next to the build artifacts instead.
    from _dualgp import (
        ConfigError,
        DualState,
        NumericalError,
        dual_condition,
        elbo,
        expected_improvement,
        fantasize_batch,
        fit,
        generate_banana,
        load_csv,
        make_state,
        maximize_acquisition,
        natgrad_step,
        partition_stream,
        predict,
        predict_full_cov,
        predict_y,
        run_streaming_summary,
        save_csv,
        state_from_json,
        state_to_json,
        success_probability,
        to_moments,
    )

__all__ = [
    "ConfigError",
    "DualState",
    "NumericalError",
    "dual_condition",
    "elbo",
    "expected_improvement",
    "fantasize_batch",
    "fit",
    "generate_banana",
    "load_csv",
    "make_state",
    "maximize_acquisition",
    "natgrad_step",
    "partition_stream",
    "predict",
    "predict_full_cov",
    "predict_y",
    "run_streaming_summary",
    "save_csv",
    "state_from_json",
    "state_to_json",
    "success_probability",
    "to_moments",
]

__version__ = "0.1.0"
