"""Exact Wright-Fisher diffusion simulation and unbiased Monte Carlo MLE.

Thin Python wrapper over the C++ core: exact transition/bridge sampling of
the neutral diffusion, rejection sampling of selected paths, and the
frozen-randomness (simultaneous acceptance) likelihood estimator.
"""

from ._core import (  # noqa: F401
    CoupledModel,
    HaploidModel,
    MutationRates,
    RejectionBudgetError,
    TimeTooSmallError,
    TruncationBudgetError,
    __version__,
    estimate_haploid,
    loglik_curve,
    q_pmf,
    reduce_coupled_parameters,
    sample_block_counts,
    sample_bridge,
    sample_transition,
    selftest_quick,
    simulate_haploid,
    transition_density,
)

__all__ = [
    "CoupledModel",
    "HaploidModel",
    "MutationRates",
    "RejectionBudgetError",
    "TimeTooSmallError",
    "TruncationBudgetError",
    "__version__",
    "estimate_haploid",
    "loglik_curve",
    "q_pmf",
    "reduce_coupled_parameters",
    "sample_block_counts",
    "sample_bridge",
    "sample_transition",
    "selftest_quick",
    "simulate_haploid",
    "transition_density",
]
