"""Competing Brownian particles: stationary gap laws, simulation, verification.

Systems of Brownian particles on the line whose drifts depend on current
rank admit explicit product-of-exponentials stationary distributions for
their gap process.  This package constructs those laws exactly (finite
systems, the one-parameter infinite family, and the finite approximating
systems), simulates ensembles with reproducible per-trajectory random
streams, and verifies the distributional claims statistically.
"""

from .backend import COMPILED
from .drifts import (
    BUILTIN_DRIFTS,
    DriftSpec,
    drift_values,
    inf_mean_drift,
    mean_drifts,
    partial_sums,
)
from .laws import (
    ApproximantSpec,
    GapLaw,
    StabilityError,
    StationarityBoundError,
    approximant,
    approximant_rates_direct,
    finite_stationary_rates,
    infinite_rates,
    positions_from_gaps,
    sample_gaps,
    stability_check,
    stationarity_bound,
)
from .ranking import RankPermutation, rank_permutation, ranked_and_gaps
from .rbm import (
    TridiagonalReflection,
    general_solution_residual,
    null_vector,
    particular_solution,
    reflection_apply,
)
from .rng import RngSpec
from .simulate import (
    OVERFLOW_LIMIT,
    LocalTimeEstimate,
    RecordSpec,
    SimConfig,
    SimulationOverflowError,
    Trajectory,
    reconstruct_ranked_decomposition,
    simulate_ensemble,
    step,
)
from .stats import (
    EULER_GAMMA,
    EnsembleSummary,
    GapKs,
    ObservableStat,
    growth_slope,
    kolmogorov_sf,
    ks_exponential,
    particle_count,
    position_deviation,
    singularity_statistic,
    singularity_terms,
    summarize,
)

__version__ = "0.1.0"
