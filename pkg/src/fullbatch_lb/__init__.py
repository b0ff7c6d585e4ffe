"""Desk-scale laboratory for the generalization gap of full-batch methods.

Builds the hard convex instance family, its full-batch first-order oracle,
the span/projection machinery behind the lower-bound argument, a random
orthogonal embedding with leakage and arbitration probes, an algorithm zoo,
and a reproducible experiment harness.
"""

from .instance import (
    ConstructionParams,
    Variant,
    canonical_params,
    g_subgrad,
    g_value,
    hinge,
    loss_subgrad,
    loss_value,
    nemirovski_subgrad,
    nemirovski_value,
    perturbation_vector,
)
from .oracle import (
    OracleAnswer,
    RiskEstimate,
    excess_risk,
    full_batch_oracle,
    population_risk,
    sample_oracle,
)
from .rng import stream
from .sampling import (
    Sample,
    concentration_probe,
    draw_sample,
    mean_perturbation,
    survivor_set,
    top_survivors,
)

__version__ = "0.1.0"
