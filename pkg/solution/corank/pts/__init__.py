"""
Probabilistic transition systems

This package contains:
- The system model and exact rational helpers
- Reachability, hitting times, discounted values and gamma sweeps
- Closed-form distributions over ℕ ∪ {∞}
- The four supermartingale flavors and their conversions
- Parameterized example families
"""

from .model import INF, PtsCoalgebra, ReachVector, support_graph, states_reaching
from .reach import (
    SweepResult,
    discounted_step,
    expected_hitting_time,
    gamma_sweep,
    pts_reach_exact,
    pts_reach_iter,
    reach_step,
    solve_discounted,
    sweep_to_csv,
)
from .tails import GeoTail, TailSpec
from .supermartingales import (
    AdditiveCert,
    ConversionResult,
    MultiplicativeCert,
    NonCountingCert,
    additive_step,
    check_additive,
    check_multiplicative,
    check_noncounting,
    convert_multiplicative,
    multiplicative_step,
    verify_additive_dominates,
)
from .distributions import DistCert, check_distribution_ranking, synthesize_hitting_distribution
from .families import (
    additive_fixed_witnesses,
    branching_ladder,
    ladder_distribution_cert,
    ladder_noncounting_cert,
    multiplicative_fixed_witnesses,
    two_fixed_point_pts,
)

__all__ = [
    "INF",
    "PtsCoalgebra",
    "ReachVector",
    "support_graph",
    "states_reaching",
    "SweepResult",
    "discounted_step",
    "expected_hitting_time",
    "gamma_sweep",
    "pts_reach_exact",
    "pts_reach_iter",
    "reach_step",
    "solve_discounted",
    "sweep_to_csv",
    "GeoTail",
    "TailSpec",
    "AdditiveCert",
    "ConversionResult",
    "MultiplicativeCert",
    "NonCountingCert",
    "additive_step",
    "check_additive",
    "check_multiplicative",
    "check_noncounting",
    "convert_multiplicative",
    "multiplicative_step",
    "verify_additive_dominates",
    "DistCert",
    "check_distribution_ranking",
    "synthesize_hitting_distribution",
    "additive_fixed_witnesses",
    "branching_ladder",
    "ladder_distribution_cert",
    "ladder_noncounting_cert",
    "multiplicative_fixed_witnesses",
    "two_fixed_point_pts",
]
