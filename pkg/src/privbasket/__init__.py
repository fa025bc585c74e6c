"""Privacy-preserving frequent itemset mining over distorted boolean data.

Workflow: generate or load a transaction database, distort it with
per-symbol keep probabilities (p for 1s, q for 0s), mine the distortion
while reconstructing true supports, and quantify the privacy/accuracy
trade-off. See the cli module for the command-line surface.
"""

__version__ = "0.1.0"

from .apriori import (
    FrequentLattice,
    count_all_ones,
    generate_candidates,
    mine,
)
from .corpus import (
    DatasetStats,
    GenParams,
    TransactionDatabase,
    compute_stats,
    generate_synthetic,
    load_bitmatrix,
    load_itemlist,
    save_bitmatrix,
    save_itemlist,
)
from .distortion import DistortionParams, distort_database, distort_tuple, expected_row_length
from .errors import (
    ConfigError,
    DegenerateInputError,
    DomainError,
    EmptyDatabaseError,
    FormatError,
    InternalConsistencyError,
    PrivBasketError,
    ReconstructionError,
)
from .evaluation import (
    ExperimentReport,
    identity_errors,
    per_level_breakdown,
    run_experiment,
    slowdown,
    support_error,
)
from .planner import (
    PlanThresholds,
    candidate_grid,
    plan_report,
    relative_error_estimate,
    stddev_distorted_ones,
)
from .privacy import (
    PrivacyReport,
    basic_privacy,
    breach_table,
    privacy_grid,
    reconstruction_prob_item,
    reinterrogated_privacy,
)
from .recon import (
    CombinationCounts,
    TransitionMatrix,
    build_transition_matrix,
    combination_counts,
    mine_distorted,
    reconstructed_support,
    solve_true_counts,
)
