"""Probing, selection, and transmission policies for multichannel
wireless links.

A transmitter faces n channels, each in a random quality state it can
learn exactly by paying a probing cost.  Each slot it decides which
channels to probe and in what order, then transmits on a probed
channel, gambles on an unprobed one, or stays quiet.  This package
builds policies for that slot game and checks them:

* exact closed forms for on/off channels (``two_state_opt``),
* fast level-list policies with a constant-factor guarantee for any
  number of states (``best_reserve_backup``),
* an equal-cost scheme that gets within an additive epsilon of the
  optimum (``additive_approx``),
* price-gated mixtures that hit a target transmission rate for lightly
  loaded queues (``solve_unsaturated``),
* a brute-force oracle for small instances (``exact_dp``), and a Monte
  Carlo simulator (``simulate_saturated``, ``simulate_unsaturated``)
  to close the loop.
"""

from .additive import (
    AdditiveCertificate,
    AdditiveResult,
    CandidateBudgetExceeded,
    EpsilonOutOfRange,
    PrefixTreePolicy,
    UnequalCosts,
    additive_approx,
    best_prefix_policy,
    shifted_rewards,
)
from .core import (
    BackupProbed,
    ChannelStats,
    GainReport,
    InconsistentLeaf,
    Instance,
    InstanceValidationError,
    LevelOutOfRange,
    PolicyStructureError,
    ProbingError,
    RepeatedProbe,
    TailStats,
    UnknownChannel,
    Violation,
    blind_backup_reward,
    evaluate_policy,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    round_floats,
    save_instance,
    tail_stats,
    validate_instance,
)
from .generate import (
    COST_REGIMES,
    PROB_SHAPES,
    GenSpec,
    counterexample_instance,
    generate,
)
from .lagrange import (
    BracketNotFound,
    DegenerateBound,
    MixedPolicy,
    MultiplierPair,
    RateBracket,
    RateOutOfRange,
    candidate_thresholds,
    find_rate_bracket,
    select_multiplier_pair,
    solve_unsaturated,
)
from .multi_state import (
    ThresholdPolicy,
    best_reserve_backup,
    check_policy_invariants,
    probe_floor,
    probe_levels,
    reserve_backup_policy,
)
from .oracle import (
    DecisionTree,
    MixCertificate,
    OracleOptions,
    OracleResult,
    RateConstrainedBound,
    StructureReport,
    TooLarge,
    altered_optimum,
    backup_structure_check,
    dual_certificate,
    exact_dp,
    rate_constrained_optimum,
    tree_to_dot,
)
from .simulator import (
    BernoulliArrivals,
    MarkovArrivals,
    SaturatedArrivals,
    SimConfig,
    SimReport,
    simulate_saturated,
    simulate_unsaturated,
)
from .two_state import (
    BackupScan,
    ExhaustPolicy,
    TwoStateRequired,
    determine_best_backup,
    probe_set,
    two_state_opt,
)

__version__ = "0.1.0"

_POLICY_KINDS = {
    "threshold": ThresholdPolicy,
    "exhaust": ExhaustPolicy,
    "prefix-tree": PrefixTreePolicy,
    "mixed": MixedPolicy,
    "decision-tree": DecisionTree,
}


def policy_from_dict(data: dict, instance: Instance | None = None):
    """Rebuild any serialized policy from its ``kind`` tag."""
    kind = data.get("kind")
    cls = _POLICY_KINDS.get(kind)
    if cls is None:
        raise ProbingError(f"unknown policy kind {kind!r}")
    return cls.from_dict(data, instance)
