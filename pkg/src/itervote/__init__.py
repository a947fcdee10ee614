"""Iterative Plurality voting under distance-based strict uncertainty."""

from .model import (Behavior, Population, PreferenceOrder, ScoreVector,
                    StructureError, UtilityScale, VoterType, as_rat,
                    is_eps_valid, scores_of, truthful_profile, winner)
from .uncertainty import (BeliefBall, Metric, ScoreRange, UnsupportedMetric,
                          ball_enumerate, feasible_tie_sets, possible_winners,
                          score_range, threshold_winners, tie_set_feasible)
from .strategy import (ConfigurationError, ViewPoint, dominating_set,
                       ld_response, make_view, modified_outcome, regret,
                       response, s_beats, s_dominates, wcr, wcr_response,
                       wcr_values)
from .dynamics import (Game, MoveKind, MoveRecord, Outcome, RunConfig,
                       Scheduler, Trace, check_truthful_invariants,
                       classify_move, is_equilibrium, run, step)

__version__ = "0.1.0"

__all__ = [
    "Behavior",
    "BeliefBall",
    "ConfigurationError",
    "Game",
    "Metric",
    "MoveKind",
    "MoveRecord",
    "Outcome",
    "Population",
    "PreferenceOrder",
    "RunConfig",
    "Scheduler",
    "ScoreRange",
    "ScoreVector",
    "StructureError",
    "Trace",
    "UnsupportedMetric",
    "UtilityScale",
    "ViewPoint",
    "VoterType",
    "as_rat",
    "ball_enumerate",
    "check_truthful_invariants",
    "classify_move",
    "dominating_set",
    "feasible_tie_sets",
    "is_eps_valid",
    "is_equilibrium",
    "ld_response",
    "make_view",
    "modified_outcome",
    "possible_winners",
    "regret",
    "response",
    "run",
    "s_beats",
    "s_dominates",
    "score_range",
    "scores_of",
    "step",
    "threshold_winners",
    "tie_set_feasible",
    "truthful_profile",
    "wcr",
    "wcr_response",
    "wcr_values",
    "winner",
]
