"""Rank-preference evaluation of matrix-completion recommenders.

Thin Python layer over the C++ core: loaders, shift/unit-consistent and
truncated-SVD completion, the pair-withholding discordance harness, and the
consensus-order audit.
"""

from ._rankpref import (
    ConfigError,
    ConsistencyModel,
    DataError,
    DiscordanceReport,
    PredictionError,
    SparseRatingMatrix,
    SvdModel,
    WithholdingPlan,
    audit_consensus_order,
    connected_components,
    count_discordant,
    fit_sc,
    fit_svd,
    fit_uc,
    load_csv,
    load_movielens,
    remove_entries,
    run_experiment,
    run_experiment_config,
    select_pairs,
    write_csv,
)

__all__ = [
    "ConfigError",
    "ConsistencyModel",
    "DataError",
    "DiscordanceReport",
    "PredictionError",
    "SparseRatingMatrix",
    "SvdModel",
    "WithholdingPlan",
    "audit_consensus_order",
    "connected_components",
    "count_discordant",
    "fit_sc",
    "fit_svd",
    "fit_uc",
    "load_csv",
    "load_movielens",
    "remove_entries",
    "run_experiment",
    "run_experiment_config",
    "select_pairs",
    "write_csv",
]
