from qexgan.conditions.ball_tree import (
    BallTree,
    NearestResult,
    build_ball_tree,
    nearest,
)
from qexgan.conditions.strategies import (
    ConditionContext,
    ConditionTable,
    ConditionVector,
    build_condition_context,
    make_condition,
    precompute_condition_table,
    read_condition_table,
    write_condition_table,
)
from qexgan.conditions.tfidf import TfIdfModel, fit_tfidf


__all__ = [
    "BallTree",
    "NearestResult",
    "build_ball_tree",
    "nearest",
    "ConditionContext",
    "ConditionTable",
    "ConditionVector",
    "build_condition_context",
    "make_condition",
    "precompute_condition_table",
    "read_condition_table",
    "write_condition_table",
    "TfIdfModel",
    "fit_tfidf",
]
