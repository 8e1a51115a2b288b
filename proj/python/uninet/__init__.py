"""Fuzzy logic networks whose trained gates read back as logic expressions."""

from ._uninet import (
    ConfigError,
    ContractError,
    Dataset,
    DataError,
    DomainError,
    Expr,
    ExtractionConfig,
    Network,
    NetworkConfig,
    NumericError,
    TrainConfig,
    binary_op,
    build_network,
    classify_alpha,
    cut,
    evaluate,
    extract,
    faithfulness,
    generate_synthetic,
    load_csv,
    load_network,
    negation,
    plant_network,
    preference_op,
    split,
    squash,
    train,
    truth_table,
)

__all__ = [
    "ConfigError",
    "ContractError",
    "Dataset",
    "DataError",
    "DomainError",
    "Expr",
    "ExtractionConfig",
    "Network",
    "NetworkConfig",
    "NumericError",
    "TrainConfig",
    "binary_op",
    "build_network",
    "classify_alpha",
    "cut",
    "evaluate",
    "extract",
    "faithfulness",
    "generate_synthetic",
    "load_csv",
    "load_network",
    "negation",
    "plant_network",
    "preference_op",
    "split",
    "squash",
    "train",
    "truth_table",
]
