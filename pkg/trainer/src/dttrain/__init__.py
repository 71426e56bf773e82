from .training import (
    ColumnCodec,
    TrainedTree,
    TrainingConfig,
    TrainingError,
    build_codec,
    load_csv,
    train,
    train_and_export,
)

__version__ = "0.1.0"

__all__ = [
    "ColumnCodec",
    "TrainedTree",
    "TrainingConfig",
    "TrainingError",
    "build_codec",
    "load_csv",
    "train",
    "train_and_export",
]
