from .datasets import (
    BeamDataset,
    CellDataset,
    generate_beam_dataset,
    generate_cell_dataset,
)
from .metrics import nmse, predict_nonai, rsrp_difference, top1_accuracy
from .registry import (
    BEAM_PREDICTORS,
    CELL_PREDICTORS,
    PredictorSpec,
    build_beam_predictor,
    build_cell_predictor,
)
from .training import (
    TrainConfig,
    TrainedPredictor,
    TrainingDiverged,
    load_predictor,
    predict_beam_rsrp,
    predict_cell_l3,
    save_predictor,
    train_predictor,
)

__all__ = [
    "BeamDataset", "CellDataset", "generate_beam_dataset", "generate_cell_dataset",
    "nmse", "predict_nonai", "rsrp_difference", "top1_accuracy",
    "BEAM_PREDICTORS", "CELL_PREDICTORS", "PredictorSpec",
    "build_beam_predictor", "build_cell_predictor",
    "TrainConfig", "TrainedPredictor", "TrainingDiverged",
    "load_predictor", "predict_beam_rsrp", "predict_cell_l3",
    "save_predictor", "train_predictor",
]
