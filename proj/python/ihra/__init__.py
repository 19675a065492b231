"""Hybrid random access simulator with an attention-LSTM URLLC traffic predictor."""

from ._core import (
    DEFAULT_QUANTUM_M,
    RESULT_CSV_HEADER,
    ConfigError,
    ExperimentSpec,
    IoError,
    PredictorModel,
    TrainingOptions,
    annulus_count,
    evaluate,
    ihra_slot,
    parse_spec,
    peak_targets,
    poisson_series,
    preset_fig4,
    preset_fig5,
    round_prediction,
    run_experiment,
    run_experiment_csv,
    sic_decode,
    subcarrier_start,
    ta_index,
    tara_slot,
    train,
    urllc_round,
)

__all__ = [name for name in dir() if not name.startswith("_")]
