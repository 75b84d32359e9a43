"""Spectral collaborative representation classification of multichannel streams."""
from .crc import Dictionary, RegressionOperator, ResidualVector, build_dictionary, classify, classify_batch
from .osc import OSCConfig, cluster_couple, solve_self_expression, spectral_cluster
from .pipeline import (
    ClassScheme,
    GestureCoupleRecording,
    LabelTimeline,
    PipelineConfig,
    StreamClassifier,
    TrainedModel,
    classify_stream,
    compare_crc_scrc,
    evaluate,
    train,
)
from .recording import EXTERNAL_LABELS, MultichannelRecording
from .spectral import eigenvalues_dense, eigenvalues_fast, extract_features, spectral_features
from .synthgen import SynthConfig, gen_couple, gen_sequence

__version__ = "0.1.0"
