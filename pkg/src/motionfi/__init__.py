"""Backscatter envelope simulation, repetition counting, and motion classification.

The pipeline: synthesize (or record) an I/Q trace, extract its smoothed
amplitude envelope, count motion cycles by jointly optimizing a
segmentation and a motion template, then classify each cycle with a
cubic-kernel one-vs-one SVM and majority voting.
"""
from .backscatter import (
    CarrierConfig,
    GroundTruth,
    IqTrace,
    LinkBudget,
    Scatterer,
    Scene,
    differential_rcs,
    reflection_coefficient,
    scattered_power,
    scattered_power_given_rcs,
    square_wave_harmonics,
    synth_trace,
)
from .dsp import Envelope, FilterSpec, design_lowpass, energy, lowpass, normalize, warp_spline
from .errors import (
    DataError,
    DegenerateRangeError,
    FilterSpecError,
    InfeasibleSegmentationError,
    InputError,
    MotionFiError,
    NumericError,
    SceneError,
    TrainingError,
)
from .evaluate import EvalReport, cross_validate, stratified_folds
from .features import FEATURE_NAMES, FeatureVector, extract_features
from .segmenter import (
    MotionSegmenter,
    Segmentation,
    SegmentationResult,
    SegmenterConfig,
    count_error_ratio,
    dist_to_template,
    dtw,
    segment_motions,
    update_segmentation,
    update_template,
)
from .svm import (
    CubicSvmClassifier,
    LabeledDataset,
    OvoSvmModel,
    PairwiseSvm,
    cubic_kernel,
    cubic_kernel_matrix,
    predict,
    smo_solve,
    train,
)
from .voting import VoteConfig, vote, vote_correct_prob

__version__ = "0.1.0"

__all__ = [
    "CarrierConfig",
    "CubicSvmClassifier",
    "DataError",
    "DegenerateRangeError",
    "EvalReport",
    "Envelope",
    "FEATURE_NAMES",
    "FeatureVector",
    "FilterSpec",
    "FilterSpecError",
    "GroundTruth",
    "InfeasibleSegmentationError",
    "InputError",
    "IqTrace",
    "LabeledDataset",
    "LinkBudget",
    "MotionFiError",
    "MotionSegmenter",
    "NumericError",
    "OvoSvmModel",
    "PairwiseSvm",
    "Scatterer",
    "Scene",
    "SceneError",
    "Segmentation",
    "SegmentationResult",
    "SegmenterConfig",
    "TrainingError",
    "VoteConfig",
    "count_error_ratio",
    "cross_validate",
    "cubic_kernel",
    "cubic_kernel_matrix",
    "design_lowpass",
    "differential_rcs",
    "dist_to_template",
    "dtw",
    "energy",
    "extract_features",
    "lowpass",
    "normalize",
    "predict",
    "reflection_coefficient",
    "scattered_power",
    "scattered_power_given_rcs",
    "segment_motions",
    "smo_solve",
    "square_wave_harmonics",
    "stratified_folds",
    "synth_trace",
    "train",
    "update_segmentation",
    "update_template",
    "vote",
    "vote_correct_prob",
    "warp_spline",
]
