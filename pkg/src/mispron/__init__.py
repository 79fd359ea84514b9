"""Word-level mispronunciation detection by comparing an utterance with its voice clone."""

from .calibration import CalibrationModel, calibrate
from .detector import DecisionStrategy, Label, WordVerdict, detect_utterance
from .distance import NormalizationStrategy, word_distance
from .dtw import dtw_joint, dtw_per_coefficient
from .mfcc import MfccConfig, default_config, extract_mfcc
from .textgrid import extract_word_alignments, parse_textgrid

__all__ = [
    "CalibrationModel",
    "DecisionStrategy",
    "Label",
    "MfccConfig",
    "NormalizationStrategy",
    "WordVerdict",
    "calibrate",
    "default_config",
    "detect_utterance",
    "dtw_joint",
    "dtw_per_coefficient",
    "extract_mfcc",
    "extract_word_alignments",
    "parse_textgrid",
    "word_distance",
]
