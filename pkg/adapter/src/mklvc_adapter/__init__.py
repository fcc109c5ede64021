"""Waveform bridge for the mklvc converter: feature extraction to EMBF files
and vocoding back to audio. Talks to the converter exclusively through EMBF
files and its CLI."""

from .audio import load_wav, save_wav, to_16k_mono
from .embfile import read_features, write_features
from .errors import AdapterError, AudioError, FeatureFileError, ModelError
from .extract import FEATURE_DIM, FRAME_RATE, ExtractionConfig, extract
from .vocode import VocodeConfig, expected_duration_seconds, vocode

__version__ = "0.1.0"

__all__ = [
    "AdapterError",
    "AudioError",
    "ExtractionConfig",
    "FEATURE_DIM",
    "FRAME_RATE",
    "FeatureFileError",
    "ModelError",
    "VocodeConfig",
    "expected_duration_seconds",
    "extract",
    "load_wav",
    "read_features",
    "save_wav",
    "to_16k_mono",
    "vocode",
    "write_features",
]
