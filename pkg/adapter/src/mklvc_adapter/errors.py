class AdapterError(Exception):
    """Base class for adapter failures (bad audio, bad files, model loading)."""


class AudioError(AdapterError):
    """Unreadable or unsupported waveform input."""


class FeatureFileError(AdapterError):
    """Malformed EMBF container or wrong payload for the operation."""


class ModelError(AdapterError):
    """Encoder or vocoder backend could not be loaded or run."""
