"""Waveform -> frame-embedding extraction.

Two interchangeable backends produce T x 1024 features at ~50 frames/s from
16 kHz mono audio:

* ``wavlm``: WavLM-Large hidden states (default layer 6) via transformers.
  Loaded lazily; needs the checkpoint available locally or downloadable.
* ``stub``: a deterministic DSP pipeline (log spectra through a fixed seeded
  projection). No model weights; same frame-rate and dimension contract.
  Used by tests and the bundled demo, and useful for pipeline dry runs.

Both are deterministic for a fixed input and configuration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import audio, embfile
from .errors import AudioError, ModelError

FEATURE_DIM = 1024
FRAME_RATE = 50
HOP = audio.TARGET_RATE // FRAME_RATE  # 320 samples
STUB_WINDOW = 400
STUB_FFT = 512
_STUB_PROJECTION_SEED = 1024_50  # fixed: the stub must be reproducible everywhere


@dataclass(frozen=True)
class ExtractionConfig:
    model_id: str = "microsoft/wavlm-large"
    layer_index: int = 6
    device: str = "cpu"
    backend: str = "wavlm"

    def __post_init__(self):
        if self.backend not in ("wavlm", "stub"):
            raise ModelError(f"unknown extraction backend {self.backend!r}")
        if self.layer_index < 0:
            raise ModelError("layer_index must be >= 0")


class StubExtractor:
    """Deterministic spectral features with the encoder's frame contract."""

    def __init__(self):
        rng = np.random.default_rng(_STUB_PROJECTION_SEED)
        bins = STUB_FFT // 2 + 1
        self._projection = rng.standard_normal((bins, FEATURE_DIM)) / np.sqrt(bins)
        # Decaying per-dimension scale, so downstream variance sorting has
        # structure to work with.
        self._scales = np.geomspace(1.0, 1e-2, FEATURE_DIM)
        self._window = np.hanning(STUB_WINDOW)

    def features(self, waveform: np.ndarray) -> np.ndarray:
        n = waveform.shape[0]
        if n < STUB_WINDOW:
            waveform = np.pad(waveform, (0, STUB_WINDOW - n))
            n = waveform.shape[0]
        n_frames = 1 + (n - STUB_WINDOW) // HOP
        frames = np.lib.stride_tricks.sliding_window_view(waveform, STUB_WINDOW)[::HOP][:n_frames]
        spectra = np.abs(np.fft.rfft(frames * self._window, n=STUB_FFT, axis=1))
        feats = np.log1p(spectra) @ self._projection
        return (feats * self._scales).astype(np.float32)


class WavLmExtractor:
    """Hidden-state features from a WavLM encoder checkpoint.

    ``model`` can be injected (mainly for tests); otherwise transformers is
    imported and the checkpoint loaded on first use.
    """

    def __init__(self, cfg: ExtractionConfig, model=None):
        self._cfg = cfg
        self._model = model

    def _load(self):
        if self._model is not None:
            return self._model
        try:
            import torch  # noqa: F401
            from transformers import WavLMModel
        except ImportError as exc:
            raise ModelError(
                "the wavlm backend needs the optional dependencies: pip install 'mklvc-adapter[wavlm]'"
            ) from exc
        try:
            model = WavLMModel.from_pretrained(self._cfg.model_id, output_hidden_states=True)
        except Exception as exc:
            raise ModelError(f"failed to load encoder {self._cfg.model_id!r}: {exc}") from exc
        self._model = model
        return model

    def features(self, waveform: np.ndarray) -> np.ndarray:
        import torch

        model = self._load()
        model.eval().to(self._cfg.device)
        with torch.no_grad():
            inputs = torch.as_tensor(waveform, dtype=torch.float32, device=self._cfg.device)
            outputs = model(inputs[None, :], output_hidden_states=True)
        hidden = outputs.hidden_states
        if self._cfg.layer_index >= len(hidden):
            raise ModelError(
                f"layer_index {self._cfg.layer_index} out of range; encoder exposes {len(hidden)} layers"
            )
        feats = hidden[self._cfg.layer_index][0].cpu().numpy().astype(np.float32)
        return feats


def make_extractor(cfg: ExtractionConfig, model=None):
    if cfg.backend == "stub":
        return StubExtractor()
    return WavLmExtractor(cfg, model=model)


def extract(wav_path, out_path, cfg: ExtractionConfig, extractor=None) -> np.ndarray:
    """Extract features from a WAV file and write them as an EMBF file.

    Returns the feature matrix that was written.
    """
    samples, rate = audio.load_wav(wav_path)
    waveform = audio.to_16k_mono(samples, rate)
    if not np.all(np.isfinite(waveform)):
        raise AudioError(f"{wav_path}: waveform contains NaN or Inf")
    extractor = extractor or make_extractor(cfg)
    feats = extractor.features(waveform)
    if feats.ndim != 2 or feats.shape[1] != FEATURE_DIM:
        raise ModelError(
            f"encoder produced shape {feats.shape}; expected (T, {FEATURE_DIM})"
        )
    embfile.write_features(out_path, feats)
    return feats
