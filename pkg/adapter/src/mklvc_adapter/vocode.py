"""EMBF features -> waveform synthesis.

Backends:

* ``checkpoint``: a TorchScript vocoder (HiFi-GAN generator traced/scripted
  to map a [1, T, 1024] feature tensor to a waveform tensor), loaded from a
  user-supplied path. The checkpoint must have been trained on matching
  features.
* ``stub``: a deterministic sinusoidal synthesizer that honors the duration
  contract (HOP samples per frame at 16 kHz, so T frames -> T/50 seconds).
  Not speech, but audible and phase-continuous; lets the full pipeline run
  without model weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import audio, embfile
from .errors import FeatureFileError, ModelError
from .extract import FEATURE_DIM, FRAME_RATE, HOP


@dataclass(frozen=True)
class VocodeConfig:
    backend: str = "checkpoint"
    checkpoint_path: str | None = None
    device: str = "cpu"

    def __post_init__(self):
        if self.backend not in ("checkpoint", "stub"):
            raise ModelError(f"unknown vocoder backend {self.backend!r}")
        if self.backend == "checkpoint" and not self.checkpoint_path:
            raise ModelError("the checkpoint backend needs --checkpoint PATH")


class StubVocoder:
    """Two-oscillator synthesizer driven by frame energy and spectral tilt."""

    def waveform(self, feats: np.ndarray) -> np.ndarray:
        n_frames = feats.shape[0]
        energy = np.sqrt(np.mean(feats.astype(np.float64) ** 2, axis=1))
        peak = float(energy.max())
        amp = 0.8 * energy / peak if peak > 0 else np.zeros(n_frames)
        # Spectral tilt (low-index vs high-index feature mass) modulates pitch.
        half = FEATURE_DIM // 2
        low = np.abs(feats[:, :half].astype(np.float64)).mean(axis=1)
        high = np.abs(feats[:, half:].astype(np.float64)).mean(axis=1)
        tilt = (low - high) / np.maximum(low + high, 1e-12)
        pitch = 160.0 + 80.0 * tilt

        amp_s = np.repeat(amp, HOP)
        freq_s = np.repeat(pitch, HOP)
        phase = 2.0 * np.pi * np.cumsum(freq_s) / audio.TARGET_RATE
        return amp_s * (np.sin(phase) + 0.3 * np.sin(2.0 * phase))


class TorchscriptVocoder:
    def __init__(self, cfg: VocodeConfig, model=None):
        self._cfg = cfg
        self._model = model

    def _load(self):
        if self._model is not None:
            return self._model
        try:
            import torch
        except ImportError as exc:
            raise ModelError(
                "the checkpoint backend needs torch: pip install 'mklvc-adapter[wavlm]'"
            ) from exc
        try:
            model = torch.jit.load(self._cfg.checkpoint_path, map_location=self._cfg.device)
        except Exception as exc:
            raise ModelError(
                f"failed to load vocoder checkpoint {self._cfg.checkpoint_path!r}: {exc}"
            ) from exc
        self._model = model
        return model

    def waveform(self, feats: np.ndarray) -> np.ndarray:
        import torch

        model = self._load()
        with torch.no_grad():
            tensor = torch.as_tensor(feats, dtype=torch.float32, device=self._cfg.device)
            out = model(tensor[None, :, :])
        return np.asarray(out.squeeze().cpu().numpy(), dtype=np.float64)


def make_vocoder(cfg: VocodeConfig, model=None):
    if cfg.backend == "stub":
        return StubVocoder()
    return TorchscriptVocoder(cfg, model=model)


def vocode(embf_path, out_path, cfg: VocodeConfig, vocoder=None) -> np.ndarray:
    """Synthesize a 16 kHz WAV from an EMBF feature file.

    The feature dimension is validated before any synthesis happens.
    """
    feats = embfile.read_features(embf_path)
    if feats.shape[1] != FEATURE_DIM:
        raise FeatureFileError(
            f"{embf_path}: feature dimension {feats.shape[1]} != {FEATURE_DIM}; "
            "not a compatible encoder output"
        )
    vocoder = vocoder or make_vocoder(cfg)
    samples = vocoder.waveform(feats)
    audio.save_wav(out_path, samples, rate=audio.TARGET_RATE)
    return samples


def expected_duration_seconds(n_frames: int) -> float:
    return n_frames / FRAME_RATE
