"""PCM WAV loading/saving with mono mixdown and resampling to 16 kHz.

Only uncompressed PCM WAV is handled (stdlib ``wave``); that covers the
encoder's expected input. Multi-channel audio is averaged to mono before
resampling.
"""

from __future__ import annotations

import wave

import numpy as np
from scipy.signal import resample_poly

from .errors import AudioError

TARGET_RATE = 16_000

_PCM_SCALE = {1: 127.0, 2: 32767.0, 4: 2147483647.0}
_PCM_DTYPE = {1: np.uint8, 2: np.dtype("<i2"), 4: np.dtype("<i4")}


def load_wav(path) -> tuple[np.ndarray, int]:
    """Read a PCM WAV file as float64 samples in [-1, 1] plus its rate."""
    try:
        with wave.open(str(path), "rb") as handle:
            n_channels = handle.getnchannels()
            width = handle.getsampwidth()
            rate = handle.getframerate()
            n_frames = handle.getnframes()
            raw = handle.readframes(n_frames)
    except (wave.Error, EOFError, OSError) as exc:
        raise AudioError(f"cannot read WAV {path}: {exc}") from exc
    if width not in _PCM_DTYPE:
        raise AudioError(f"{path}: unsupported sample width {width} bytes")
    if n_frames == 0:
        raise AudioError(f"{path}: empty waveform")
    samples = np.frombuffer(raw, dtype=_PCM_DTYPE[width]).astype(np.float64)
    if width == 1:
        samples -= 128.0  # 8-bit WAV is unsigned
    samples /= _PCM_SCALE[width]
    samples = samples.reshape(-1, n_channels).mean(axis=1)
    return samples, rate


def to_16k_mono(samples: np.ndarray, rate: int) -> np.ndarray:
    if rate == TARGET_RATE:
        return np.asarray(samples, dtype=np.float64)
    if rate <= 0:
        raise AudioError(f"invalid sample rate {rate}")
    from math import gcd

    g = gcd(TARGET_RATE, rate)
    return resample_poly(np.asarray(samples, dtype=np.float64), TARGET_RATE // g, rate // g)


def save_wav(path, samples: np.ndarray, rate: int = TARGET_RATE) -> None:
    """Write mono float samples (clipped to [-1, 1]) as 16-bit PCM."""
    samples = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    pcm = (samples * 32767.0).astype("<i2")
    with wave.open(str(path), "wb") as handle:
        handle.setnchannels(1)
        handle.setsampwidth(2)
        handle.setframerate(rate)
        handle.writeframes(pcm.tobytes())
