import numpy as np
import pytest

from mklvc_adapter.audio import TARGET_RATE, load_wav, save_wav, to_16k_mono
from mklvc_adapter.errors import AudioError


def test_save_load_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    samples = 0.5 * np.tanh(rng.standard_normal(16000))  # keep within [-1, 1]
    path = tmp_path / "x.wav"
    save_wav(path, samples)
    back, rate = load_wav(path)
    assert rate == TARGET_RATE
    assert back.shape == samples.shape
    assert np.max(np.abs(back - samples)) < 1e-3  # 16-bit quantization


def test_stereo_mixed_to_mono(tmp_path):
    import wave

    left = np.full(800, 0.5)
    right = np.full(800, -0.5)
    interleaved = np.empty(1600)
    interleaved[0::2] = left
    interleaved[1::2] = right
    pcm = (interleaved * 32767).astype("<i2")
    path = tmp_path / "stereo.wav"
    with wave.open(str(path), "wb") as handle:
        handle.setnchannels(2)
        handle.setsampwidth(2)
        handle.setframerate(16000)
        handle.writeframes(pcm.tobytes())
    samples, _ = load_wav(path)
    assert samples.shape == (800,)
    assert np.max(np.abs(samples)) < 1e-4  # channels cancel


def test_resample_to_16k(tmp_path):
    t = np.arange(44100) / 44100.0
    tone = 0.4 * np.sin(2 * np.pi * 440.0 * t)
    path = tmp_path / "cd.wav"
    save_wav(path, tone, rate=44100)
    samples, rate = load_wav(path)
    resampled = to_16k_mono(samples, rate)
    assert abs(len(resampled) - 16000) <= 1
    # Dominant frequency survives resampling.
    spectrum = np.abs(np.fft.rfft(resampled))
    peak_hz = np.argmax(spectrum) * 16000 / len(resampled)
    assert abs(peak_hz - 440.0) < 5.0


def test_unreadable_file_raises(tmp_path):
    path = tmp_path / "bad.wav"
    path.write_bytes(b"not a wav at all")
    with pytest.raises(AudioError):
        load_wav(path)


def test_empty_waveform_raises(tmp_path):
    import wave

    path = tmp_path / "empty.wav"
    with wave.open(str(path), "wb") as handle:
        handle.setnchannels(1)
        handle.setsampwidth(2)
        handle.setframerate(16000)
    with pytest.raises(AudioError):
        load_wav(path)
