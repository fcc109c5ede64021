"""Regenerate the bundled demo clips.

Two 5-second 16 kHz mono WAVs of synthetic vowel-like phrases (harmonic
stacks with formant envelopes, distinct pitch contours, and short pauses).
Generated from fixed seeds by this script, so the clips carry no third-party
rights and the files are reproducible:

    python make_clips.py
"""

import numpy as np

RATE = 16_000
DURATION = 5.0

# Rough formant pairs (Hz) for a few vowel timbres.
VOWELS = [(730, 1090), (270, 2290), (530, 1840), (300, 870), (660, 1720)]


def synth_phrase(seed: int, base_pitch: float) -> np.ndarray:
    rng = np.random.default_rng(seed)
    n = int(RATE * DURATION)
    out = np.zeros(n)
    t = 0
    while t < n:
        seg = int(RATE * rng.uniform(0.25, 0.5))
        seg = min(seg, n - t)
        if rng.random() < 0.2:  # pause
            t += seg
            continue
        f1, f2 = VOWELS[int(rng.integers(len(VOWELS)))]
        pitch = base_pitch * rng.uniform(0.85, 1.2)
        times = np.arange(seg) / RATE
        glide = 1.0 + 0.08 * np.sin(2 * np.pi * rng.uniform(1.0, 3.0) * times)
        phase = 2 * np.pi * np.cumsum(pitch * glide) / RATE
        sample = np.zeros(seg)
        for harmonic in range(1, 30):
            freq = pitch * harmonic
            if freq > 7500:
                break
            # Formant-shaped harmonic amplitudes.
            gain = 1.0 / harmonic
            for formant, width in ((f1, 120.0), (f2, 200.0)):
                gain += 0.8 * np.exp(-0.5 * ((freq - formant) / width) ** 2)
            sample += gain * np.sin(harmonic * phase)
        envelope = np.minimum(1.0, np.minimum(times, (seg / RATE) - times) / 0.04)
        sample *= envelope
        out[t : t + seg] = sample
        t += seg
    out += 0.002 * rng.standard_normal(n)  # light breath noise
    return 0.7 * out / np.max(np.abs(out))


if __name__ == "__main__":
    import os
    import sys

    sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))
    from mklvc_adapter.audio import save_wav

    here = os.path.dirname(os.path.abspath(__file__))
    save_wav(os.path.join(here, "clip_a.wav"), synth_phrase(seed=11, base_pitch=120.0))
    save_wav(os.path.join(here, "clip_b.wav"), synth_phrase(seed=23, base_pitch=210.0))
    print("wrote clip_a.wav, clip_b.wav")
