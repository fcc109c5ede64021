import numpy as np
import pytest

from mklvc_adapter import embfile
from mklvc_adapter.errors import ModelError
from mklvc_adapter.extract import (
    FEATURE_DIM,
    FRAME_RATE,
    ExtractionConfig,
    StubExtractor,
    WavLmExtractor,
    extract,
)

STUB = ExtractionConfig(backend="stub")


def test_five_second_clip_frame_count(clip_a, tmp_path):
    feats = extract(clip_a, tmp_path / "a.embf", STUB)
    assert 230 <= feats.shape[0] <= 270  # ~50 frames/s over 5 s
    assert feats.shape[1] == FEATURE_DIM


def test_deterministic(clip_a, tmp_path):
    extract(clip_a, tmp_path / "one.embf", STUB)
    extract(clip_a, tmp_path / "two.embf", STUB)
    assert (tmp_path / "one.embf").read_bytes() == (tmp_path / "two.embf").read_bytes()


def test_silence_yields_finite_features(tmp_path):
    from mklvc_adapter.audio import save_wav

    save_wav(tmp_path / "silence.wav", np.zeros(16000))
    feats = extract(tmp_path / "silence.wav", tmp_path / "s.embf", STUB)
    assert np.all(np.isfinite(feats))
    assert embfile.read_features(tmp_path / "s.embf").shape == feats.shape


def test_frame_count_tracks_duration(tmp_path):
    from mklvc_adapter.audio import save_wav

    rng = np.random.default_rng(3)
    for seconds in (0.5, 2.0):
        save_wav(tmp_path / "x.wav", 0.1 * rng.standard_normal(int(16000 * seconds)))
        feats = extract(tmp_path / "x.wav", tmp_path / "x.embf", STUB)
        assert abs(feats.shape[0] - seconds * FRAME_RATE) <= 2


def test_wavlm_backend_with_injected_model(tmp_path, clip_a):
    torch = pytest.importorskip("torch")

    class FakeOutput:
        def __init__(self, hidden_states):
            self.hidden_states = hidden_states

    class FakeModel:
        def eval(self):
            return self

        def to(self, device):
            return self

        def __call__(self, inputs, output_hidden_states=True):
            n_frames = inputs.shape[1] // 320
            layers = [torch.full((1, n_frames, FEATURE_DIM), float(i)) for i in range(8)]
            return FakeOutput(layers)

    cfg = ExtractionConfig(layer_index=6)
    extractor = WavLmExtractor(cfg, model=FakeModel())
    feats = extract(clip_a, tmp_path / "w.embf", cfg, extractor=extractor)
    assert feats.shape[1] == FEATURE_DIM
    assert np.all(feats == 6.0)  # layer selection honored


def test_wavlm_layer_out_of_range(tmp_path, clip_a):
    torch = pytest.importorskip("torch")

    class FakeModel:
        def eval(self):
            return self

        def to(self, device):
            return self

        def __call__(self, inputs, output_hidden_states=True):
            class Out:
                hidden_states = [torch.zeros((1, 4, FEATURE_DIM))]

            return Out()

    cfg = ExtractionConfig(layer_index=6)
    with pytest.raises(ModelError, match="out of range"):
        extract(clip_a, tmp_path / "w.embf", cfg, extractor=WavLmExtractor(cfg, model=FakeModel()))


def test_wrong_feature_dim_rejected(tmp_path, clip_a):
    class NarrowExtractor:
        def features(self, waveform):
            return np.zeros((10, 12), dtype=np.float32)

    with pytest.raises(ModelError, match="expected"):
        extract(clip_a, tmp_path / "n.embf", STUB, extractor=NarrowExtractor())


def test_stub_projection_is_fixed():
    a = StubExtractor()
    b = StubExtractor()
    assert np.array_equal(a._projection, b._projection)


def test_bad_backend_rejected():
    with pytest.raises(ModelError):
        ExtractionConfig(backend="quantum")
