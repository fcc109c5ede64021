"""The bundled demo: extract both clips, convert one toward the other with
the primary CLI at K=2, vocode the result, and check the duration contract.
Runs entirely on the stub backends (no model weights needed)."""

import subprocess

from conftest import require_primary_cli
from mklvc_adapter.audio import load_wav
from mklvc_adapter.cli import cli_dispatch


def test_demo_pipeline(clip_a, clip_b, tmp_path):
    cli = require_primary_cli()

    code = cli_dispatch(["extract", clip_a, clip_b, "-o", str(tmp_path), "--backend", "stub"])
    assert code == 0

    result = subprocess.run(
        [cli, "convert", "--method", "mkl", "--K", "2",
         "--src", str(tmp_path / "clip_a.embf"),
         "--ref", str(tmp_path / "clip_b.embf"),
         "--out", str(tmp_path / "converted.embf")],
        capture_output=True, text=True,
    )
    assert result.returncode == 0, result.stderr

    code = cli_dispatch(["vocode", str(tmp_path / "converted.embf"),
                         "-o", str(tmp_path), "--backend", "stub"])
    assert code == 0

    original, rate = load_wav(clip_a)
    synthesized, _ = load_wav(tmp_path / "converted.wav")
    original_s = len(original) / rate
    synthesized_s = len(synthesized) / 16000
    assert abs(synthesized_s - original_s) / original_s < 0.05


def test_extract_vocode_round_trip_duration(clip_b, tmp_path):
    assert cli_dispatch(["extract", clip_b, "-o", str(tmp_path), "--backend", "stub"]) == 0
    assert cli_dispatch(["vocode", str(tmp_path / "clip_b.embf"),
                         "-o", str(tmp_path), "--backend", "stub"]) == 0
    original, rate = load_wav(clip_b)
    back, _ = load_wav(tmp_path / "clip_b.wav")
    assert abs(len(back) / 16000 - len(original) / rate) / (len(original) / rate) < 0.05


def test_cli_reports_errors(tmp_path):
    assert cli_dispatch(["extract", str(tmp_path / "missing.wav"),
                         "-o", str(tmp_path), "--backend", "stub"]) == 1
    assert cli_dispatch(["vocode", str(tmp_path / "missing.embf"),
                         "-o", str(tmp_path), "--backend", "stub"]) == 1
    assert cli_dispatch(["--help"]) == 0
    assert cli_dispatch(["extract", "--bogus"]) == 1
