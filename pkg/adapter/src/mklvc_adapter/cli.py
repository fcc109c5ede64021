"""Adapter CLI: batch feature extraction and vocoding.

    mklvc-adapter extract clip1.wav clip2.wav -o features/ [--layer N] [--backend wavlm|stub]
    mklvc-adapter vocode converted1.embf ... -o audio/ [--backend checkpoint|stub] [--checkpoint PATH]

Outputs are named after the input stem (clip1.wav -> clip1.embf, and
converted1.embf -> converted1.wav). Exit codes: 0 success, 1 any failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import AdapterError
from .extract import ExtractionConfig, extract, make_extractor
from .vocode import VocodeConfig, make_vocoder, vocode


def cmd_extract(args) -> int:
    cfg = ExtractionConfig(
        model_id=args.model_id,
        layer_index=args.layer,
        device=args.device,
        backend=args.backend,
    )
    os.makedirs(args.output, exist_ok=True)
    extractor = make_extractor(cfg)  # one model instance for the whole batch
    for wav_path in args.wavs:
        stem = os.path.splitext(os.path.basename(wav_path))[0]
        out_path = os.path.join(args.output, stem + ".embf")
        feats = extract(wav_path, out_path, cfg, extractor=extractor)
        print(f"{wav_path} -> {out_path} ({feats.shape[0]} frames x {feats.shape[1]})")
    return 0


def cmd_vocode(args) -> int:
    cfg = VocodeConfig(
        backend=args.backend, checkpoint_path=args.checkpoint, device=args.device
    )
    os.makedirs(args.output, exist_ok=True)
    vocoder = make_vocoder(cfg)
    for embf_path in args.features:
        stem = os.path.splitext(os.path.basename(embf_path))[0]
        out_path = os.path.join(args.output, stem + ".wav")
        samples = vocode(embf_path, out_path, cfg, vocoder=vocoder)
        print(f"{embf_path} -> {out_path} ({samples.shape[0] / 16000:.2f}s)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mklvc-adapter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="WAVs -> EMBF feature files")
    p.add_argument("wavs", nargs="+", help="input PCM WAV files")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--layer", type=int, default=6, help="encoder hidden layer (default 6)")
    p.add_argument("--model-id", default="microsoft/wavlm-large")
    p.add_argument("--backend", choices=("wavlm", "stub"), default="wavlm")
    p.add_argument("--device", default="cpu")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("vocode", help="EMBF feature files -> WAVs")
    p.add_argument("features", nargs="+", help="input EMBF files")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--backend", choices=("checkpoint", "stub"), default="checkpoint")
    p.add_argument("--checkpoint", default=None, help="TorchScript vocoder path")
    p.add_argument("--device", default="cpu")
    p.set_defaults(func=cmd_vocode)

    return parser


def cli_dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (AdapterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))
