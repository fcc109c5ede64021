"""Command-line interface.

Commands:
    fit-stats  compute per-dimension stds over concatenated sequences and
               write a sort-profile file
    convert    convert a source sequence toward a reference (mkl | knn |
               sinkhorn), single pair or manifest batch
    diagnose   per-block distance-to-Gaussian profile, or the sorted std
               spectrum with --spectrum
    score      WER/CER/SIM scoring and the per-method leaderboard
    w2         exact-assignment Wasserstein-2 between two embedding files

Exit codes: 0 success, 1 validation/usage error, 2 numerical failure.
All numeric text output uses 6 significant digits. Commands with stochastic
steps (diagnose, w2) require an explicit --seed.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import sys

import numpy as np

from . import embfile
from .baselines import KnnConfig, SinkhornConfig, knn_convert, sinkhorn_convert
from .diagnostics import empirical_w2, gaussianity_profile, std_spectrum
from .errors import MklvcError, NumericalError, ValidationError
from .metrics import PairScore, aggregate, cer, cosine_sim, score_pair, wer
from .stats import EmbeddingSequence, per_dim_std, sort_profile
from .transport import factorize_apply, factorize_fit

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def _load_profile_or_fit(profile_path, src: EmbeddingSequence, src_path):
    if profile_path is not None:
        return embfile.read_profile(profile_path)
    return sort_profile(per_dim_std(src), source_tag=f"utterance:{src_path}")


def _convert_one(args, src_path, ref_path, out_path) -> str:
    """Convert one pair; returns a one-line summary for logging."""
    src = embfile.read_embeddings(src_path)
    ref = embfile.read_embeddings(ref_path)
    note = ""
    if args.method == "mkl":
        if args.block_dim is None:
            raise ValidationError("--method mkl requires --K")
        profile = _load_profile_or_fit(args.profile, src, src_path)
        fmap = factorize_fit(src, ref, args.block_dim, profile, ridge=args.ridge)
        out = factorize_apply(fmap, src)
        if args.save_map:
            embfile.write_map(args.save_map, fmap)
        note = f" (profile {profile.source_tag})"
    elif args.method == "knn":
        profile = _load_profile_or_fit(args.profile, src, src_path)
        cfg = KnnConfig(k=args.k, n_trim=args.n_trim, metric=args.metric)
        out = knn_convert(src, ref, cfg, profile)
        note = f" (profile {profile.source_tag})"
    else:  # sinkhorn
        cfg = SinkhornConfig(
            epsilon=args.epsilon, max_iters=args.max_iters, metric=args.metric
        )
        out = sinkhorn_convert(src, ref, cfg)
    embfile.write_embeddings(out_path, out)
    return f"{src_path} -> {out_path} [{args.method}]{note}"


def cmd_fit_stats(args) -> int:
    sequences = [embfile.read_embeddings(p) for p in args.embeddings]
    dims = {seq.dim for seq in sequences}
    if len(dims) != 1:
        raise ValidationError(f"input dimensions differ: {sorted(dims)}")
    stacked = np.vstack([seq.frames for seq in sequences])
    tag = args.tag if args.tag else f"corpus:{len(sequences)} files"
    profile = sort_profile(per_dim_std(stacked), source_tag=tag)
    embfile.write_profile(args.output, profile)
    print(f"wrote profile for D={profile.dim} from {stacked.shape[0]} frames to {args.output}")
    return EXIT_OK


def cmd_convert(args) -> int:
    if args.manifest is not None:
        if args.src or args.ref or args.out:
            raise ValidationError("--manifest and --src/--ref/--out are mutually exclusive")
        if args.save_map:
            raise ValidationError("--save-map applies to single conversions, not --manifest batches")
        triples = []
        with open(args.manifest, "r", encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise ValidationError(
                        f"manifest line {line_no}: expected 3 tab-separated paths, got {len(parts)}"
                    )
                triples.append(tuple(parts))
        if not triples:
            raise ValidationError("manifest contains no conversion triples")
        if args.jobs > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
                futures = [pool.submit(_convert_one, args, *t) for t in triples]
                for future in futures:
                    future.result()
        else:
            for triple in triples:
                _convert_one(args, *triple)
        print(f"converted {len(triples)} pairs")
        return EXIT_OK

    if not (args.src and args.ref and args.out):
        raise ValidationError("either --manifest or all of --src/--ref/--out are required")
    print(_convert_one(args, args.src, args.ref, args.out))
    return EXIT_OK


def cmd_diagnose(args) -> int:
    seq = embfile.read_embeddings(args.input)
    lines = []
    if args.spectrum:
        spectrum = std_spectrum(seq)
        lines.append("# std spectrum (rank\tstd), descending")
        for rank, value in enumerate(spectrum):
            lines.append(f"{rank}\t{_fmt(value)}")
    else:
        if args.block_dim is None:
            raise ValidationError("diagnose requires --K (or --spectrum)")
        if args.seed is None:
            raise ValidationError("diagnose requires an explicit --seed (stochastic subsampling)")
        if args.profile is not None:
            profile = embfile.read_profile(args.profile)
        else:
            profile = sort_profile(per_dim_std(seq), source_tag=f"utterance:{args.input}")
        result = gaussianity_profile(
            seq, args.block_dim, profile,
            subsample=args.subsample, mc_samples=args.mc_samples,
            seed=args.seed, stride=args.stride,
        )
        lines.append(
            "# gaussianity profile (block_start\tw2_over_K); "
            f"K={result.block_dim} stride={args.stride} subsample={args.subsample} "
            f"mc_samples={args.mc_samples} seed={result.seed} sample_size={result.sample_size} "
            "solver=exact-assignment"
        )
        for start, value in zip(result.block_start_indices, result.w2_values):
            lines.append(f"{start}\t{_fmt(value)}")
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _parse_score_records(path):
    """Two record shapes, distinguished by column count:

    method \t pair_id \t wer \t cer \t sim               (precomputed, in [0, 1+])
    method \t pair_id \t ref_text \t hyp_text \t vecA \t vecB   (computed here)
    """
    rows: list[PairScore] = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) == 5:
                method, pair_id, wer_s, cer_s, sim_s = parts
                try:
                    raw = (float(wer_s), float(cer_s), float(sim_s))
                except ValueError as exc:
                    raise ValidationError(
                        f"score record line {line_no}: non-numeric wer/cer/sim: {exc}"
                    ) from exc
                rows.append(score_pair(method, pair_id, *raw))
            elif len(parts) == 6:
                method, pair_id, ref_text, hyp_text, vec_a, vec_b = parts
                raw_wer = wer(ref_text, hyp_text)
                raw_cer = cer(ref_text, hyp_text)
                ua = embfile.read_embeddings(vec_a).frames.reshape(-1)
                ub = embfile.read_embeddings(vec_b).frames.reshape(-1)
                rows.append(score_pair(method, pair_id, raw_wer, raw_cer, cosine_sim(ua, ub)))
            else:
                raise ValidationError(
                    f"score record line {line_no}: expected 5 or 6 tab-separated fields, got {len(parts)}"
                )
    if not rows:
        raise ValidationError("no score records found")
    return rows


def cmd_score(args) -> int:
    rows = _parse_score_records(args.pairs)
    board = aggregate(rows)
    lines = ["method\tn_pairs\ttotal\twer\tcer\tsim"]
    for summary in board:
        lines.append(
            f"{summary.method}\t{summary.n_pairs}\t{_fmt(summary.total)}\t"
            f"{_fmt(summary.wer)}\t{_fmt(summary.cer)}\t{_fmt(summary.sim)}"
        )
    if args.per_pair:
        with open(args.per_pair, "w", encoding="utf-8") as handle:
            handle.write("method\tpair_id\ttotal\twer\tcer\tsim\traw_wer\traw_cer\traw_sim\n")
            for row in rows:
                handle.write(
                    f"{row.method}\t{row.pair_id}\t{_fmt(row.triple.total)}\t"
                    f"{_fmt(row.triple.wer)}\t{_fmt(row.triple.cer)}\t{_fmt(row.triple.sim)}\t"
                    f"{_fmt(row.raw_wer)}\t{_fmt(row.raw_cer)}\t{_fmt(row.raw_sim)}\n"
                )
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_w2(args) -> int:
    a = embfile.read_embeddings(args.a)
    b = embfile.read_embeddings(args.b)
    if a.dim != b.dim:
        raise ValidationError(f"dimension mismatch: {a.dim} vs {b.dim}")
    value = empirical_w2(a.frames, b.frames, subsample=args.subsample, seed=args.seed)
    print(_fmt(value))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mklvc",
        description="Factorized linear optimal-transport voice conversion over embedding files",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-stats", help="fit a sort profile from embedding files")
    p.add_argument("embeddings", nargs="+", help="input embedding files")
    p.add_argument("-o", "--output", required=True, help="output profile file")
    p.add_argument("--tag", default=None, help="source tag recorded in the profile")
    p.set_defaults(func=cmd_fit_stats)

    p = sub.add_parser("convert", help="convert a source sequence toward a reference")
    p.add_argument("--method", required=True, choices=("mkl", "knn", "sinkhorn"))
    p.add_argument("--src", help="source embedding file")
    p.add_argument("--ref", help="reference embedding file")
    p.add_argument("--out", help="output embedding file")
    p.add_argument("--manifest", help="tab-separated source/reference/output triples")
    p.add_argument("--jobs", type=int, default=1, help="parallel conversions in batch mode")
    p.add_argument("--K", dest="block_dim", type=int, default=None, help="mkl block dimension")
    p.add_argument("--k", type=int, default=4, help="knn neighbors")
    p.add_argument("--n-trim", type=int, default=None, help="knn distance dimensions (default all)")
    p.add_argument("--epsilon", type=float, default=1e-2, help="sinkhorn regularization")
    p.add_argument("--max-iters", type=int, default=1000, help="sinkhorn iteration cap")
    p.add_argument("--metric", choices=("cosine", "sqeuclidean"), default="cosine")
    p.add_argument("--profile", default=None, help="sort-profile file (default: fit from source)")
    p.add_argument("--ridge", type=float, default=None,
                   help="covariance ridge (default: 1e-6 x mean block variance)")
    p.add_argument("--seed", type=int, default=0,
                   help="reserved for stochastic methods; current converters are deterministic")
    p.add_argument("--save-map", default=None, help="also write the fitted factorized map here")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("diagnose", help="gaussianity profile or std spectrum")
    p.add_argument("--input", required=True, help="embedding file")
    p.add_argument("--K", dest="block_dim", type=int, default=None, help="block dimension")
    p.add_argument("--stride", type=int, default=8, help="block start stride")
    p.add_argument("--subsample", type=int, default=512)
    p.add_argument("--mc-samples", type=int, default=512)
    p.add_argument("--seed", type=int, default=None,
                   help="required for the stochastic gaussianity profile")
    p.add_argument("--profile", default=None, help="sort-profile file (default: fit from input)")
    p.add_argument("--spectrum", action="store_true", help="emit the sorted std spectrum instead")
    p.add_argument("-o", "--output", default=None, help="write the table here instead of stdout")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("score", help="score conversions and print a leaderboard")
    p.add_argument("--pairs", required=True, help="line-delimited score records")
    p.add_argument("-o", "--output", default=None, help="leaderboard output (default stdout)")
    p.add_argument("--per-pair", default=None, help="also write per-pair scores here")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("w2", help="empirical Wasserstein-2 between two embedding files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--subsample", type=int, default=512)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_w2)

    return parser


def cli_dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; fold into the validation exit code
        return EXIT_OK if exc.code in (0, None) else EXIT_VALIDATION
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except MklvcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))
