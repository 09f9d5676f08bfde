"""Command-line interface for generating, compressing, and evaluating streams.

    framepress gen --out stream.fseq --clusters 20 --per-cluster 5 --c 32
    framepress eco --in stream.fseq --out episodes.fseq --capacity 20 --window 10
    framepress setr --in stream.fseq --keep-ratio 0.2 --out kept.fseq
    framepress baseline --in stream.fseq --method kmeans --budget 20 --seed 3
    framepress eval --in stream.fseq --method eco --report eval.json
    framepress oracle-check --in stream.fseq --capacity 20
    framepress bench --sizes 1k,10k,100k --report bench.json

Exit codes: 0 success; 1 validation error (bad flags or values, failed oracle
check); 2 I/O error (missing, unreadable, or malformed files).
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Any

from framepress import baselines, bench
from framepress._version import __version__
from framepress.eco import MERGE_MODES, StreamConfig, stream_compress_with_stats
from framepress.metrics import compare_runs, fidelity, temporal_coverage
from framepress.oracle import oracle_eco, replay_merge_sources
from framepress.setr import SetrConfig, setr_compress_with_assignment
from framepress.tensorio import (
    EvalReport,
    FseqFormatError,
    SyntheticSpec,
    gen_episode_stream,
    read_feature_file,
    write_feature_file,
    write_report,
)

EVAL_METHODS = ("eco", "setr") + baselines.METHODS


class _UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; remap to the validation exit code
    def error(self, message: str) -> None:
        raise _UsageError(message)


def _ms(seconds: float) -> float:
    return seconds * 1e3


def _serialize_log(log) -> list[dict[str, Any]]:
    return [
        {"step": ev.step, "kept": ev.kept_slot, "removed": ev.removed_slot, "similarity": ev.similarity}
        for ev in log
    ]


def _cmd_gen(args) -> tuple[int, EvalReport]:
    spec = SyntheticSpec(
        num_clusters=args.clusters,
        frames_per_cluster=args.frames_per_cluster,
        tokens_per_frame=args.tokens,
        channels=args.channels,
        noise_sigma=args.noise,
        seed=args.seed,
    )
    start = time.perf_counter()
    seq = gen_episode_stream(spec)
    elapsed = time.perf_counter() - start
    write_feature_file(seq, args.out)
    print(f"gen: wrote {len(seq)} frames ({seq.tokens_per_frame}x{seq.channels}) to {args.out}")
    report = EvalReport(
        command="gen",
        config={
            "clusters": args.clusters,
            "frames_per_cluster": args.frames_per_cluster,
            "tokens": args.tokens,
            "channels": args.channels,
            "noise": args.noise,
        },
        input_frames=len(seq),
        input_tokens=seq.tokens_per_frame,
        input_channels=seq.channels,
        output_frames=len(seq),
        timing_ms={"generate": _ms(elapsed)},
        seed=args.seed,
    )
    return 0, report


def _cmd_eco(args) -> tuple[int, EvalReport]:
    seq = read_feature_file(args.in_path)
    config = StreamConfig(
        window_size=args.window,
        capacity=args.capacity,
        pe_scale=args.pe_scale,
        merge_mode=args.merge_mode,
    )
    start = time.perf_counter()
    episodes, log, peak = stream_compress_with_stats(seq, config)
    elapsed = time.perf_counter() - start
    if args.out:
        write_feature_file(episodes, args.out)
    print(f"eco: {len(seq)} -> {len(episodes)} episodes, {len(log)} merges, peak buffer {peak}")
    report = EvalReport(
        command="eco",
        config={
            "capacity": args.capacity,
            "window": args.window,
            "pe_scale": args.pe_scale,
            "merge_mode": args.merge_mode,
        },
        input_frames=len(seq),
        input_tokens=seq.tokens_per_frame,
        input_channels=seq.channels,
        output_frames=len(episodes),
        metrics={"compression_ratio": len(seq) / len(episodes)},
        timing_ms={"compress": _ms(elapsed)},
        peak_buffer_frames=peak,
        merge_log=_serialize_log(log),
    )
    return 0, report


def _cmd_setr(args) -> tuple[int, EvalReport]:
    seq = read_feature_file(args.in_path)
    config = SetrConfig(stride=args.stride, keep_ratio=args.keep_ratio)
    start = time.perf_counter()
    compressed, assignment = setr_compress_with_assignment(seq, config)
    elapsed = time.perf_counter() - start
    if args.out:
        write_feature_file(compressed, args.out)
    print(f"setr: {len(seq)} -> {len(compressed)} frames at stride {config.resolved_stride}")
    report = EvalReport(
        command="setr",
        config={"stride": config.resolved_stride, "keep_ratio": args.keep_ratio},
        input_frames=len(seq),
        input_tokens=seq.tokens_per_frame,
        input_channels=seq.channels,
        output_frames=len(compressed),
        metrics={"compression_ratio": len(seq) / len(compressed)},
        timing_ms={"compress": _ms(elapsed)},
        setr_assignment=[[donor, assignment.assignment[donor]] for donor in sorted(assignment.assignment)],
    )
    return 0, report


def _cmd_baseline(args) -> tuple[int, EvalReport]:
    seq = read_feature_file(args.in_path)
    config = baselines.BaselineConfig(
        method=args.method, budget=args.budget, seed=args.seed, kmeans_iters=args.kmeans_iters
    )
    start = time.perf_counter()
    compressed = baselines.run_baseline(seq, config)
    elapsed = time.perf_counter() - start
    if args.out:
        write_feature_file(compressed, args.out)
    print(f"baseline {args.method}: {len(seq)} -> {len(compressed)} frames")
    report = EvalReport(
        command="baseline",
        config={"method": args.method, "budget": args.budget, "kmeans_iters": args.kmeans_iters},
        input_frames=len(seq),
        input_tokens=seq.tokens_per_frame,
        input_channels=seq.channels,
        output_frames=len(compressed),
        metrics={"compression_ratio": len(seq) / len(compressed)},
        timing_ms={"compress": _ms(elapsed)},
        seed=args.seed,
    )
    return 0, report


def _eval_dispatch(args, seq) -> tuple[Any, list[list[int]], int, dict[str, Any]]:
    """Run the chosen method; returns (output, coverage sources, peak frames, config echo)."""
    method = args.method
    if method == "eco":
        config = StreamConfig(
            window_size=args.window,
            capacity=args.capacity,
            pe_scale=args.pe_scale,
            merge_mode=args.merge_mode,
        )
        episodes, log, peak = stream_compress_with_stats(seq, config)
        sources = replay_merge_sources(seq, config, log)
        echo = {
            "method": method,
            "capacity": args.capacity,
            "window": args.window,
            "pe_scale": args.pe_scale,
            "merge_mode": args.merge_mode,
        }
        return episodes, sources, peak, echo
    if method == "setr":
        if args.stride is None and args.keep_ratio is None:
            config = SetrConfig(keep_ratio=0.2)
        else:
            config = SetrConfig(stride=args.stride, keep_ratio=args.keep_ratio)
        compressed, assignment = setr_compress_with_assignment(seq, config)
        groups: dict[int, list[int]] = {anchor: [anchor] for anchor in assignment.anchors}
        for donor, anchor in assignment.assignment.items():
            groups[anchor].append(donor)
        sources = [sorted(groups[anchor]) for anchor in assignment.anchors]
        return compressed, sources, 0, {"method": method, "stride": config.resolved_stride}
    echo = {"method": method, "budget": args.budget}
    if method == "kmeans":
        compressed, sources = baselines.kmeans_compress_with_members(
            seq, args.budget, seed=args.seed, iters=args.kmeans_iters
        )
        echo["kmeans_iters"] = args.kmeans_iters
        return compressed, sources, 0, echo
    if method in ("avgpool", "maxpool"):
        compressed = baselines.pool_compress(seq, args.budget, mode=method[:3])
        sources = [list(range(s, s + size)) for s, size in baselines.pool_bins(len(seq), args.budget)]
        return compressed, sources, 0, echo
    config = baselines.BaselineConfig(method=method, budget=args.budget, seed=args.seed)
    compressed = baselines.run_baseline(seq, config)
    # selection methods keep raw frames, whose temporal index is the input position
    sources = [[frame.temporal_index] for frame in compressed.frames]
    return compressed, sources, 0, echo


def _cmd_eval(args) -> tuple[int, EvalReport]:
    seq = read_feature_file(args.in_path)
    start = time.perf_counter()
    compressed, sources, peak, echo = _eval_dispatch(args, seq)
    compress_ms = _ms(time.perf_counter() - start)
    start = time.perf_counter()
    metrics = {
        "fidelity": fidelity(seq, compressed),
        "temporal_coverage": temporal_coverage(sources, len(seq)),
        "compression_ratio": len(seq) / len(compressed),
    }
    metrics_ms = _ms(time.perf_counter() - start)
    if args.out:
        write_feature_file(compressed, args.out)
    print(
        f"eval {args.method}: {len(seq)} -> {len(compressed)} frames, "
        f"fidelity {metrics['fidelity']:.4f}, coverage {metrics['temporal_coverage']:.4f}"
    )
    report = EvalReport(
        command="eval",
        config=echo,
        input_frames=len(seq),
        input_tokens=seq.tokens_per_frame,
        input_channels=seq.channels,
        output_frames=len(compressed),
        metrics=metrics,
        timing_ms={"compress": compress_ms, "metrics": metrics_ms},
        peak_buffer_frames=peak,
        seed=args.seed,
    )
    return 0, report


def _cmd_oracle_check(args) -> tuple[int, EvalReport]:
    seq = read_feature_file(args.in_path)
    config = StreamConfig(
        window_size=len(seq),
        capacity=args.capacity,
        pe_scale=args.pe_scale,
        merge_mode=args.merge_mode,
    )
    start = time.perf_counter()
    compressed, log, peak = stream_compress_with_stats(seq, config)
    reference, ref_log = oracle_eco(seq, config)
    elapsed = time.perf_counter() - start

    logs_match = len(log) == len(ref_log) and all(
        (a.step, a.kept_slot, a.removed_slot) == (b.step, b.kept_slot, b.removed_slot)
        for a, b in zip(log, ref_log)
    )
    sim_delta = max(
        (abs(a.similarity - b.similarity) for a, b in zip(log, ref_log)), default=0.0
    )
    values_match, divergence = compare_runs(compressed, reference)
    meta_match = all(
        (a.temporal_index, a.weight) == (b.temporal_index, b.weight)
        for a, b in zip(compressed.frames, reference.frames)
    )
    equivalent = logs_match and values_match and meta_match and sim_delta <= 1e-9
    verdict = "PASS" if equivalent else "FAIL"
    print(f"oracle-check: {verdict} ({len(log)} merges, max similarity delta {sim_delta:.3e})")
    if divergence is not None:
        print(f"oracle-check: first divergence at {divergence}")
    report = EvalReport(
        command="oracle-check",
        config={"capacity": args.capacity, "pe_scale": args.pe_scale, "merge_mode": args.merge_mode},
        input_frames=len(seq),
        input_tokens=seq.tokens_per_frame,
        input_channels=seq.channels,
        output_frames=len(compressed),
        metrics={
            "equivalent": float(equivalent),
            "merge_events": float(len(log)),
            "max_similarity_delta": sim_delta,
        },
        timing_ms={"check": _ms(elapsed)},
        peak_buffer_frames=peak,
    )
    return (0 if equivalent else 1), report


def _cmd_bench(args) -> tuple[int, EvalReport]:
    sizes = bench.parse_sizes(args.sizes)
    config = StreamConfig(
        window_size=args.window,
        capacity=args.capacity,
        pe_scale=args.pe_scale,
        merge_mode=args.merge_mode,
    )
    results = bench.run_size_sweep(
        sizes, config, tokens=args.tokens, channels=args.channels, seed=args.seed, repeats=args.repeats
    )
    metrics: dict[str, float] = {}
    timing: dict[str, float] = {}
    for res in results:
        print(
            f"bench[{res.backend}] n={res.frames}: median {res.median_ms:.2f} ms, "
            f"{res.frames_per_s:,.0f} frames/s, peak buffer {res.peak_buffer_frames} frames"
        )
        metrics[f"frames_per_s_{res.frames}"] = res.frames_per_s
        metrics[f"peak_buffer_frames_{res.frames}"] = float(res.peak_buffer_frames)
        timing[f"median_ms_{res.frames}"] = res.median_ms
    report = EvalReport(
        command="bench",
        config={
            "sizes": sizes,
            "capacity": args.capacity,
            "window": args.window,
            "pe_scale": args.pe_scale,
            "merge_mode": args.merge_mode,
            "tokens": args.tokens,
            "channels": args.channels,
            "repeats": args.repeats,
            "backend": results[0].backend,
        },
        input_frames=max(sizes),
        input_tokens=args.tokens,
        input_channels=args.channels,
        output_frames=args.capacity,
        metrics=metrics,
        timing_ms=timing,
        peak_buffer_frames=max(res.peak_buffer_frames for res in results),
        seed=args.seed,
    )
    return 0, report


def _add_stream_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--capacity", type=int, default=20, help="episode budget (default 20)")
    sub.add_argument("--window", type=int, default=10, help="frames per streaming window (default 10)")
    sub.add_argument("--pe-scale", type=float, default=0.1, help="position-code weight in similarity (default 0.1)")
    sub.add_argument("--merge-mode", choices=MERGE_MODES, default="plain", help="pair averaging mode")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="framepress", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"framepress {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a clustered synthetic stream")
    gen.add_argument("--out", required=True, help="output feature file")
    gen.add_argument("--clusters", type=int, default=20, help="number of cluster centers")
    gen.add_argument("--per-cluster", dest="frames_per_cluster", type=int, default=5, help="frames per cluster")
    gen.add_argument("--t", dest="tokens", type=int, default=1, help="tokens per frame")
    gen.add_argument("--c", dest="channels", type=int, default=32, help="channels per token")
    gen.add_argument("--sigma", dest="noise", type=float, default=0.01, help="per-channel noise stddev")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--report", help="write a JSON report here")
    gen.set_defaults(handler=_cmd_gen)

    eco = sub.add_parser("eco", help="stream-compress into a bounded episode buffer")
    eco.add_argument("--in", dest="in_path", required=True, help="input feature file")
    eco.add_argument("--out", help="write compressed episodes here")
    eco.add_argument("--report", help="write a JSON report (includes the merge log)")
    _add_stream_flags(eco)
    eco.set_defaults(handler=_cmd_eco)

    setr = sub.add_parser("setr", help="compress by anchor-stride semantic grouping")
    setr.add_argument("--in", dest="in_path", required=True)
    setr.add_argument("--out")
    setr.add_argument("--report", help="write a JSON report (includes the assignment)")
    pick = setr.add_mutually_exclusive_group(required=True)
    pick.add_argument("--stride", type=int)
    pick.add_argument("--keep-ratio", type=float)
    setr.set_defaults(handler=_cmd_setr)

    base = sub.add_parser("baseline", help="run a budgeted reference compressor")
    base.add_argument("--in", dest="in_path", required=True)
    base.add_argument("--out")
    base.add_argument("--report")
    base.add_argument("--method", choices=baselines.METHODS, required=True)
    base.add_argument("--budget", type=int, required=True)
    base.add_argument("--kmeans-iters", type=int, default=baselines.DEFAULT_KMEANS_ITERS)
    base.add_argument("--seed", type=int, default=0)
    base.set_defaults(handler=_cmd_baseline)

    ev = sub.add_parser("eval", help="compress and score fidelity/coverage")
    ev.add_argument("--in", dest="in_path", required=True)
    ev.add_argument("--out")
    ev.add_argument("--report")
    ev.add_argument("--method", choices=EVAL_METHODS, required=True)
    _add_stream_flags(ev)
    pick = ev.add_mutually_exclusive_group()
    pick.add_argument("--stride", type=int)
    pick.add_argument("--keep-ratio", type=float)
    ev.add_argument("--budget", type=int, default=20)
    ev.add_argument("--kmeans-iters", type=int, default=baselines.DEFAULT_KMEANS_ITERS)
    ev.add_argument("--seed", type=int, default=0)
    ev.set_defaults(handler=_cmd_eval)

    oc = sub.add_parser("oracle-check", help="verify streaming output against the brute-force reference")
    oc.add_argument("--in", dest="in_path", required=True)
    oc.add_argument("--report")
    oc.add_argument("--capacity", type=int, default=20)
    oc.add_argument("--pe-scale", type=float, default=0.1)
    oc.add_argument("--merge-mode", choices=MERGE_MODES, default="plain")
    oc.set_defaults(handler=_cmd_oracle_check)

    bn = sub.add_parser("bench", help="throughput sweep over stream sizes")
    bn.add_argument("--sizes", default="1k,10k,100k", help="comma list, k/m suffixes allowed")
    bn.add_argument("--report")
    bn.add_argument("--tokens", type=int, default=1)
    bn.add_argument("--channels", type=int, default=16)
    bn.add_argument("--seed", type=int, default=0)
    bn.add_argument("--repeats", type=int, default=bench.DEFAULT_REPEATS)
    _add_stream_flags(bn)
    bn.set_defaults(handler=_cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        code, report = args.handler(args)
        if report is not None and getattr(args, "report", None):
            write_report(report, args.report)
        return code
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FseqFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
