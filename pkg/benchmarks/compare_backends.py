"""Benchmark the compiled merge kernel against the numpy fallback.

Runs the same streaming workload on every available backend, reports median
wall-clock throughput, and cross-checks that both backends make identical
merge decisions on the shared input.

    python3 benchmarks/compare_backends.py --sizes 1k,10k --capacity 20 --window 10
"""

from __future__ import annotations

import argparse

from framepress import bench, kernels
from framepress.eco import StreamConfig, stream_compress_with_stats


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="1k,10k", help="comma list of frame counts, k/m suffixes allowed")
    parser.add_argument("--capacity", type=int, default=20)
    parser.add_argument("--window", type=int, default=10)
    parser.add_argument("--pe-scale", type=float, default=0.1)
    parser.add_argument("--tokens", type=int, default=1)
    parser.add_argument("--channels", type=int, default=16)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeats", type=int, default=bench.DEFAULT_REPEATS)
    args = parser.parse_args()

    sizes = bench.parse_sizes(args.sizes)
    config = StreamConfig(window_size=args.window, capacity=args.capacity, pe_scale=args.pe_scale)
    backends = kernels.available_backends()
    original = kernels.active_backend()
    print(f"backends: {', '.join(backends)}  (sizes {sizes}, capacity {args.capacity}, window {args.window})")

    rows: dict[str, list[bench.BenchResult]] = {}
    try:
        for name in backends:
            kernels.set_backend(name)
            rows[name] = bench.run_size_sweep(
                sizes, config, tokens=args.tokens, channels=args.channels, seed=args.seed, repeats=args.repeats
            )
    finally:
        kernels.set_backend(original)

    header = f"{'n':>10}" + "".join(f"{name + ' ms':>16}{name + ' f/s':>16}" for name in backends)
    print(header)
    for pos, count in enumerate(sizes):
        line = f"{count:>10}"
        for name in backends:
            res = rows[name][pos]
            line += f"{res.median_ms:>16.2f}{res.frames_per_s:>16,.0f}"
        print(line)
    if len(backends) > 1:
        anchor = "python" if "python" in backends else backends[0]
        base = rows[anchor]
        for name in backends:
            if name == anchor:
                continue
            speedups = [base[pos].median_ms / rows[name][pos].median_ms for pos in range(len(sizes))]
            print(f"{name} speedup over {anchor}: " + ", ".join(f"{s:.1f}x" for s in speedups))

    check_n = min(max(sizes), 2000)
    seq = bench.random_stream(check_n, args.tokens, args.channels, seed=args.seed)
    logs = {}
    try:
        for name in backends:
            kernels.set_backend(name)
            _, log, _ = stream_compress_with_stats(seq, config)
            logs[name] = [(ev.step, ev.kept_slot, ev.removed_slot) for ev in log]
    finally:
        kernels.set_backend(original)
    agree = len({tuple(decisions) for decisions in logs.values()}) == 1
    print(f"merge decisions identical across backends at n={check_n}: {agree}")
    return 0 if agree else 1


if __name__ == "__main__":
    raise SystemExit(main())
