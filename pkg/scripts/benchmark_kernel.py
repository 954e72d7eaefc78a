#!/usr/bin/env python3
"""Benchmark the compiled frame-scan kernel against the pure-Python fallback.

Feeds identical exhaustive workloads to both backends and reports wall-clock
times plus the compiled/pure speedup.  Workloads, per statement:

  scan-vs-fo    counterexample scan of statement validity against FO truth
                over every frame up to the size bound
  valid-stmt    statement validity on every frame, one call per frame
  eval-fo       closed FO correspondent truth on every frame, one call
                per frame

The two backends must agree on every result; the script exits non-zero on
any mismatch.

Usage:
    python3 scripts/benchmark_kernel.py [--max-size 2] [--repeat 1]

Size 3 is exact but slow for the pure backend (262,144 frames per scan);
the default bound of 2 keeps the pure runs in seconds.
"""

from __future__ import annotations

import argparse
import sys
import time

from modalcorr import kernel
from modalcorr._encode import encode_fo, encode_statement
from modalcorr.alba import Success, run_alba
from modalcorr.fol import fo_and_all, simplify_fo, standard_translation_statement
from modalcorr.syntax import parse_statement

CASES = (
    ("reflexivity", "p prec q => p <= q"),
    ("symmetry", "p prec q => ~q prec ~p"),
    ("interaction", "p prec q => dia p prec dia q"),
)


def correspondent(text: str):
    outcome = run_alba(parse_statement(text))
    assert isinstance(outcome, Success), text
    return simplify_fo(
        fo_and_all(
            [standard_translation_statement(p) for p in outcome.pure_quasis]
        )
    )


def scan_vs_fo(prog, fop, max_size: int, backend: str):
    hits = []
    for size in range(1, max_size + 1):
        hits.append(kernel.scan_stmt_vs_fo(size, prog, fop, backend=backend))
    return hits


def valid_stmt_all_frames(prog, max_size: int, backend: str):
    total = 0
    for size in range(1, max_size + 1):
        for r_mask in range(1 << (size * size)):
            for rp_mask in range(1 << (size * size)):
                if kernel.valid_stmt_frame(size, r_mask, rp_mask, prog, backend=backend):
                    total += 1
    return total


def eval_fo_all_frames(fop, max_size: int, backend: str):
    total = 0
    for size in range(1, max_size + 1):
        for r_mask in range(1 << (size * size)):
            for rp_mask in range(1 << (size * size)):
                if kernel.eval_fo_frame(size, r_mask, rp_mask, fop, backend=backend):
                    total += 1
    return total


def timed(fn, repeat: int):
    best, value = None, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, value


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-size", type=int, default=2, metavar="N",
                    help="largest frame size to scan (default 2)")
    ap.add_argument("--repeat", type=int, default=1, metavar="K",
                    help="repetitions per measurement; best time wins (default 1)")
    args = ap.parse_args(argv)
    if args.max_size < 1 or args.repeat < 1:
        ap.error("--max-size and --repeat must be positive")

    frames = sum((1 << (s * s)) ** 2 for s in range(1, args.max_size + 1))
    print(f"backend available: {kernel.backend_name()}")
    print(f"frames per exhaustive pass: {frames}")
    if not kernel.has_compiled():
        print("compiled extension not built; timing the pure backend only\n")

    workloads = []
    for name, text in CASES:
        prog = encode_statement(parse_statement(text))
        fop = encode_fo(correspondent(text))
        workloads.extend([
            (name, "scan-vs-fo",
             lambda b, p=prog, f=fop: scan_vs_fo(p, f, args.max_size, b)),
            (name, "valid-stmt",
             lambda b, p=prog: valid_stmt_all_frames(p, args.max_size, b)),
            (name, "eval-fo",
             lambda b, f=fop: eval_fo_all_frames(f, args.max_size, b)),
        ])

    header = f"{'case':<14}{'workload':<13}{'compiled':>10}{'pure':>10}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    mismatches = 0
    totals = {"compiled": 0.0, "pure": 0.0}
    for case, work, fn in workloads:
        t_pure, v_pure = timed(lambda: fn("pure"), args.repeat)
        totals["pure"] += t_pure
        if kernel.has_compiled():
            t_comp, v_comp = timed(lambda: fn("compiled"), args.repeat)
            totals["compiled"] += t_comp
            if v_comp != v_pure:
                mismatches += 1
                print(f"{case:<14}{work:<13}  BACKEND MISMATCH: {v_comp!r} != {v_pure!r}")
                continue
            speedup = t_pure / t_comp if t_comp > 0 else float("inf")
            print(f"{case:<14}{work:<13}{t_comp:>9.4f}s{t_pure:>9.3f}s{speedup:>8.0f}x")
        else:
            print(f"{case:<14}{work:<13}{'-':>10}{t_pure:>9.3f}s{'-':>9}")

    print("-" * len(header))
    if kernel.has_compiled():
        ratio = totals["pure"] / totals["compiled"] if totals["compiled"] else float("inf")
        print(f"{'total':<27}{totals['compiled']:>9.4f}s{totals['pure']:>9.3f}s{ratio:>8.0f}x")
    else:
        print(f"{'total':<37}{totals['pure']:>9.3f}s")
    if mismatches:
        print(f"\n{mismatches} backend mismatch(es)", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
