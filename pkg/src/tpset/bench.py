"""Benchmark helper: time a set operation over generated inputs.

Inputs are generated in memory and the timer brackets only the
operation itself, never file I/O. Every size gets one untimed warm-up
run, then the median of the timed repeats is reported.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass
from typing import Sequence

from .datagen import GenParams, generate, overlapping_factor
from .setops import SetOpKind, apply_setop

__all__ = ["BenchResult", "bench_setop"]


@dataclass(frozen=True)
class BenchResult:
    size: int
    op: str
    median_ms: float


def bench_setop(
    kind: SetOpKind,
    sizes: Sequence[int],
    repeats: int = 3,
    seed: int = 0,
    num_facts: int = 1,
    max_len: int = 3,
    max_gap: int = 1,
    max_len_s: int | None = None,
    max_gap_s: int | None = None,
    measure_factor: bool = False,
) -> list[BenchResult | tuple[BenchResult, float]]:
    """Time the operation at each input size (tuples per side).

    The two sides use consecutive seeds and distinct atom prefixes, so
    their atom spaces never collide. max_len_s/max_gap_s override the
    right side's layout when the sides should differ. With
    measure_factor the overlapping factor of each generated pair is
    returned alongside the timing.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    results: list = []
    for size in sizes:
        r = generate(
            GenParams(
                size, num_facts, max_len, max_gap, seed=seed, atom_prefix="a"
            )
        )
        s = generate(
            GenParams(
                size,
                num_facts,
                max_len_s if max_len_s is not None else max_len,
                max_gap_s if max_gap_s is not None else max_gap,
                seed=seed + 1,
                atom_prefix="b",
            )
        )
        apply_setop(kind, r, s)  # warm-up
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            apply_setop(kind, r, s)
            times.append((time.perf_counter() - t0) * 1000.0)
        res = BenchResult(size, kind.value, statistics.median(times))
        if measure_factor:
            results.append((res, overlapping_factor(r, s)))
        else:
            results.append(res)
    return results
