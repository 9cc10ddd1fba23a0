"""Acceptance gauntlet.

Ten checks, numbered; `pytest -v` prints one PASSED/FAILED line per
criterion. Each test states its own tolerances and time budgets.
"""

from __future__ import annotations

import itertools
import time

import numpy as np
import pytest

from conftest import enum_probability, rows_key
from tpset import (
    And,
    Atom,
    GenParams,
    Interval,
    Not,
    Or,
    SetOpKind,
    TpRelation,
    TpTuple,
    apply_setop,
    except_,
    generate,
    intersect,
    is_one_occurrence_form,
    oracle_setop,
    parse_lineage,
    probability,
    read_relation,
    syntactic_equiv,
    union,
    windows,
    write_relation,
)
from tpset.bench import bench_setop


def check_rows(got: TpRelation, want: list[tuple], tol: float) -> None:
    """want rows: (fact-name, ts, te, lineage-string, p), fact-sorted."""
    rows = list(got)
    assert len(rows) == len(want), (len(rows), len(want))
    for t, (wf, wts, wte, wlam, wp) in zip(rows, sorted(want)):
        assert (t.fact[0], t.interval.ts, t.interval.te) == (wf, wts, wte)
        assert syntactic_equiv(t.lineage, parse_lineage(wlam)), (
            f"{wf} [{wts},{wte}): {t.lineage!r}"
        )
        assert abs(t.p - wp) <= tol


def test_criterion_01_golden_set_operations(rel_a, rel_c):
    t0 = time.perf_counter()
    inter = intersect(rel_a, rel_c)
    diff = except_(rel_a, rel_c)
    uni = union(rel_a, rel_c)
    elapsed = time.perf_counter() - t0
    check_rows(
        inter,
        [
            ("chips", 4, 5, "a2 & c3", 0.56),
            ("milk", 2, 4, "a1 & c1", 0.18),
            ("milk", 6, 8, "a1 & c2", 0.21),
        ],
        tol=1e-9,
    )
    check_rows(
        diff,
        [
            ("chips", 4, 5, "a2 & !c3", 0.24),
            ("chips", 5, 7, "a2", 0.8),
            ("dates", 1, 3, "a3", 0.6),
            ("milk", 2, 4, "a1 & !c1", 0.12),
            ("milk", 4, 6, "a1", 0.3),
            ("milk", 6, 8, "a1 & !c2", 0.09),
            ("milk", 8, 10, "a1", 0.3),
        ],
        tol=1e-9,
    )
    check_rows(
        uni,
        [
            ("chips", 4, 5, "a2 | c3", 0.94),
            ("chips", 5, 7, "a2", 0.8),
            ("chips", 7, 9, "c4", 0.8),
            ("dates", 1, 3, "a3", 0.6),
            ("milk", 1, 2, "c1", 0.6),
            ("milk", 2, 4, "a1 | c1", 0.72),
            ("milk", 4, 6, "a1", 0.3),
            ("milk", 6, 8, "a1 | c2", 0.79),
            ("milk", 8, 10, "a1", 0.3),
        ],
        tol=1e-9,
    )
    assert elapsed < 1.0, f"golden operations took {elapsed:.3f}s"


def test_criterion_02_composed_difference_of_union(rel_a, rel_b, rel_c):
    out = except_(rel_c, union(rel_a, rel_b))
    check_rows(
        out,
        [
            ("chips", 4, 5, "c3 & !(a2 | b2)", 0.014),
            ("chips", 7, 9, "c4", 0.8),
            ("milk", 1, 2, "c1", 0.6),
            ("milk", 2, 4, "c1 & !a1", 0.42),
            ("milk", 6, 8, "c2 & !(a1 | b1)", 0.196),
        ],
        tol=1e-9,
    )


def test_criterion_03_golden_window_sets(rel_a, rel_b, rel_c):
    def win_rows(r, s):
        return sorted(
            (
                w.fact[0],
                w.interval.ts,
                w.interval.te,
                repr(w.lam_r),
                repr(w.lam_s),
            )
            for w in windows(r, s)
        )

    A = lambda x: repr(Atom(x))
    N = repr(None)
    assert win_rows(rel_a, rel_c) == sorted(
        [
            ("chips", 4, 5, A("a2"), A("c3")),
            ("chips", 5, 7, A("a2"), N),
            ("chips", 7, 9, N, A("c4")),
            ("dates", 1, 3, A("a3"), N),
            ("milk", 1, 2, N, A("c1")),
            ("milk", 2, 4, A("a1"), A("c1")),
            ("milk", 4, 6, A("a1"), N),
            ("milk", 6, 8, A("a1"), A("c2")),
            ("milk", 8, 10, A("a1"), N),
        ]
    )
    assert win_rows(rel_a, rel_b) == sorted(
        [
            ("chips", 3, 4, N, A("b2")),
            ("chips", 4, 6, A("a2"), A("b2")),
            ("chips", 6, 7, A("a2"), N),
            ("dates", 1, 3, A("a3"), N),
            ("milk", 2, 5, A("a1"), N),
            ("milk", 5, 9, A("a1"), A("b1")),
            ("milk", 9, 10, A("a1"), N),
        ]
    )


# --- randomized instances shared by criteria 4 and 5 ----------------------

REGIMES = [
    # (facts, tuples/side, max interval length): dense, sparse,
    # long-interval, point-heavy, few-tuple draws over a <=50-chronon domain
    (1, 30, 8),
    (5, 12, 3),
    (2, 20, 12),
    (3, 30, 1),
    (4, 6, 5),
]


def draw_side(rng: np.random.Generator, prefix: str, n_facts: int,
              n_tuples: int, max_len: int) -> TpRelation:
    rows: list[TpTuple] = []
    used: dict = {}
    k = 0
    for _ in range(n_tuples * 30):
        if len(rows) >= n_tuples:
            break
        f = (f"f{int(rng.integers(0, n_facts))}",)
        length = int(rng.integers(1, max_len + 1))
        ts = int(rng.integers(0, 50 - length))
        iv = Interval(ts, ts + length)
        if any(iv.overlaps(o) for o in used.get(f, [])):
            continue
        used.setdefault(f, []).append(iv)
        k += 1
        rows.append(
            TpTuple(
                f,
                Atom(f"{prefix}{k}"),
                iv,
                float(np.round(0.05 + 0.9 * rng.random(), 9)),
            )
        )
    return TpRelation.from_tuples(rows)


def draw_instance(i: int) -> tuple[TpRelation, TpRelation]:
    rng = np.random.default_rng(910_000 + i)
    facts, tuples_, max_len = REGIMES[i % len(REGIMES)]
    r = draw_side(rng, "r", facts, tuples_, max_len)
    s = draw_side(rng, "s", facts, tuples_, max_len)
    return r, s


def test_criterion_04_randomized_equivalence_vs_oracle():
    t0 = time.perf_counter()
    for i in range(1000):
        r, s = draw_instance(i)
        for kind in SetOpKind:
            fast = apply_setop(kind, r, s)
            slow = oracle_setop(kind, r, s)
            f_rows = list(fast)
            s_rows = list(slow)
            assert [
                (t.fact, t.interval.ts, t.interval.te) for t in f_rows
            ] == [
                (t.fact, t.interval.ts, t.interval.te) for t in s_rows
            ], (i, kind)
            for tf, ts_ in zip(f_rows, s_rows):
                assert syntactic_equiv(tf.lineage, ts_.lineage), (i, kind)
                assert abs(tf.p - ts_.p) <= 1e-9, (i, kind)
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0, f"1000 oracle comparisons took {elapsed:.1f}s"


def test_criterion_05_window_count_bound():
    for i in range(1000):
        r, s = draw_instance(i)
        facts = {t.fact for t in r} | {t.fact for t in s}
        if not facts:
            continue
        # interval endpoints of both sides, minus one per distinct fact
        bound = 2 * len(r) + 2 * len(s) - len(facts)
        assert len(windows(r, s)) <= bound, i


def test_criterion_06_composed_queries_stay_one_occurrence():
    counter = itertools.count(1)

    def leaf(rng: np.random.Generator) -> TpRelation:
        return generate(
            GenParams(
                num_tuples=int(rng.integers(5, 25)),
                num_facts=int(rng.integers(1, 4)),
                max_interval_len=int(rng.integers(1, 7)),
                max_gap=int(rng.integers(0, 4)),
                seed=int(rng.integers(0, 2**31)),
                atom_prefix=f"q{next(counter)}x",
            )
        )

    def tree(rng: np.random.Generator, depth: int) -> TpRelation:
        if depth == 0 or rng.random() < 0.3:
            return leaf(rng)
        kind = list(SetOpKind)[int(rng.integers(0, 3))]
        return apply_setop(kind, tree(rng, depth - 1), tree(rng, depth - 1))

    for q in range(200):
        rng = np.random.default_rng(770_000 + q)
        out = tree(rng, 3)
        env = out.atom_probs
        for t in out:
            assert is_one_occurrence_form(t.lineage), (q, t.lineage)
            # the one-occurrence branch of evaluation is the linear one;
            # re-evaluation must reproduce the stored annotation
            assert abs(probability(t.lineage, env) - t.p) <= 1e-12, q


def test_criterion_07_probability_vs_enumeration():
    def formula(rng: np.random.Generator, atoms: list[str], depth: int):
        if depth == 0 or rng.random() < 0.3:
            return Atom(atoms[int(rng.integers(0, len(atoms)))])
        pick = rng.random()
        if pick < 0.2:
            return Not(formula(rng, atoms, depth - 1))
        left = formula(rng, atoms, depth - 1)
        right = formula(rng, atoms, depth - 1)
        return And(left, right) if pick < 0.6 else Or(left, right)

    for q in range(500):
        rng = np.random.default_rng(550_000 + q)
        n_atoms = int(rng.integers(1, 13))
        atoms = [f"v{j}" for j in range(n_atoms)]
        env = {a: float(np.round(0.05 + 0.9 * rng.random(), 9)) for a in atoms}
        lam = formula(rng, atoms, int(rng.integers(1, 6)))
        assert abs(probability(lam, env) - enum_probability(lam, env)) <= 1e-12, q


def test_criterion_08_scaling_and_ten_million_intersect():
    sizes = [1_000_000, 2_000_000, 4_000_000, 8_000_000]
    results = bench_setop(
        SetOpKind.INTERSECTION,
        sizes,
        repeats=3,
        seed=0,
        max_len=3,
        max_gap=1,
        measure_factor=True,
    )
    medians = [row.median_ms for row, _ in results]
    factors = [factor for _, factor in results]
    for factor in factors:
        assert 0.55 < factor < 0.65, factors
    for prev, curr in zip(medians, medians[1:]):
        assert curr / prev <= 2.6, medians

    big = 10_000_000
    r = generate(GenParams(big, 1, 3, 1, seed=0, atom_prefix="a"))
    s = generate(GenParams(big, 1, 3, 1, seed=1, atom_prefix="b"))
    t0 = time.perf_counter()
    out = intersect(r, s)
    elapsed = time.perf_counter() - t0
    assert len(out) > 0
    assert elapsed <= 120.0, f"10M-per-side intersect took {elapsed:.1f}s"


def test_criterion_09_runtime_stability_across_datasets():
    size = 1_000_000

    def median_ms(**kwargs) -> float:
        rows = bench_setop(
            SetOpKind.INTERSECTION, [size], repeats=3, seed=0, **kwargs
        )
        return rows[0].median_ms

    # five coverage regimes, from near-disjoint to densely overlapping
    layouts = [
        dict(max_len=100, max_len_s=3, max_gap=3, max_gap_s=3),
        dict(max_len=100, max_len_s=10, max_gap=3, max_gap_s=3),
        dict(max_len=50, max_len_s=10, max_gap=3, max_gap_s=3),
        dict(max_len=3, max_gap=3),
        dict(max_len=10, max_gap=3),
    ]
    times = [median_ms(**lay) for lay in layouts]
    med = sorted(times)[len(times) // 2]
    for t in times:
        assert 0.7 * med <= t <= 1.3 * med, times

    fact_counts = [1, 10, 100, 10_000]
    times_f = [
        median_ms(num_facts=nf, max_len=3, max_gap=3) for nf in fact_counts
    ]
    med_f = sorted(times_f)[len(times_f) // 2]
    for t in times_f:
        assert 0.7 * med_f <= t <= 1.3 * med_f, times_f


def test_criterion_10_serialization_round_trip():
    import io as _io

    for q in range(100):
        rng = np.random.default_rng(330_000 + q)
        n = int(rng.integers(1, 400))
        params = GenParams(
            num_tuples=n,
            num_facts=int(rng.integers(1, min(n, 9) + 1)),
            max_interval_len=int(rng.integers(1, 12)),
            max_gap=int(rng.integers(0, 6)),
            prob_range=(0.05, 1.0),
            seed=q,
        )
        r = generate(params)
        text = write_relation(r)
        back, env = read_relation(_io.StringIO(text))
        assert write_relation(back) == text, q
        assert rows_key(back) == rows_key(r), q
        assert dict(env) == dict(r.atom_probs), q
