"""Temporal-probabilistic set operations.

Each operation is a window sweep followed by a per-window filter and a
lineage concatenation:

  intersection  keep windows covered on both sides      (l1) and (l2)
  difference    keep windows covered on the left side   l1 [and not l2]
  union         keep every window                       pass-through/or

Output probabilities are exact. When the two inputs provably share no
atom ids the arithmetic works directly on the operand tuple
probabilities (independence), which is what makes the million-tuple
benchmarks feasible; otherwise each output formula is evaluated against
the merged probability environment, which handles deliberately repeated
atoms at exponential cost in the number of repeats.

Outputs are snapshot-correct: adjacent output tuples of one fact whose
lineages are syntactically equivalent get merged, because per-snapshot
semantics cannot tell them apart. The merge pass is skipped when it is
provably a no-op.
"""

from __future__ import annotations

import enum
from typing import Optional

import numpy as np

from .lineage import (
    Lineage,
    LineageError,
    and_fn,
    and_not_fn,
    or_fn,
    probability,
    syntactic_equiv,
)
from .model import (
    Fact,
    Interval,
    LineageColumn,
    MergedProbEnv,
    OpLineageColumn,
    RelationError,
    DuplicateFreeError,
    TpRelation,
    sort_relation,
    validate_duplicate_free,
)
from .sweep import SweepStatus, init_status, next_window, window_table

__all__ = [
    "SetOpKind",
    "apply_setop",
    "intersect",
    "union",
    "except_",
]


def _side_live(valid, pos: int, rel: TpRelation) -> bool:
    # a side can still contribute while its cursor has tuples left or a
    # promoted tuple keeps covering the current region
    return valid is not None or pos < len(rel)


class SetOpKind(enum.Enum):
    """The three operations, each bundling its window filter, its
    lineage concatenation and its sweep liveness rule."""

    INTERSECTION = "intersect"
    UNION = "union"
    DIFFERENCE = "except"

    def window_filter(self, r_present: bool, s_present: bool) -> bool:
        if self is SetOpKind.INTERSECTION:
            return r_present and s_present
        if self is SetOpKind.DIFFERENCE:
            return r_present
        return True

    def concat(
        self, lam_r: Optional[Lineage], lam_s: Optional[Lineage]
    ) -> Lineage:
        if self is SetOpKind.INTERSECTION:
            return and_fn(lam_r, lam_s)
        if self is SetOpKind.DIFFERENCE:
            return and_not_fn(lam_r, lam_s)
        return or_fn(lam_r, lam_s)

    @property
    def column_kind(self) -> str:
        if self is SetOpKind.INTERSECTION:
            return "and"
        if self is SetOpKind.DIFFERENCE:
            return "andnot"
        return "or"

    def sweep_live(self, status: SweepStatus) -> bool:
        """Whether continuing the sweep can still produce output.

        Intersection needs both sides, difference only the left, union
        either. A side counts as live while its cursor OR its promoted
        valid tuple is present; testing the cursor alone would cut off
        a long tuple that outlives the other side's last one.
        """
        r_live = _side_live(status.r_valid, status.r_pos, status.r_rel)
        s_live = _side_live(status.s_valid, status.s_pos, status.s_rel)
        if self is SetOpKind.INTERSECTION:
            return r_live and s_live
        if self is SetOpKind.DIFFERENCE:
            return r_live
        return r_live or s_live


def _check_operands(r: TpRelation, s: TpRelation) -> tuple[TpRelation, TpRelation]:
    if r.arity is not None and s.arity is not None and r.arity != s.arity:
        raise RelationError(
            f"operand fact arities differ: {r.arity} vs {s.arity}"
        )
    r = sort_relation(r)
    s = sort_relation(s)
    for rel in (r, s):
        bad = validate_duplicate_free(rel)
        if bad is not None:
            raise DuplicateFreeError(*bad)
    return r, s


def apply_setop(kind: SetOpKind, r: TpRelation, s: TpRelation) -> TpRelation:
    """Evaluate one set operation. Operands may arrive unsorted; the
    result is sorted, duplicate-free and carries the merged probability
    environment of its operands."""
    r, s = _check_operands(r, s)
    wt = window_table(r, s)

    r_has = wt.r_idx >= 0
    s_has = wt.s_idx >= 0
    if kind is SetOpKind.INTERSECTION:
        keep = r_has & s_has
    elif kind is SetOpKind.DIFFERENCE:
        keep = r_has
    else:
        keep = np.ones(len(wt), dtype=bool)

    codes = wt.fact_codes[keep]
    ts = wt.ts[keep]
    te = wt.te[keep]
    ri = wt.r_idx[keep]
    si = wt.s_idx[keep]
    col: LineageColumn = OpLineageColumn(
        kind.column_kind, r.lineage_column, s.lineage_column, ri, si
    )
    env = _merge_envs(r.atom_probs, s.atom_probs)

    disjoint = r.lineage_column.atom_space().provably_disjoint(
        s.lineage_column.atom_space()
    )
    if disjoint:
        p = _independent_probs(kind, r, s, ri, si)
    else:
        p = np.fromiter(
            (probability(col.get(i), env) for i in range(len(ri))),
            dtype=np.float64,
            count=len(ri),
        )

    # A window whose lineage holds in no world of positive measure (for
    # example r minus r, where it reads x and not-x) has no valid
    # representation as a tuple; such rows are dropped.
    pos = p > 0.0
    if not bool(pos.all()):
        idx = np.flatnonzero(pos)
        codes = codes[idx]
        ts = ts[idx]
        te = te[idx]
        p = p[idx]
        col = col.take(idx)

    # Merging equivalent adjacent outputs is provably impossible when
    # the sides share no atoms and neither repeats a formula across its
    # own rows, because adjacent windows always change the covering
    # tuple on some side.
    if not (
        disjoint
        and r.lineage_column.rows_distinct_hint()
        and s.lineage_column.rows_distinct_hint()
    ):
        codes, ts, te, p, col = _coalesce(codes, ts, te, p, col)

    return TpRelation(
        wt.fact_table, codes, ts, te, p, col, env, is_sorted=True
    )


def intersect(r: TpRelation, s: TpRelation) -> TpRelation:
    return apply_setop(SetOpKind.INTERSECTION, r, s)


def union(r: TpRelation, s: TpRelation) -> TpRelation:
    return apply_setop(SetOpKind.UNION, r, s)


def except_(r: TpRelation, s: TpRelation) -> TpRelation:
    """Temporal-probabilistic difference r minus s."""
    return apply_setop(SetOpKind.DIFFERENCE, r, s)


def _merge_envs(e1, e2):
    if isinstance(e1, dict) and isinstance(e2, dict):
        out = dict(e1)
        for k, v in e2.items():
            if k in out and out[k] != v:
                raise LineageError(
                    f"atom {k} has conflicting probabilities {out[k]} and {v}"
                )
            out[k] = v
        return out
    return MergedProbEnv(e1, e2)


def _independent_probs(
    kind: SetOpKind,
    r: TpRelation,
    s: TpRelation,
    ri: np.ndarray,
    si: np.ndarray,
) -> np.ndarray:
    # Safe gathers: masked-out indices read row 0 and are discarded by
    # the np.where selections below.
    pr = (
        r.p_array[np.maximum(ri, 0)]
        if len(r)
        else np.zeros(len(ri), dtype=np.float64)
    )
    ps = (
        s.p_array[np.maximum(si, 0)]
        if len(s)
        else np.zeros(len(si), dtype=np.float64)
    )
    if kind is SetOpKind.INTERSECTION:
        return pr * ps
    if kind is SetOpKind.DIFFERENCE:
        return np.where(si >= 0, pr * (1.0 - ps), pr)
    both = (ri >= 0) & (si >= 0)
    return np.where(
        both, 1.0 - (1.0 - pr) * (1.0 - ps), np.where(ri >= 0, pr, ps)
    )


def _coalesce(codes, ts, te, p, col: LineageColumn):
    """Merge runs of contiguous same-fact rows with equivalent lineages.

    Candidates are found vectorized; the (potentially costly)
    equivalence test runs only per candidate boundary.
    """
    n = len(codes)
    if n < 2:
        return codes, ts, te, p, col
    cand = (codes[:-1] == codes[1:]) & (te[:-1] == ts[1:])
    cand_idx = np.flatnonzero(cand)
    if len(cand_idx) == 0:
        return codes, ts, te, p, col
    merge_prev = np.zeros(n, dtype=bool)
    for i in cand_idx:
        if syntactic_equiv(col.get(int(i)), col.get(int(i) + 1)):
            merge_prev[i + 1] = True
    if not merge_prev.any():
        return codes, ts, te, p, col
    starts = np.flatnonzero(~merge_prev)
    ends = np.append(starts[1:], n) - 1
    return (
        codes[starts],
        ts[starts],
        te[ends],
        p[starts],
        col.take(starts),
    )


def _apply_via_sweep(
    kind: SetOpKind, r: TpRelation, s: TpRelation
) -> list[tuple[Fact, Interval, Lineage]]:
    """Reference evaluation that drives the resumable sweep directly,
    using the kind's liveness rule to stop early. Returns bare rows
    without probabilities; exists so tests can hold the vectorized path
    to the step-by-step one."""
    status = init_status(sort_relation(r), sort_relation(s))
    rows: list[tuple[Fact, Interval, Lineage]] = []
    while kind.sweep_live(status):
        win, status = next_window(status)
        if win is None:
            break
        if kind.window_filter(win.lam_r is not None, win.lam_s is not None):
            rows.append(
                (win.fact, win.interval, kind.concat(win.lam_r, win.lam_s))
            )
    merged: list[tuple[Fact, Interval, Lineage]] = []
    for row in rows:
        if (
            merged
            and merged[-1][0] == row[0]
            and merged[-1][1].te == row[1].ts
            and syntactic_equiv(merged[-1][2], row[2])
        ):
            prev = merged.pop()
            merged.append((prev[0], Interval(prev[1].ts, row[1].te), prev[2]))
        else:
            merged.append(row)
    return merged
