"""Sequenced temporal-probabilistic set algebra.

Relations hold facts over half-open chronon intervals, each tuple
carrying a Boolean lineage over independent base atoms and its exact
marginal probability. The package provides duplicate-free relations,
a resumable window sweep, the three set operations (intersection,
union, difference) with exact output probabilities, a chronon-level
reference evaluator, a synthetic data generator, TSV serialization and
the tpset command line tool.
"""

from .lineage import (
    MAX_REPEATED_ATOMS,
    And,
    Atom,
    Lineage,
    LineageError,
    LineageSyntaxError,
    MissingAtomError,
    Not,
    Or,
    ProbAssignment,
    RepeatBudgetError,
    and_fn,
    and_not_fn,
    atom_occurrences,
    base_atoms,
    canonicalize,
    is_one_occurrence_form,
    or_fn,
    parse_lineage,
    print_lineage,
    probability,
    syntactic_equiv,
)
from .model import (
    DuplicateFreeError,
    Fact,
    Interval,
    RelationError,
    TpRelation,
    TpTuple,
    Window,
    sort_relation,
    validate_duplicate_free,
)
from .sweep import (
    SweepStatus,
    WindowTable,
    init_status,
    next_window,
    window_table,
    windows,
)
from .setops import SetOpKind, apply_setop, except_, intersect, union
from .oracle import (
    SPAN_LIMIT,
    Snapshot,
    SpanLimitError,
    oracle_setop,
    snapshot_setop,
    timeslice,
)
from .datagen import GenParams, generate, overlapping_factor
from .tsvio import TsvFormatError, dump_relation, read_relation, write_relation
from .bench import BenchResult, bench_setop

__version__ = "0.1.0"

__all__ = [
    "MAX_REPEATED_ATOMS",
    "And",
    "Atom",
    "Lineage",
    "LineageError",
    "LineageSyntaxError",
    "MissingAtomError",
    "Not",
    "Or",
    "ProbAssignment",
    "RepeatBudgetError",
    "and_fn",
    "and_not_fn",
    "atom_occurrences",
    "base_atoms",
    "canonicalize",
    "is_one_occurrence_form",
    "or_fn",
    "parse_lineage",
    "print_lineage",
    "probability",
    "syntactic_equiv",
    "DuplicateFreeError",
    "Fact",
    "Interval",
    "RelationError",
    "TpRelation",
    "TpTuple",
    "Window",
    "sort_relation",
    "validate_duplicate_free",
    "SweepStatus",
    "WindowTable",
    "init_status",
    "next_window",
    "window_table",
    "windows",
    "SetOpKind",
    "apply_setop",
    "except_",
    "intersect",
    "union",
    "SPAN_LIMIT",
    "Snapshot",
    "SpanLimitError",
    "oracle_setop",
    "snapshot_setop",
    "timeslice",
    "GenParams",
    "generate",
    "overlapping_factor",
    "TsvFormatError",
    "dump_relation",
    "read_relation",
    "write_relation",
    "BenchResult",
    "bench_setop",
    "__version__",
]
