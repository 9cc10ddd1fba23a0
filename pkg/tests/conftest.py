"""Shared fixtures: the supermarket example relations and small helpers.

The three relations a, b, c below are the worked example used throughout
the tests; their operation results and window sets are known by hand.
"""

from __future__ import annotations

import itertools
from math import prod

import pytest

from tpset import (
    And,
    Atom,
    Interval,
    Lineage,
    Not,
    Or,
    TpRelation,
    TpTuple,
)


def rel(rows, **kwargs) -> TpRelation:
    """rows: (fact_name, atom_id, ts, te, p) with a single-attribute fact."""
    return TpRelation.from_tuples(
        [
            TpTuple((fact,), Atom(atom), Interval(ts, te), p)
            for fact, atom, ts, te, p in rows
        ],
        **kwargs,
    )


@pytest.fixture
def rel_a() -> TpRelation:
    return rel(
        [
            ("milk", "a1", 2, 10, 0.3),
            ("chips", "a2", 4, 7, 0.8),
            ("dates", "a3", 1, 3, 0.6),
        ]
    )


@pytest.fixture
def rel_b() -> TpRelation:
    return rel(
        [
            ("milk", "b1", 5, 9, 0.6),
            ("chips", "b2", 3, 6, 0.9),
        ]
    )


@pytest.fixture
def rel_c() -> TpRelation:
    return rel(
        [
            ("milk", "c1", 1, 4, 0.6),
            ("milk", "c2", 6, 8, 0.7),
            ("chips", "c3", 4, 5, 0.7),
            ("chips", "c4", 7, 9, 0.8),
        ]
    )


# --- independent probability oracle -----------------------------------------
#
# Truth-table enumeration over all assignments of the formula's atoms.
# Kept deliberately separate from the library's evaluator so the two can
# disagree when one of them is wrong.


def world_eval(lam: Lineage, world: dict[str, bool]) -> bool:
    if isinstance(lam, Atom):
        return world[lam.id]
    if isinstance(lam, Not):
        return not world_eval(lam.child, world)
    if isinstance(lam, And):
        return world_eval(lam.left, world) and world_eval(lam.right, world)
    if isinstance(lam, Or):
        return world_eval(lam.left, world) or world_eval(lam.right, world)
    raise TypeError(lam)


def collect_atoms(lam: Lineage) -> set[str]:
    if isinstance(lam, Atom):
        return {lam.id}
    if isinstance(lam, Not):
        return collect_atoms(lam.child)
    return collect_atoms(lam.left) | collect_atoms(lam.right)


def enum_probability(lam: Lineage, probs: dict[str, float]) -> float:
    atoms = sorted(collect_atoms(lam))
    total = 0.0
    for bits in itertools.product((False, True), repeat=len(atoms)):
        world = dict(zip(atoms, bits))
        if world_eval(lam, world):
            total += prod(
                probs[atom] if value else 1.0 - probs[atom]
                for atom, value in world.items()
            )
    return total


def rows_key(relation: TpRelation):
    """(fact, ts, te, p) rows for order-insensitive comparison."""
    return sorted(
        (t.fact, t.interval.ts, t.interval.te, t.p) for t in relation
    )
