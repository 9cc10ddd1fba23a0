"""Lineage formulas and exact probability evaluation.

Atoms are independent events. A row's lineage says which combination of
events puts the row's fact into the relation, and `probability` turns a
formula plus per-atom probabilities into the exact marginal.

Run:  python3 demos/03_probabilities.py
"""

import itertools
from math import prod

from tpset import (
    And,
    Atom,
    Not,
    Or,
    intersect,
    is_one_occurrence_form,
    parse_lineage,
    probability,
)
from tpset import GenParams, generate

env = {"x": 0.3, "y": 0.6, "z": 0.7}

# Formulas where every atom appears once evaluate in linear time, one
# arithmetic rule per node.
lam = parse_lineage("x & !(y | z)")
print(f"{lam!r}  ->  {probability(lam, env):.6f}")
print("single occurrence per atom:", is_one_occurrence_form(lam))

# Repeated atoms need world splitting; still exact, just costlier.
rep = Or(And(Atom("x"), Atom("y")), And(Atom("x"), Atom("z")))
print(f"\n{rep!r}  ->  {probability(rep, env):.6f}")
print("single occurrence per atom:", is_one_occurrence_form(rep))


# Cross-check against brute-force world enumeration.
def enumerate_worlds(lam, probs):
    def holds(lam, world):
        if isinstance(lam, Atom):
            return world[lam.id]
        if isinstance(lam, Not):
            return not holds(lam.child, world)
        if isinstance(lam, And):
            return holds(lam.left, world) and holds(lam.right, world)
        return holds(lam.left, world) or holds(lam.right, world)

    names = sorted(probs)
    total = 0.0
    for bits in itertools.product((False, True), repeat=len(names)):
        world = dict(zip(names, bits))
        if holds(lam, world):
            total += prod(
                probs[n] if v else 1.0 - probs[n] for n, v in world.items()
            )
    return total


for f in (lam, rep):
    exact = probability(f, env)
    brute = enumerate_worlds(f, env)
    print(f"\nevaluator {exact:.12f}  enumeration {brute:.12f}")
    assert abs(exact - brute) <= 1e-12

# Set operations keep outputs in single-occurrence form, so results of
# composed queries stay cheap to evaluate no matter how deep the query.
r = generate(GenParams(1000, 4, 5, 2, seed=7, atom_prefix="left"))
s = generate(GenParams(1000, 4, 5, 2, seed=8, atom_prefix="right"))
out = intersect(r, s)
assert all(is_one_occurrence_form(t.lineage) for t in out)
print(f"\nintersect of two generated relations: {len(out)} rows, "
      "all lineages single-occurrence")
