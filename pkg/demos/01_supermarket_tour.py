"""A first tour: three shopping logs and the set operations.

Three trackers watched the same shelves over a ten-chronon day and each
produced a duplicate-free log: per product, non-overlapping intervals
during which the product was (probably) in the basket. Each row carries
an atom, an independent Bernoulli event, and the probability that the
event is true.

Run:  python3 demos/01_supermarket_tour.py
"""

from tpset import (
    Atom,
    Interval,
    TpRelation,
    TpTuple,
    except_,
    intersect,
    probability,
    union,
    write_relation,
)


def log(rows):
    return TpRelation.from_tuples(
        [
            TpTuple((fact,), Atom(atom), Interval(ts, te), p)
            for fact, atom, ts, te, p in rows
        ]
    )


a = log(
    [
        ("milk", "a1", 2, 10, 0.3),
        ("chips", "a2", 4, 7, 0.8),
        ("dates", "a3", 1, 3, 0.6),
    ]
)
b = log(
    [
        ("milk", "b1", 5, 9, 0.6),
        ("chips", "b2", 3, 6, 0.9),
    ]
)
c = log(
    [
        ("milk", "c1", 1, 4, 0.6),
        ("milk", "c2", 6, 8, 0.7),
        ("chips", "c3", 4, 5, 0.7),
        ("chips", "c4", 7, 9, 0.8),
    ]
)

print("=== tracker a ===")
print(write_relation(a))

print("=== a intersect c: both trackers agree the product is there ===")
print(write_relation(intersect(a, c)))

# The intersection of milk over [2,4) reads "a1 & c1": present only in
# worlds where both observations hold, so p = 0.3 * 0.6 = 0.18.

print("=== a except c: seen by a but not by c ===")
print(write_relation(except_(a, c)))

print("=== a union c ===")
print(write_relation(union(a, c)))

print("=== composed: c except (a union b) ===")
out = except_(c, union(a, b))
print(write_relation(out))

# Stored probabilities are exact. Re-evaluating each row's lineage
# against the atom probabilities reproduces them.
env = out.atom_probs
worst = max(abs(probability(t.lineage, env) - t.p) for t in out)
print(f"largest re-evaluation error: {worst:.2e}")
