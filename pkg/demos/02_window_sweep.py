"""How the engine aligns two relations: windows and the resumable sweep.

Every set operation starts the same way. For each fact, the time axis is
cut wherever either operand starts or ends an interval, producing maximal
windows over which the operands are constant. A window remembers which
side covers it (its lineage on that side, or nothing).

Run:  python3 demos/02_window_sweep.py
"""

from tpset import (
    Atom,
    Interval,
    TpRelation,
    TpTuple,
    init_status,
    next_window,
    sort_relation,
    windows,
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
c = log(
    [
        ("milk", "c1", 1, 4, 0.6),
        ("milk", "c2", 6, 8, 0.7),
        ("chips", "c3", 4, 5, 0.7),
        ("chips", "c4", 7, 9, 0.8),
    ]
)

print("=== all windows of (a, c) ===")
for w in windows(a, c):
    print(
        f"{w.fact[0]:>6} [{w.interval.ts},{w.interval.te})"
        f"  left={w.lam_r!r:12}  right={w.lam_s!r}"
    )

# Count never exceeds the endpoint budget: two endpoints per tuple on
# each side, minus one per distinct fact.
facts = {t.fact for t in a} | {t.fact for t in c}
print(f"\n{len(windows(a, c))} windows, bound {2*len(a) + 2*len(c) - len(facts)}")

# The sweep is a pure step function: status in, (window, status) out.
# Any intermediate status can be stashed and resumed later, even twice.
# Unlike windows(), the raw cursor insists on (fact, ts)-sorted input.
print("\n=== resumable sweep ===")
status = init_status(sort_relation(a), sort_relation(c))
first_three = []
for _ in range(3):
    win, status = next_window(status)
    first_three.append(win)
print("first three:", [(w.fact[0], w.interval.ts, w.interval.te) for w in first_three])

stash = status  # suspend here

rest_one = []
cur = stash
while True:
    win, cur = next_window(cur)
    if win is None:
        break
    rest_one.append(win)

rest_two = []
cur = stash  # same stashed status, replayed
while True:
    win, cur = next_window(cur)
    if win is None:
        break
    rest_two.append(win)

assert rest_one == rest_two
print(f"resumed twice from the stash, both runs gave {len(rest_one)} more windows")
