"""Boolean lineage formulas over independent base atoms.

A lineage is a propositional formula whose leaves are atom identifiers.
Each atom stands for one base tuple and carries an independent marginal
probability. Formulas are plain immutable trees; the module deliberately
performs no algebraic simplification anywhere, so the shape a caller
builds is the shape that gets stored, printed and compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Union

__all__ = [
    "Atom",
    "Not",
    "And",
    "Or",
    "Lineage",
    "ProbAssignment",
    "LineageError",
    "LineageSyntaxError",
    "MissingAtomError",
    "RepeatBudgetError",
    "MAX_REPEATED_ATOMS",
    "and_fn",
    "and_not_fn",
    "or_fn",
    "base_atoms",
    "atom_occurrences",
    "is_one_occurrence_form",
    "canonicalize",
    "syntactic_equiv",
    "probability",
    "parse_lineage",
    "print_lineage",
]

# atom id -> marginal probability, each in (0, 1]
ProbAssignment = Mapping[str, float]

# Exact evaluation of a formula with k repeated atoms costs 2^k conditional
# passes. 2^25 is a few seconds of work; beyond that we refuse rather than
# silently hang.
MAX_REPEATED_ATOMS = 25


class LineageError(ValueError):
    """Base class for lineage failures."""


class LineageSyntaxError(LineageError):
    """Raised by the text parser; carries a 1-based column position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"column {position}: {message}")
        self.position = position


class MissingAtomError(LineageError):
    """An atom in the formula has no probability in the assignment."""


class RepeatBudgetError(LineageError):
    """Too many distinct repeated atoms for exact evaluation."""


@dataclass(frozen=True, slots=True)
class Atom:
    id: str


@dataclass(frozen=True, slots=True)
class Not:
    child: "Lineage"


@dataclass(frozen=True, slots=True)
class And:
    left: "Lineage"
    right: "Lineage"


@dataclass(frozen=True, slots=True)
class Or:
    left: "Lineage"
    right: "Lineage"


Lineage = Union[Atom, Not, And, Or]


# ---------------------------------------------------------------------------
# concatenation functions
#
# These combine the lineages of two aligned tuples. Absence of a tuple is
# modelled as None, never as a formula, and the combinators below are the
# only places that interpret None. All three build the result purely
# syntactically.
# ---------------------------------------------------------------------------


def and_fn(lam1: Optional[Lineage], lam2: Optional[Lineage]) -> Lineage:
    """Conjunction. Both sides must be present."""
    if lam1 is None or lam2 is None:
        raise LineageError("and_fn requires both lineages to be present")
    return And(lam1, lam2)


def and_not_fn(lam1: Optional[Lineage], lam2: Optional[Lineage]) -> Lineage:
    """First side minus the second. lam2 may be absent; lam1 may not."""
    if lam1 is None:
        raise LineageError("and_not_fn requires the first lineage to be present")
    if lam2 is None:
        return lam1
    return And(lam1, Not(lam2))


def or_fn(lam1: Optional[Lineage], lam2: Optional[Lineage]) -> Lineage:
    """Disjunction. A lone side passes through unchanged."""
    if lam1 is None:
        if lam2 is None:
            raise LineageError("or_fn requires at least one lineage")
        return lam2
    if lam2 is None:
        return lam1
    return Or(lam1, lam2)


# ---------------------------------------------------------------------------
# structure queries
# ---------------------------------------------------------------------------


def _count_atoms(lam: Lineage) -> dict[str, int]:
    # Iterative walk; composed query results can nest deeper than the
    # default recursion limit would forgive.
    counts: dict[str, int] = {}
    stack = [lam]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            counts[node.id] = counts.get(node.id, 0) + 1
        elif isinstance(node, Not):
            stack.append(node.child)
        else:
            stack.append(node.left)
            stack.append(node.right)
    return counts


def base_atoms(lam: Lineage) -> frozenset[str]:
    """The set of atom ids occurring in the formula."""
    return frozenset(_count_atoms(lam))


def atom_occurrences(lam: Lineage) -> int:
    """Total number of atom leaves, counting repeats."""
    return sum(_count_atoms(lam).values())


def is_one_occurrence_form(lam: Lineage) -> bool:
    """True when no atom id occurs more than once."""
    counts = _count_atoms(lam)
    return all(c == 1 for c in counts.values())


# ---------------------------------------------------------------------------
# canonical form and syntactic equivalence
# ---------------------------------------------------------------------------


def canonicalize(lam: Lineage) -> Lineage:
    """Normalize for comparison: flatten nested chains of the same
    commutative operator and sort the collected operands by a
    deterministic structural key. Negation is left where it stands.
    The result is a left-nested chain, so equal canonical forms are
    structurally equal trees.
    """
    if isinstance(lam, Atom):
        return lam
    if isinstance(lam, Not):
        return Not(canonicalize(lam.child))
    op = type(lam)
    parts: list[Lineage] = []
    stack: list[Lineage] = [lam]
    while stack:
        node = stack.pop()
        if isinstance(node, op):
            stack.append(node.left)
            stack.append(node.right)
        else:
            parts.append(canonicalize(node))
    parts.sort(key=_structural_key)
    out = parts[0]
    for nxt in parts[1:]:
        out = op(out, nxt)
    return out


def _structural_key(lam: Lineage) -> str:
    # Preorder serialization. Only ever called on canonical subtrees, so
    # equal keys mean equal trees.
    out: list[str] = []
    stack = [lam]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            out.append("a:" + node.id)
        elif isinstance(node, Not):
            out.append("!(")
            stack.append(node.child)
        elif isinstance(node, And):
            out.append("&(")
            stack.append(node.right)
            stack.append(node.left)
        else:
            out.append("|(")
            stack.append(node.right)
            stack.append(node.left)
    return "\x00".join(out)


def syntactic_equiv(lam1: Optional[Lineage], lam2: Optional[Lineage]) -> bool:
    """Equivalence up to flattening/reordering of & and | chains.

    Sound but deliberately incomplete: logically equal formulas with
    different structure (say distributed vs factored) compare unequal.
    Both-absent compares equal; absent never equals a formula.
    """
    if lam1 is None or lam2 is None:
        return lam1 is None and lam2 is None
    if lam1 == lam2:
        return True
    return canonicalize(lam1) == canonicalize(lam2)


# ---------------------------------------------------------------------------
# probability
# ---------------------------------------------------------------------------


def probability(lam: Lineage, probs: ProbAssignment) -> float:
    """Exact marginal probability of the formula under independent atoms.

    One-occurrence formulas evaluate in a single linear pass. Otherwise
    every atom that occurs more than once is pinned to true/false by
    Shannon expansion and the pinned residue (one-occurrence by
    construction) is evaluated linearly, which stays exact.
    """
    counts = _count_atoms(lam)
    missing = sorted(a for a in counts if a not in probs)
    if missing:
        raise MissingAtomError(
            "no probability for atom(s): " + ", ".join(missing)
        )
    repeated = sorted(a for a, c in counts.items() if c > 1)
    if not repeated:
        return _eval_pinned(lam, probs, {})
    if len(repeated) > MAX_REPEATED_ATOMS:
        raise RepeatBudgetError(
            f"{len(repeated)} repeated atoms exceeds the exact-evaluation "
            f"budget of {MAX_REPEATED_ATOMS}"
        )
    return _shannon(lam, probs, repeated, 0, {})


def _shannon(
    lam: Lineage,
    probs: ProbAssignment,
    repeated: list[str],
    i: int,
    pinned: dict[str, float],
) -> float:
    if i == len(repeated):
        return _eval_pinned(lam, probs, pinned)
    atom = repeated[i]
    p = probs[atom]
    pinned[atom] = 1.0
    hi = _shannon(lam, probs, repeated, i + 1, pinned)
    pinned[atom] = 0.0
    lo = _shannon(lam, probs, repeated, i + 1, pinned)
    del pinned[atom]
    return p * hi + (1.0 - p) * lo


def _eval_pinned(
    lam: Lineage, probs: ProbAssignment, pinned: dict[str, float]
) -> float:
    # Exact when every repeated atom is pinned: the remaining free atoms
    # occur once each, so subformulas are independent.
    if isinstance(lam, Atom):
        v = pinned.get(lam.id)
        return probs[lam.id] if v is None else v
    if isinstance(lam, Not):
        return 1.0 - _eval_pinned(lam.child, probs, pinned)
    if isinstance(lam, And):
        return _eval_pinned(lam.left, probs, pinned) * _eval_pinned(
            lam.right, probs, pinned
        )
    return 1.0 - (1.0 - _eval_pinned(lam.left, probs, pinned)) * (
        1.0 - _eval_pinned(lam.right, probs, pinned)
    )


# ---------------------------------------------------------------------------
# text form
#
#   or_expr  := and_expr ('|' and_expr)*
#   and_expr := unary ('&' unary)*
#   unary    := '!' unary | atom | '(' or_expr ')'
#
# & binds tighter than |, ! tighter than both, chains are left
# associative, whitespace is insignificant. Atom ids match
# [A-Za-z_][A-Za-z0-9_]*.
# ---------------------------------------------------------------------------


def parse_lineage(text: str) -> Lineage:
    """Parse the text form. Raises LineageSyntaxError with a 1-based
    column position on bad input."""
    parser = _Parser(text)
    node = parser.parse_or()
    parser.expect_end()
    return node


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0  # 0-based index into text

    def _skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip_ws()
        if self.pos >= len(self.text):
            return ""
        return self.text[self.pos]

    def _fail(self, message: str) -> None:
        raise LineageSyntaxError(message, self.pos + 1)

    def parse_or(self) -> Lineage:
        node = self.parse_and()
        while self._peek() == "|":
            self.pos += 1
            node = Or(node, self.parse_and())
        return node

    def parse_and(self) -> Lineage:
        node = self.parse_unary()
        while self._peek() == "&":
            self.pos += 1
            node = And(node, self.parse_unary())
        return node

    def parse_unary(self) -> Lineage:
        ch = self._peek()
        if ch == "!":
            self.pos += 1
            return Not(self.parse_unary())
        if ch == "(":
            self.pos += 1
            node = self.parse_or()
            if self._peek() != ")":
                self._fail("expected ')'")
            self.pos += 1
            return node
        if ch == "" or not (ch.isalpha() or ch == "_"):
            self._fail("expected an atom, '!' or '('")
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        return Atom(self.text[start : self.pos])

    def expect_end(self) -> None:
        if self._peek() != "":
            self._fail("unexpected trailing input")


# precedence levels for the printer; higher binds tighter
_PREC_OR = 1
_PREC_AND = 2


def print_lineage(lam: Lineage) -> str:
    """Render with minimal parentheses.

    Lower-precedence children are parenthesized, as is a same-operator
    right child, so left-nested chains print flat and the original tree
    shape survives a parse round trip.
    """
    return _print(lam, 0, False)


def _print(lam: Lineage, parent_prec: int, right_of_same: bool) -> str:
    if isinstance(lam, Atom):
        return lam.id
    if isinstance(lam, Not):
        if isinstance(lam.child, Atom):
            return "!" + lam.child.id
        return "!(" + _print(lam.child, 0, False) + ")"
    if isinstance(lam, And):
        prec = _PREC_AND
        sep = " & "
    else:
        prec = _PREC_OR
        sep = " | "
    s = _print(lam.left, prec, False) + sep + _print(lam.right, prec, True)
    if parent_prec > prec or (parent_prec == prec and right_of_same):
        return "(" + s + ")"
    return s
