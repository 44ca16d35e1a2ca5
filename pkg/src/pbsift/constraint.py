"""
Normalized pseudo-Boolean constraints

A constraint is kept in normalized form: sum(coef * literal) >= degree with
strictly positive coefficients, at most one term per variable and a
non-negative degree. Coefficients and degrees are Python ints, so there is
no bound on their size.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from .errors import IncompleteAssignmentError, InconsistentTermError

# Partial or total assignment: variable -> truth value
Assignment = Mapping[int, bool]

_LITERAL_RE = re.compile(r"^(~?)x(\d+)$")


@dataclass(frozen=True, order=True)
class Literal:
    """A variable or its negation"""

    variable: int
    polarity: bool = True

    def __post_init__(self) -> None:
        if isinstance(self.variable, bool) or not isinstance(self.variable, int) or self.variable < 1:
            raise ValueError(f"variable index must be a positive integer, got {self.variable!r}")

    def negate(self) -> Literal:
        return Literal(self.variable, not self.polarity)

    def __neg__(self) -> Literal:
        return self.negate()

    def value(self, assignment: Assignment) -> Optional[bool]:
        """Truth value under a partial assignment, None when unassigned"""
        current = assignment.get(self.variable)
        if current is None:
            return None
        return current == self.polarity

    def is_falsified(self, assignment: Assignment) -> bool:
        return self.value(assignment) is False

    @classmethod
    def parse(cls, text: str) -> Literal:
        """Parse OPB literal syntax: x3 or ~x3"""
        match = _LITERAL_RE.match(text.strip())
        if not match:
            raise ValueError(f"not a literal: {text!r}")
        return cls(int(match.group(2)), match.group(1) != "~")

    def __str__(self) -> str:
        return f"x{self.variable}" if self.polarity else f"~x{self.variable}"


class Relation(Enum):
    """Relations accepted in raw (unnormalized) constraints"""

    GE = ">="
    GT = ">"
    EQ = "="
    LE = "<="
    LT = "<"


@dataclass(frozen=True)
class RawConstraint:
    """A constraint as written: signed coefficients, any relation"""

    terms: Tuple[Tuple[int, Literal], ...]
    relation: Relation
    rhs: int

    def __str__(self) -> str:
        body = " ".join(f"{coef:+d} {lit}" for coef, lit in self.terms)
        return f"{body} {self.relation.value} {self.rhs}".strip()


class PBConstraint:
    """Immutable normalized constraint sum(coef * literal) >= degree

    Terms are stored by variable as (coefficient, polarity) and kept sorted
    by variable index. An empty constraint with degree 0 is the canonical
    tautology; an empty constraint with a positive degree is a
    contradiction.
    """

    __slots__ = ("_terms", "_degree", "_total", "_hash")

    def __init__(self, terms: Optional[Mapping[int, Tuple[int, bool]]] = None, degree: int = 0) -> None:
        items = sorted((terms or {}).items())
        for var, (coef, polarity) in items:
            if isinstance(var, bool) or not isinstance(var, int) or var < 1:
                raise ValueError(f"invalid variable index {var!r}")
            if not isinstance(coef, int) or coef < 1:
                raise ValueError(f"coefficient of x{var} must be a positive integer, got {coef!r}")
            if not isinstance(polarity, bool):
                raise ValueError(f"polarity of x{var} must be a bool")
        if not isinstance(degree, int) or degree < 0:
            raise ValueError(f"degree must be a non-negative integer, got {degree!r}")
        self._terms: Dict[int, Tuple[int, bool]] = dict(items)
        self._degree = degree
        self._total = sum(coef for coef, _ in self._terms.values())
        self._hash: Optional[int] = None

    @classmethod
    def of(cls, terms: Iterable[Tuple[int, Literal]], degree: int) -> PBConstraint:
        """Build from (coefficient, literal) pairs that are already normalized"""
        table: Dict[int, Tuple[int, bool]] = {}
        for coef, lit in terms:
            if lit.variable in table:
                raise ValueError(f"variable x{lit.variable} occurs twice")
            table[lit.variable] = (coef, lit.polarity)
        return cls(table, degree)

    @classmethod
    def tautology(cls) -> PBConstraint:
        return cls({}, 0)

    @classmethod
    def contradiction(cls) -> PBConstraint:
        return cls({}, 1)

    @property
    def terms(self) -> Mapping[int, Tuple[int, bool]]:
        return MappingProxyType(self._terms)

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def coefficient_sum(self) -> int:
        return self._total

    @property
    def max_coefficient(self) -> int:
        return max((coef for coef, _ in self._terms.values()), default=0)

    def literals(self) -> List[Literal]:
        return [Literal(var, polarity) for var, (_, polarity) in self._terms.items()]

    def variables(self) -> List[int]:
        return list(self._terms)

    def coefficient(self, literal: Literal) -> int:
        """Coefficient of the literal, 0 when absent (or present negated)"""
        entry = self._terms.get(literal.variable)
        if entry is None or entry[1] != literal.polarity:
            return 0
        return entry[0]

    def is_tautology(self) -> bool:
        return self._degree == 0

    def is_contradiction(self) -> bool:
        return self._degree > self._total

    def __contains__(self, literal: object) -> bool:
        return isinstance(literal, Literal) and self.coefficient(literal) > 0

    def __iter__(self) -> Iterator[Tuple[int, Literal]]:
        for var, (coef, polarity) in self._terms.items():
            yield coef, Literal(var, polarity)

    def __len__(self) -> int:
        return len(self._terms)

    def _key(self) -> Tuple[Tuple[Tuple[int, Tuple[int, bool]], ...], int]:
        return (tuple(self._terms.items()), self._degree)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PBConstraint):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __str__(self) -> str:
        body = " ".join(f"+{coef} {lit}" for coef, lit in self)
        return f"{body} >= {self._degree}".strip()

    def __repr__(self) -> str:
        return f"PBConstraint({self})"


def linear_form(
    pairs: Iterable[Tuple[int, Literal]], rhs: int, into: Optional[Dict[int, int]] = None
) -> Tuple[Dict[int, int], int]:
    """Rewrite sum(coef * literal) >= rhs over positive variables

    Returns (coefficients by variable, rhs). A negated literal coef * ~x is
    coef - coef * x, so its constant moves to the right-hand side.
    """
    table: Dict[int, int] = {} if into is None else into
    for coef, lit in pairs:
        if lit.polarity:
            table[lit.variable] = table.get(lit.variable, 0) + coef
        else:
            table[lit.variable] = table.get(lit.variable, 0) - coef
            rhs -= coef
    return table, rhs


def from_linear(table: Mapping[int, int], rhs: int) -> PBConstraint:
    """Normalize sum(table[v] * v) >= rhs; the degree is clamped at 0"""
    terms: Dict[int, Tuple[int, bool]] = {}
    degree = rhs
    for var, coef in table.items():
        if coef > 0:
            terms[var] = (coef, True)
        elif coef < 0:
            terms[var] = (-coef, False)
            degree -= coef
    return PBConstraint(terms, max(degree, 0))


def _negated(terms: Iterable[Tuple[int, Literal]]) -> List[Tuple[int, Literal]]:
    return [(-coef, lit) for coef, lit in terms]


def normalize(raw: RawConstraint) -> List[PBConstraint]:
    """Normalize a raw constraint into one or two >= constraints

    Equalities produce the >= direction first. Constraints that are always
    true become the canonical tautology, those that can never hold become
    the canonical contradiction.
    """
    terms = list(raw.terms)
    relation = raw.relation
    if relation is Relation.GE:
        forms = [(terms, raw.rhs)]
    elif relation is Relation.GT:
        forms = [(terms, raw.rhs + 1)]
    elif relation is Relation.LE:
        forms = [(_negated(terms), -raw.rhs)]
    elif relation is Relation.LT:
        forms = [(_negated(terms), 1 - raw.rhs)]
    else:
        forms = [(terms, raw.rhs), (_negated(terms), -raw.rhs)]

    result = []
    for pairs, rhs in forms:
        constraint = from_linear(*linear_form(pairs, rhs))
        if constraint.is_tautology():
            constraint = PBConstraint.tautology()
        elif constraint.is_contradiction():
            constraint = PBConstraint.contradiction()
        result.append(constraint)
    return result


def condition(constraint: PBConstraint, term: Iterable[Literal]) -> PBConstraint:
    """Assign the literals of a consistent term and simplify

    Literals made true leave the constraint and lower the degree by their
    coefficient; literals made false just leave it.
    """
    chosen: Dict[int, bool] = {}
    for lit in term:
        if chosen.setdefault(lit.variable, lit.polarity) != lit.polarity:
            raise InconsistentTermError(f"term contains both x{lit.variable} and ~x{lit.variable}")
    terms = dict(constraint.terms)
    degree = constraint.degree
    for var, polarity in chosen.items():
        entry = terms.pop(var, None)
        if entry is not None and entry[1] == polarity:
            degree -= entry[0]
    return PBConstraint(terms, max(degree, 0))


def slack(constraint: PBConstraint) -> int:
    return constraint.coefficient_sum - constraint.degree


def slack_under(constraint: PBConstraint, assignment: Assignment) -> int:
    """Sum of the coefficients of non-falsified literals minus the degree

    A negative value means the constraint is falsified by the assignment.
    """
    total = 0
    for var, (coef, polarity) in constraint.terms.items():
        if assignment.get(var, polarity) == polarity:
            total += coef
    return total - constraint.degree


def evaluate(constraint: PBConstraint, assignment: Assignment) -> bool:
    satisfied = 0
    for var, (coef, polarity) in constraint.terms.items():
        if var not in assignment:
            raise IncompleteAssignmentError(f"x{var} is unassigned")
        if assignment[var] == polarity:
            satisfied += coef
    return satisfied >= constraint.degree


def is_cardinality(constraint: PBConstraint) -> bool:
    return all(coef == 1 for coef, _ in constraint.terms.values())


def is_clause(constraint: PBConstraint) -> bool:
    return is_cardinality(constraint) and constraint.degree == 1
