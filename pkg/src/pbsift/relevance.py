"""
Irrelevant literal detection and removal

A literal l with coefficient a in a saturated constraint sum >= d is
irrelevant exactly when no sub-multiset of the other coefficients sums to a
value in the window [d - a, d - 1]. The exact check is a subset-sum table;
the incomplete check only looks at sums modulo small integers, so it can
prove irrelevance but never relevance.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .constraint import Literal, PBConstraint, condition, evaluate, slack
from .errors import ConfigError, LiteralNotPresentError, OracleCapacityExceededError
from .rules import saturate, weaken

logger = logging.getLogger(__name__)

DEFAULT_MODULUS = 4547
DEFAULT_MAX_LITERALS = 500
DEFAULT_ORACLE_BUDGET = 10**8


class RelevanceVerdict(Enum):
    PROVEN_IRRELEVANT = "irrelevant"
    RELEVANT = "relevant"
    NOT_PROVEN = "not proven"


class EliminationStrategy(Enum):
    """How irrelevant literals are taken out of a constraint"""

    OFF = "none"
    WEAKEN = "weaken"
    SIMPLE = "simple"
    SLACK = "slack"


@dataclass(frozen=True)
class DetectorConfig:
    """Parameters of the incomplete detector and of the exact oracle"""

    moduli: Tuple[int, ...] = (DEFAULT_MODULUS,)
    max_literals: int = DEFAULT_MAX_LITERALS
    oracle_budget: int = DEFAULT_ORACLE_BUDGET

    def __post_init__(self) -> None:
        moduli = (self.moduli,) if isinstance(self.moduli, int) else tuple(self.moduli)
        object.__setattr__(self, "moduli", moduli)
        if not self.moduli:
            raise ConfigError("at least one modulus is required")
        for modulus in self.moduli:
            if isinstance(modulus, bool) or not isinstance(modulus, int) or modulus < 2:
                raise ConfigError(f"moduli must be integers >= 2, got {modulus!r}")
        if not isinstance(self.max_literals, int) or self.max_literals < 1:
            raise ConfigError(f"max_literals must be a positive integer, got {self.max_literals!r}")
        if not isinstance(self.oracle_budget, int) or self.oracle_budget < 1:
            raise ConfigError(f"oracle_budget must be a positive integer, got {self.oracle_budget!r}")


@dataclass(frozen=True)
class Window:
    """Closed integer interval of forbidden subset sums"""

    low: int
    high: int

    @property
    def size(self) -> int:
        return max(self.high - self.low + 1, 0)

    def is_empty(self) -> bool:
        return self.high < self.low

    def __contains__(self, value: object) -> bool:
        return isinstance(value, int) and self.low <= value <= self.high


@dataclass
class RelevanceReport:
    verdicts: Dict[Literal, RelevanceVerdict] = field(default_factory=dict)
    checks: int = 0
    skipped: bool = False
    # one representative literal per coefficient value actually checked
    checked: List[Literal] = field(default_factory=list)

    @property
    def irrelevant(self) -> List[Literal]:
        return sorted(lit for lit, verdict in self.verdicts.items() if verdict is RelevanceVerdict.PROVEN_IRRELEVANT)

    def verdict(self, literal: Literal) -> Optional[RelevanceVerdict]:
        return self.verdicts.get(literal)


def _require(constraint: PBConstraint, literal: Literal) -> int:
    coef = constraint.coefficient(literal)
    if coef == 0:
        raise LiteralNotPresentError(literal, constraint)
    return coef


def _other_coefficients(constraint: PBConstraint, literal: Literal) -> List[int]:
    return [coef for var, (coef, _) in constraint.terms.items() if var != literal.variable]


def irrelevance_window(constraint: PBConstraint, literal: Literal) -> Window:
    coef = _require(constraint, literal)
    return Window(max(constraint.degree - coef, 0), constraint.degree - 1)


def exact_is_irrelevant(
    constraint: PBConstraint, literal: Literal, budget: int = DEFAULT_ORACLE_BUDGET
) -> bool:
    """Decide irrelevance with a subset-sum table over the other coefficients

    The table is a bitset of the sums below the degree that some subset of
    the other coefficients reaches.

    Raises:
        OracleCapacityExceededError: If literals times degree exceeds budget
    """
    window = irrelevance_window(constraint, literal)
    if window.is_empty():
        return True
    if len(constraint) * constraint.degree > budget:
        raise OracleCapacityExceededError(
            f"{len(constraint)} literals with degree {constraint.degree} exceed the oracle budget of {budget}"
        )
    mask = (1 << (window.high + 1)) - 1
    reachable = 1
    for coef in _other_coefficients(constraint, literal):
        if coef <= window.high:
            reachable |= (reachable << coef) & mask
    window_bits = mask ^ ((1 << window.low) - 1)
    return reachable & window_bits == 0


def is_irrelevant_by_definition(constraint: PBConstraint, literal: Literal, max_variables: int = 20) -> bool:
    """Check c|l == c|~l by enumerating the other variables

    This is the definition itself; it is exponential and only meant as a
    reference for small constraints.
    """
    _require(constraint, literal)
    others = [var for var in constraint.variables() if var != literal.variable]
    if len(others) > max_variables:
        raise ValueError(f"{len(others)} variables exceed the enumeration limit of {max_variables}")
    positive = condition(constraint, [literal])
    negative = condition(constraint, [literal.negate()])
    for values in itertools.product((False, True), repeat=len(others)):
        assignment = dict(zip(others, values))
        if evaluate(positive, assignment) != evaluate(negative, assignment):
            return False
    return True


def _modular_bitset(coefficients: Iterable[int], modulus: int) -> int:
    if modulus < 2:
        raise ValueError(f"modulus must be at least 2, got {modulus}")
    full = (1 << modulus) - 1
    reachable = 1
    for coef in coefficients:
        shift = coef % modulus
        if shift == 0:
            continue
        reachable |= ((reachable << shift) | (reachable >> (modulus - shift))) & full
        if reachable == full:
            break
    return reachable


def modular_reachable(coefficients: Iterable[int], modulus: int) -> frozenset:
    """Residues modulo `modulus` of all sub-multiset sums"""
    bits = _modular_bitset(coefficients, modulus)
    return frozenset(residue for residue in range(modulus) if bits >> residue & 1)


def incomplete_is_irrelevant(
    constraint: PBConstraint, literal: Literal, config: Optional[DetectorConfig] = None
) -> RelevanceVerdict:
    """Try to rule out every window value by its residues

    A target t is ruled out as soon as one modulus p leaves t mod p
    unreachable. A modulus whose window is at least p long cannot rule out
    anything and is skipped.
    """
    config = config or DetectorConfig()
    window = irrelevance_window(constraint, literal)
    if window.is_empty():
        return RelevanceVerdict.PROVEN_IRRELEVANT
    others = _other_coefficients(constraint, literal)
    remaining: Optional[List[int]] = None
    for modulus in config.moduli:
        if window.size >= modulus:
            continue
        bits = _modular_bitset(others, modulus)
        candidates = range(window.low, window.high + 1) if remaining is None else remaining
        remaining = [target for target in candidates if bits >> (target % modulus) & 1]
        if not remaining:
            return RelevanceVerdict.PROVEN_IRRELEVANT
    return RelevanceVerdict.NOT_PROVEN


def detect_all(
    constraint: PBConstraint, config: Optional[DetectorConfig] = None, oracle: bool = False
) -> RelevanceReport:
    """Check every literal, one check per distinct coefficient value

    Coefficients are visited in ascending order. An irrelevant literal
    makes every literal with a smaller coefficient irrelevant too, so the
    first value that is not proven irrelevant ends the search and its
    verdict is given to all larger coefficients.
    """
    config = config or DetectorConfig()
    if len(constraint) > config.max_literals:
        logger.debug("skipping constraint with %d literals (bound %d)", len(constraint), config.max_literals)
        return RelevanceReport(skipped=True)

    constraint = saturate(constraint)
    groups: Dict[int, List[Literal]] = {}
    for coef, lit in constraint:
        groups.setdefault(coef, []).append(lit)

    report = RelevanceReport()
    values = sorted(groups)
    for index, value in enumerate(values):
        representative = groups[value][0]
        report.checks += 1
        report.checked.append(representative)
        if oracle:
            proven = exact_is_irrelevant(constraint, representative, config.oracle_budget)
            verdict = RelevanceVerdict.PROVEN_IRRELEVANT if proven else RelevanceVerdict.RELEVANT
        else:
            verdict = incomplete_is_irrelevant(constraint, representative, config)
        if verdict is RelevanceVerdict.PROVEN_IRRELEVANT:
            for lit in groups[value]:
                report.verdicts[lit] = verdict
            continue
        for larger in values[index:]:
            for lit in groups[larger]:
                report.verdicts[lit] = verdict
        break
    return report


def _check_present(constraint: PBConstraint, literals: Iterable[Literal]) -> List[Literal]:
    chosen = sorted(set(literals))
    for lit in chosen:
        _require(constraint, lit)
    return chosen


def remove_by_weakening(constraint: PBConstraint, irrelevant: Iterable[Literal]) -> PBConstraint:
    """Weaken away the given literals, then saturate"""
    result = constraint
    for lit in _check_present(constraint, irrelevant):
        result = weaken(result, lit)
    return saturate(result)


def remove_simple(constraint: PBConstraint, irrelevant: Iterable[Literal]) -> PBConstraint:
    """Drop the given literals and keep the degree"""
    dropped = {lit.variable for lit in _check_present(constraint, irrelevant)}
    terms = {var: entry for var, entry in constraint.terms.items() if var not in dropped}
    return PBConstraint(terms, constraint.degree)


def choose_removal(
    constraint: PBConstraint, irrelevant: Sequence[Literal]
) -> Tuple[EliminationStrategy, PBConstraint]:
    """Both removals, keeping the one with the smaller slack (simple on ties)"""
    weakened = remove_by_weakening(constraint, irrelevant)
    simple = remove_simple(constraint, irrelevant)
    if slack(weakened) < slack(simple):
        return EliminationStrategy.WEAKEN, weakened
    return EliminationStrategy.SIMPLE, simple


def remove_slack_based(constraint: PBConstraint, irrelevant: Iterable[Literal]) -> PBConstraint:
    return choose_removal(constraint, list(irrelevant))[1]


def eliminate(
    constraint: PBConstraint, irrelevant: Sequence[Literal], strategy: EliminationStrategy
) -> Tuple[EliminationStrategy, PBConstraint]:
    """Apply a removal strategy; returns the removal actually used

    The slack strategy resolves to weaken or simple.
    """
    if strategy is EliminationStrategy.WEAKEN:
        return strategy, remove_by_weakening(constraint, irrelevant)
    if strategy is EliminationStrategy.SIMPLE:
        return strategy, remove_simple(constraint, irrelevant)
    if strategy is EliminationStrategy.SLACK:
        return choose_removal(constraint, irrelevant)
    return strategy, constraint
