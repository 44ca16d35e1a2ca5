"""
Conflict analysis with cutting-planes rules

The analyzer owns the rule applications of a solver run: it combines a
conflicting constraint with the reason of a propagated literal, either by
generalized resolution (weaken the reason until the sum stays conflicting)
or by division (weaken non-divisible literals and divide by the pivot
coefficient). Elimination of irrelevant literals hooks in at the points
each style produces them. Every rule application is recorded in the
derivation trace when one is attached.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, NamedTuple, Optional, Set

from .constraint import Assignment, Literal, PBConstraint, slack_under
from .errors import InternalInvariantError
from .relevance import DetectorConfig, EliminationStrategy, detect_all, eliminate
from .rules import cancel, cancel_multipliers, divide, saturate, weaken
from .trace import DerivationTrace, Rule

logger = logging.getLogger(__name__)


class AnalysisMode(Enum):
    GENERALIZED_RESOLUTION = "gr"
    DIVISION = "div"


@dataclass(frozen=True)
class ConflictAnalysisConfig:
    mode: AnalysisMode = AnalysisMode.GENERALIZED_RESOLUTION
    elimination: EliminationStrategy = EliminationStrategy.OFF
    detector: DetectorConfig = field(default_factory=DetectorConfig)


@dataclass
class SolverStats:
    """Counters of a solver run; cancellations measure proof size"""

    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0
    learned: int = 0
    restarts: int = 0
    cancellations: int = 0
    eliminations: int = 0
    irrelevant_literals_detected: int = 0
    irrelevant_literals_removed: int = 0
    constraints_with_irrelevant: int = 0
    checks_performed: int = 0
    skipped_constraints: int = 0
    elapsed: float = 0.0

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


class Derived(NamedTuple):
    """A constraint together with its trace step id (0 without a trace)"""

    constraint: PBConstraint
    step: int


class ConflictAnalyzer:
    def __init__(
        self,
        config: Optional[ConflictAnalysisConfig] = None,
        stats: Optional[SolverStats] = None,
        trace: Optional[DerivationTrace] = None,
    ) -> None:
        self.config = config or ConflictAnalysisConfig()
        self.stats = stats if stats is not None else SolverStats()
        self.trace = trace

    def _record(self, rule: Rule, operands: Iterable[int], result: PBConstraint, **params: Any) -> int:
        if self.trace is None:
            return 0
        return self.trace.record(rule, tuple(operands), result, **params)

    def saturate(self, derived: Derived) -> Derived:
        result = saturate(derived.constraint)
        if result == derived.constraint:
            return derived
        return Derived(result, self._record(Rule.SATURATE, (derived.step,), result))

    def weaken(self, derived: Derived, literal: Literal) -> Derived:
        result = weaken(derived.constraint, literal)
        return Derived(result, self._record(Rule.WEAKEN, (derived.step,), result, literal=literal))

    def divide(self, derived: Derived, divisor: int) -> Derived:
        if divisor == 1:
            return derived
        result = divide(derived.constraint, divisor)
        return Derived(result, self._record(Rule.DIVIDE, (derived.step,), result, divisor=divisor))

    def cancel(self, conflict: Derived, reason: Derived, variable: int) -> Derived:
        result = cancel(conflict.constraint, reason.constraint, variable)
        self.stats.cancellations += 1
        return Derived(result, self._record(Rule.CANCEL, (conflict.step, reason.step), result, pivot=variable))

    def eliminate(self, derived: Derived) -> Derived:
        """Detect irrelevant literals and remove them with the configured strategy"""
        strategy = self.config.elimination
        if strategy is EliminationStrategy.OFF:
            return derived
        report = detect_all(derived.constraint, self.config.detector)
        self.stats.checks_performed += report.checks
        if report.skipped:
            self.stats.skipped_constraints += 1
        irrelevant = report.irrelevant
        if not irrelevant:
            return derived
        self.stats.constraints_with_irrelevant += 1
        self.stats.irrelevant_literals_detected += len(irrelevant)
        used, result = eliminate(derived.constraint, irrelevant, strategy)
        removed = len(derived.constraint) - len(result)
        self.stats.irrelevant_literals_removed += removed
        self.stats.eliminations += 1
        logger.debug("removed %d irrelevant literals (%s) from %s", removed, used.value, derived.constraint)
        step = self._record(
            Rule.ELIMINATE, (derived.step,), result, strategy=used.value, removed=tuple(irrelevant)
        )
        return Derived(result, step)

    def _conflict_kept(
        self, conflict: PBConstraint, reason: PBConstraint, variable: int, assignment: Assignment
    ) -> bool:
        mu1, mu2 = cancel_multipliers(conflict, reason, variable)
        return mu1 * slack_under(conflict, assignment) + mu2 * slack_under(reason, assignment) < 0

    def weaken_reason(self, conflict: Derived, reason: Derived, variable: int, assignment: Assignment) -> Derived:
        """Weaken the reason until cancelling it with the conflict stays conflicting

        Non-falsified literals other than the pivot go first by ascending
        coefficient. Each weakening is followed by saturation and, when
        configured, elimination.
        """
        while not self._conflict_kept(conflict.constraint, reason.constraint, variable, assignment):
            candidates = [
                (coef, lit.variable, lit)
                for coef, lit in reason.constraint
                if lit.variable != variable and not lit.is_falsified(assignment)
            ]
            if not candidates:
                raise InternalInvariantError(f"cannot weaken {reason.constraint} into a conflicting resolvent")
            _, _, literal = min(candidates)
            reason = self.saturate(self.weaken(reason, literal))
            reason = self.eliminate(reason)
        return reason

    def round_reason(self, reason: Derived, variable: int, assignment: Assignment) -> Derived:
        """Weaken non-divisible non-falsified literals, then divide by the pivot coefficient

        After division the pivot has coefficient 1. Elimination, when
        configured, runs on the weakened reason before the division; a
        removal that saturates can change coefficients, so weakening is
        redone until elimination finds nothing more.
        """
        while True:
            pivot_coef = reason.constraint.terms[variable][0]
            for coef, lit in list(reason.constraint):
                if lit.variable != variable and coef % pivot_coef and not lit.is_falsified(assignment):
                    reason = self.weaken(reason, lit)
            eliminated = self.eliminate(reason)
            if eliminated is reason:
                break
            reason = eliminated
            if variable not in reason.constraint.terms:
                raise InternalInvariantError(f"elimination removed the pivot x{variable} from {reason.constraint}")
        return self.divide(reason, reason.constraint.terms[variable][0])

    def resolve(
        self,
        conflict: Derived,
        reason: Derived,
        variable: int,
        assignment: Assignment,
        involved: Optional[Set[int]] = None,
    ) -> Derived:
        """One analysis step on the pivot variable

        `assignment` is the trail prefix that still contains the pivot.

        Raises:
            InternalInvariantError: If the resolvent is not conflicting
        """
        if self.config.mode is AnalysisMode.DIVISION:
            reason = self.round_reason(reason, variable, assignment)
            resolvent = self.saturate(self.cancel(conflict, reason, variable))
        else:
            reason = self.weaken_reason(conflict, reason, variable, assignment)
            resolvent = self.saturate(self.cancel(conflict, reason, variable))
            resolvent = self.eliminate(resolvent)
        if involved is not None:
            involved.update(reason.constraint.terms)
            involved.update(resolvent.constraint.terms)
        if slack_under(resolvent.constraint, assignment) >= 0:
            raise InternalInvariantError(f"resolvent {resolvent.constraint} is not conflicting")
        return resolvent
