"""
A small CDCL pseudo-Boolean solver

Propagation keeps the slack of every constraint up to date on each
assignment and unassignment (no watched literals). Conflicts are analyzed
by ConflictAnalyzer, one trail literal at a time, until the derived
constraint propagates after backjumping.
"""

from __future__ import annotations

import logging
import time
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .analysis import ConflictAnalysisConfig, ConflictAnalyzer, Derived, SolverStats
from .constraint import Literal, PBConstraint, evaluate
from .errors import ConfigError, InternalInvariantError
from .trace import DerivationTrace, Rule

logger = logging.getLogger(__name__)

DEFAULT_DECAY = 0.95
DEFAULT_RESTART_BASE = 100
_RESCALE_LIMIT = 1e100


class SolveStatus(Enum):
    SAT = "SATISFIABLE"
    UNSAT = "UNSATISFIABLE"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class SolverLimits:
    """Resource limits and restart policy of a run"""

    max_conflicts: Optional[int] = None
    time_limit: Optional[float] = None
    luby: bool = False
    restart_base: int = DEFAULT_RESTART_BASE
    decay: float = DEFAULT_DECAY

    def __post_init__(self) -> None:
        if self.max_conflicts is not None and self.max_conflicts < 0:
            raise ConfigError(f"max_conflicts must be >= 0, got {self.max_conflicts}")
        if self.time_limit is not None and self.time_limit < 0:
            raise ConfigError(f"time_limit must be >= 0, got {self.time_limit}")
        if self.restart_base < 1:
            raise ConfigError(f"restart_base must be >= 1, got {self.restart_base}")
        if not 0 < self.decay <= 1:
            raise ConfigError(f"decay must be in (0, 1], got {self.decay}")


@dataclass
class SolveResult:
    status: SolveStatus
    stats: SolverStats
    model: Optional[Dict[int, bool]] = None
    trace: Optional[DerivationTrace] = None
    reason: Optional[str] = None

    @property
    def exit_code(self) -> int:
        return {SolveStatus.SAT: 10, SolveStatus.UNSAT: 20}.get(self.status, 0)


def luby(index: int) -> int:
    """The index-th element (1-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    position = index - 1
    size, power = 1, 0
    while size < position + 1:
        power += 1
        size = 2 * size + 1
    while size - 1 != position:
        size = (size - 1) >> 1
        power -= 1
        position %= size
    return 1 << power


class PBSolver:
    """CDCL search over normalized constraints

    Args:
        formula: Normalized input constraints
        config: Conflict analysis mode and elimination strategy
        limits: Conflict/time limits and restart policy
        record_trace: Keep a DerivationTrace of every rule application
        num_variables: Number of variables when larger than those used
    """

    def __init__(
        self,
        formula: Iterable[PBConstraint],
        config: Optional[ConflictAnalysisConfig] = None,
        limits: Optional[SolverLimits] = None,
        record_trace: bool = False,
        num_variables: Optional[int] = None,
    ) -> None:
        self.formula: List[PBConstraint] = list(formula)
        self.config = config or ConflictAnalysisConfig()
        self.limits = limits or SolverLimits()
        self.stats = SolverStats()
        self.trace = DerivationTrace() if record_trace else None
        self.analyzer = ConflictAnalyzer(self.config, self.stats, self.trace)

        used = max((var for c in self.formula for var in c.terms), default=0)
        self.num_variables = max(used, num_variables or 0)

        self._value: Dict[int, bool] = {}
        self._level: Dict[int, int] = {}
        self._reason: Dict[int, Optional[int]] = {}
        self._trail: List[Literal] = []
        self._trail_lim: List[int] = []
        self._qhead = 0

        self._constraints: List[PBConstraint] = []
        self._steps: List[int] = []
        self._slack: List[int] = []
        self._occurs: Dict[int, List[int]] = defaultdict(list)

        self.activity: Dict[int, float] = {var: 0.0 for var in range(1, self.num_variables + 1)}
        self._var_inc = 1.0

        for constraint in self.formula:
            step = self.trace.record(Rule.INPUT, (), constraint) if self.trace is not None else 0
            self._add_constraint(constraint, step)

    # -- state ---------------------------------------------------------------

    @property
    def decision_level(self) -> int:
        return len(self._trail_lim)

    def value(self, literal: Literal) -> Optional[bool]:
        return literal.value(self._value)

    def trail(self) -> List[Tuple[Literal, int, Optional[PBConstraint]]]:
        """Assigned literals in order with their level and reason constraint"""
        result = []
        for lit in self._trail:
            reason = self._reason[lit.variable]
            result.append((lit, self._level[lit.variable], None if reason is None else self._constraints[reason]))
        return result

    def _add_constraint(self, constraint: PBConstraint, step: int) -> int:
        cid = len(self._constraints)
        self._constraints.append(constraint)
        self._steps.append(step)
        total = 0
        for var, (coef, polarity) in constraint.terms.items():
            self._occurs[var].append(cid)
            if self._value.get(var, polarity) == polarity:
                total += coef
        self._slack.append(total - constraint.degree)
        return cid

    def _assign(self, literal: Literal, reason: Optional[int]) -> None:
        var = literal.variable
        self._value[var] = literal.polarity
        self._level[var] = self.decision_level
        self._reason[var] = reason
        self._trail.append(literal)
        for cid in self._occurs[var]:
            coef, polarity = self._constraints[cid].terms[var]
            if polarity != literal.polarity:
                self._slack[cid] -= coef
        if reason is not None:
            self.stats.propagations += 1

    def _backjump(self, level: int) -> None:
        if level >= self.decision_level:
            return
        start = self._trail_lim[level]
        for literal in reversed(self._trail[start:]):
            var = literal.variable
            for cid in self._occurs[var]:
                coef, polarity = self._constraints[cid].terms[var]
                if polarity != literal.polarity:
                    self._slack[cid] += coef
            del self._value[var]
            del self._level[var]
            del self._reason[var]
        del self._trail[start:]
        del self._trail_lim[level:]
        self._qhead = len(self._trail)

    # -- propagation ---------------------------------------------------------

    def _examine(self, cid: int) -> bool:
        """Propagate from one constraint; False when it is conflicting"""
        current = self._slack[cid]
        if current < 0:
            return False
        constraint = self._constraints[cid]
        if constraint.max_coefficient <= current:
            return True
        for var, (coef, polarity) in constraint.terms.items():
            if coef > current and var not in self._value:
                self._assign(Literal(var, polarity), cid)
        return True

    def propagate(self) -> Optional[int]:
        """Run unit propagation to a fixpoint

        Returns:
            Id of a conflicting constraint, or None
        """
        while self._qhead < len(self._trail):
            literal = self._trail[self._qhead]
            self._qhead += 1
            for cid in self._occurs[literal.variable]:
                if self._constraints[cid].terms[literal.variable][1] == literal.polarity:
                    continue
                if not self._examine(cid):
                    return cid
        return None

    # -- heuristic -----------------------------------------------------------

    def bump_activity(self, variables: Iterable[int]) -> None:
        for var in variables:
            self.activity[var] = self.activity.get(var, 0.0) + self._var_inc
            if self.activity[var] > _RESCALE_LIMIT:
                for other in self.activity:
                    self.activity[other] *= 1 / _RESCALE_LIMIT
                self._var_inc *= 1 / _RESCALE_LIMIT

    def decay_activity(self) -> None:
        """Make later bumps weigh 1/decay times more than earlier ones"""
        self._var_inc /= self.limits.decay

    def _pick_branch_variable(self) -> Optional[int]:
        best = None
        for var in range(1, self.num_variables + 1):
            if var in self._value:
                continue
            if best is None or self.activity[var] > self.activity[best]:
                best = var
        return best

    def _decide(self, var: int) -> None:
        self.stats.decisions += 1
        self._trail_lim.append(len(self._trail))
        self._assign(Literal(var, False), None)

    # -- conflict analysis ---------------------------------------------------

    def _assertion_level(self, constraint: PBConstraint, prefix: Dict[int, bool]) -> Optional[int]:
        """Backjump level if the constraint is assertive, else None; -1 at level 0

        The constraint is conflicting from some lowest level L on. It is
        assertive when it propagates at level L - 1, and the backjump goes
        to the lowest level at which it propagates.
        """
        falsified: Dict[int, int] = defaultdict(int)
        for var, (coef, polarity) in constraint.terms.items():
            if var in prefix and prefix[var] != polarity:
                falsified[self._level[var]] += coef
        base = constraint.coefficient_sum - constraint.degree
        if base < 0:
            return -1
        slack_at: Dict[int, int] = {}
        running = base
        conflict_level = None
        for level in range(0, max(falsified, default=0) + 1):
            running -= falsified.get(level, 0)
            slack_at[level] = running
            if running < 0:
                conflict_level = level
                break
        if conflict_level is None:
            raise InternalInvariantError(f"{constraint} is not conflicting during analysis")
        if conflict_level == 0:
            return -1

        def propagates_at(level: int) -> bool:
            for var, (coef, _) in constraint.terms.items():
                if coef > slack_at[level] and (var not in prefix or self._level[var] > level):
                    return True
            return False

        if not propagates_at(conflict_level - 1):
            return None
        for level in range(conflict_level):
            if propagates_at(level):
                return level
        return conflict_level - 1

    def _analyze(self, cid: int) -> Tuple[Optional[Derived], int, Set[int]]:
        """Derive an assertive constraint from a conflict

        Returns:
            (learned constraint, backjump level, involved variables); the
            constraint is None when the conflict holds at level 0
        """
        # conflicts and reasons enter the analysis saturated
        conflict = self.analyzer.saturate(Derived(self._constraints[cid], self._steps[cid]))
        involved: Set[int] = set(conflict.constraint.terms)
        prefix = dict(self._value)
        index = len(self._trail)
        changed = True
        while True:
            if changed:
                level = self._assertion_level(conflict.constraint, prefix)
                if level is not None:
                    if level < 0:
                        return None, -1, involved
                    return conflict, level, involved
                changed = False
            index -= 1
            literal = self._trail[index]
            var = literal.variable
            term = conflict.constraint.terms.get(var)
            if term is not None and term[1] != literal.polarity:
                reason_id = self._reason[var]
                if reason_id is None:
                    conflict = self.analyzer.saturate(self.analyzer.weaken(conflict, Literal(var, term[1])))
                else:
                    reason = self.analyzer.saturate(Derived(self._constraints[reason_id], self._steps[reason_id]))
                    conflict = self.analyzer.resolve(conflict, reason, var, prefix, involved)
                changed = True
            del prefix[var]

    # -- search --------------------------------------------------------------

    def _finish(self, status: SolveStatus, started: float, reason: Optional[str] = None) -> SolveResult:
        self.stats.elapsed = time.monotonic() - started
        model = None
        if status is SolveStatus.SAT:
            model = {var: self._value.get(var, False) for var in range(1, self.num_variables + 1)}
            for constraint in self.formula:
                if not evaluate(constraint, model):
                    raise InternalInvariantError(f"model violates input constraint {constraint}")
        logger.info(
            "%s after %d conflicts, %d cancellations", status.value, self.stats.conflicts, self.stats.cancellations
        )
        return SolveResult(status, self.stats, model, self.trace, reason)

    def _restart_due(self, since_restart: int, restarts: int) -> bool:
        return self.limits.luby and since_restart >= luby(restarts + 1) * self.limits.restart_base

    def solve(self) -> SolveResult:
        started = time.monotonic()
        for cid in range(len(self._constraints)):
            if not self._examine(cid):
                return self._finish(SolveStatus.UNSAT, started)

        since_restart = 0
        while True:
            conflict_id = self.propagate()
            if conflict_id is not None:
                self.stats.conflicts += 1
                if self.decision_level == 0:
                    return self._finish(SolveStatus.UNSAT, started)
                if self.limits.max_conflicts is not None and self.stats.conflicts > self.limits.max_conflicts:
                    return self._finish(SolveStatus.UNKNOWN, started, "conflict limit")

                learned, level, involved = self._analyze(conflict_id)
                if learned is None:
                    return self._finish(SolveStatus.UNSAT, started)
                self.bump_activity(involved)
                self.decay_activity()
                logger.debug("learned %s, backjump %d -> %d", learned.constraint, self.decision_level, level)

                self._backjump(level)
                cid = self._add_constraint(learned.constraint, learned.step)
                self.stats.learned += 1
                if not self._examine(cid):
                    raise InternalInvariantError(f"learned constraint {learned.constraint} conflicts after backjump")

                since_restart += 1
                if self._restart_due(since_restart, self.stats.restarts):
                    self.stats.restarts += 1
                    since_restart = 0
                    logger.info("restart %d after %d conflicts", self.stats.restarts, self.stats.conflicts)
                    self._backjump(0)
                continue

            if self.limits.time_limit is not None and time.monotonic() - started > self.limits.time_limit:
                return self._finish(SolveStatus.UNKNOWN, started, "time limit")
            var = self._pick_branch_variable()
            if var is None:
                return self._finish(SolveStatus.SAT, started)
            self._decide(var)


def solve(
    formula: Sequence[PBConstraint],
    config: Optional[ConflictAnalysisConfig] = None,
    limits: Optional[SolverLimits] = None,
    record_trace: bool = False,
    num_variables: Optional[int] = None,
) -> SolveResult:
    """Solve a normalized formula with a fresh PBSolver"""
    return PBSolver(formula, config, limits, record_trace, num_variables).solve()
