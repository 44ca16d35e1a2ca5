"""
Derivation traces

A trace records every rule application of a solver run: the rule, the ids
of its operands and the constraint it produced. Formula constraints enter
as `input` steps, so a trace can be replayed on its own.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Tuple

from .constraint import Literal, PBConstraint
from .errors import ReplayMismatchError
from .relevance import remove_by_weakening, remove_simple
from .rules import add, cancel, divide, multiply, saturate, weaken


class Rule(Enum):
    INPUT = "input"
    SATURATE = "saturate"
    WEAKEN = "weaken"
    DIVIDE = "divide"
    MULTIPLY = "multiply"
    ADD = "add"
    CANCEL = "cancel"
    ELIMINATE = "eliminate"


# operand count per rule
ARITY = {
    Rule.INPUT: 0,
    Rule.SATURATE: 1,
    Rule.WEAKEN: 1,
    Rule.DIVIDE: 1,
    Rule.MULTIPLY: 1,
    Rule.ADD: 2,
    Rule.CANCEL: 2,
    Rule.ELIMINATE: 1,
}


@dataclass(frozen=True)
class TraceStep:
    step: int
    rule: Rule
    operands: Tuple[int, ...]
    result: PBConstraint
    pivot: Optional[int] = None
    divisor: Optional[int] = None
    multiplier: Optional[int] = None
    literal: Optional[Literal] = None
    strategy: Optional[str] = None
    removed: Tuple[Literal, ...] = field(default=())


class DerivationTrace:
    """Ordered, append-only list of trace steps with ids starting at 1"""

    def __init__(self) -> None:
        self._steps: List[TraceStep] = []

    def record(self, rule: Rule, operands: Tuple[int, ...], result: PBConstraint, **params: Any) -> int:
        """Append a step and return its id"""
        step = TraceStep(len(self._steps) + 1, rule, tuple(operands), result, **params)
        self.append(step)
        return step.step

    def append(self, step: TraceStep) -> None:
        expected = len(self._steps) + 1
        if step.step != expected:
            raise ValueError(f"step id {step.step} out of sequence, expected {expected}")
        if len(step.operands) != ARITY[step.rule]:
            raise ValueError(f"{step.rule.value} takes {ARITY[step.rule]} operands, got {len(step.operands)}")
        for operand in step.operands:
            if not 1 <= operand < step.step:
                raise ValueError(f"step {step.step} refers to unknown step {operand}")
        self._steps.append(step)

    def __len__(self) -> int:
        return len(self._steps)

    def __iter__(self) -> Iterator[TraceStep]:
        return iter(self._steps)

    def __getitem__(self, step_id: int) -> TraceStep:
        if not 1 <= step_id <= len(self._steps):
            raise IndexError(step_id)
        return self._steps[step_id - 1]

    def count(self, rule: Rule) -> int:
        return sum(1 for step in self._steps if step.rule is rule)

    def derived(self) -> List[PBConstraint]:
        """Constraints produced by rule applications, inputs excluded"""
        return [step.result for step in self._steps if step.rule is not Rule.INPUT]


def apply_step(step: TraceStep, operands: List[PBConstraint]) -> PBConstraint:
    """Recompute the constraint a step should produce from its operands"""
    rule = step.rule
    if rule is Rule.INPUT:
        return step.result
    if rule is Rule.SATURATE:
        return saturate(operands[0])
    if rule is Rule.WEAKEN:
        return weaken(operands[0], step.literal)
    if rule is Rule.DIVIDE:
        return divide(operands[0], step.divisor)
    if rule is Rule.MULTIPLY:
        return multiply(operands[0], step.multiplier)
    if rule is Rule.ADD:
        return add(operands[0], operands[1])
    if rule is Rule.CANCEL:
        return cancel(operands[0], operands[1], step.pivot)
    if step.strategy == "weaken":
        return remove_by_weakening(operands[0], step.removed)
    return remove_simple(operands[0], step.removed)


def replay(trace: DerivationTrace) -> int:
    """Replay every step and compare with the recorded constraints

    Returns:
        Number of steps verified

    Raises:
        ReplayMismatchError: At the first step that does not reproduce
    """
    results: Dict[int, PBConstraint] = {}
    for step in trace:
        try:
            actual = apply_step(step, [results[operand] for operand in step.operands])
        except (KeyError, ValueError) as e:
            raise ReplayMismatchError(step.step, step.result, f"error ({e})") from e
        if actual != step.result:
            raise ReplayMismatchError(step.step, step.result, actual)
        results[step.step] = step.result
    return len(trace)
