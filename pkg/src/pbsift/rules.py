"""
Cutting-planes inference rules

Every rule takes normalized constraints and returns a normalized
constraint. None of them saturates its output implicitly.
"""

from __future__ import annotations

from math import lcm
from typing import Tuple, Union

from .constraint import Literal, PBConstraint, from_linear, linear_form
from .errors import InvalidDivisorError, InvalidMultiplierError, LiteralNotPresentError, PivotNotOpposedError


def saturate(constraint: PBConstraint) -> PBConstraint:
    """Cap every coefficient at the degree"""
    degree = constraint.degree
    if degree == 0 or constraint.max_coefficient <= degree:
        return constraint
    terms = {var: (min(coef, degree), polarity) for var, (coef, polarity) in constraint.terms.items()}
    return PBConstraint(terms, degree)


def weaken(constraint: PBConstraint, literal: Literal) -> PBConstraint:
    """Drop a literal and lower the degree by its coefficient

    Raises:
        LiteralNotPresentError: If the literal does not occur in the constraint
    """
    coef = constraint.coefficient(literal)
    if coef == 0:
        raise LiteralNotPresentError(literal, constraint)
    terms = dict(constraint.terms)
    del terms[literal.variable]
    return PBConstraint(terms, max(constraint.degree - coef, 0))


def _ceil_div(value: int, divisor: int) -> int:
    return -(-value // divisor)


def divide(constraint: PBConstraint, divisor: int) -> PBConstraint:
    """Divide coefficients and degree by divisor, rounding up"""
    if divisor < 1:
        raise InvalidDivisorError(f"divisor must be at least 1, got {divisor}")
    if divisor == 1:
        return constraint
    terms = {var: (_ceil_div(coef, divisor), polarity) for var, (coef, polarity) in constraint.terms.items()}
    return PBConstraint(terms, _ceil_div(constraint.degree, divisor))


def multiply(constraint: PBConstraint, multiplier: int) -> PBConstraint:
    if multiplier < 1:
        raise InvalidMultiplierError(f"multiplier must be at least 1, got {multiplier}")
    if multiplier == 1:
        return constraint
    terms = {var: (coef * multiplier, polarity) for var, (coef, polarity) in constraint.terms.items()}
    return PBConstraint(terms, constraint.degree * multiplier)


def add(first: PBConstraint, second: PBConstraint) -> PBConstraint:
    """Sum two constraints, merging opposite literals of the same variable"""
    table, rhs = linear_form(first, first.degree)
    table, rhs = linear_form(second, rhs + second.degree, into=table)
    return from_linear(table, rhs)


def cancel_multipliers(first: PBConstraint, second: PBConstraint, pivot: Union[int, Literal]) -> Tuple[int, int]:
    """Smallest multipliers making the pivot coefficients equal

    Raises:
        PivotNotOpposedError: If the pivot variable does not occur with
            opposite polarities in the two constraints
    """
    var = pivot.variable if isinstance(pivot, Literal) else pivot
    left = first.terms.get(var)
    right = second.terms.get(var)
    if left is None or right is None or left[1] == right[1]:
        raise PivotNotOpposedError(f"x{var} does not occur with opposite signs in {first} and {second}")
    common = lcm(left[0], right[0])
    return common // left[0], common // right[0]


def cancel(first: PBConstraint, second: PBConstraint, pivot: Union[int, Literal]) -> PBConstraint:
    """Scale both constraints so the pivot variable cancels out, then add them"""
    mu1, mu2 = cancel_multipliers(first, second, pivot)
    return add(multiply(first, mu1), multiply(second, mu2))
