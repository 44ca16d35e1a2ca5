"""
Brute-force helpers shared by the tests

Constraints in tests are written with letters for variables: a is x1, b is
x2 and so on, "~e" is the negation of e.
"""

import itertools
import re
from typing import Dict, Iterable, Iterator, List, Sequence

from pbsift.constraint import Literal, PBConstraint, evaluate
from pbsift.rules import saturate

LETTERS = "abcdefghijklmnopqrstuvwxyz"
_TERM_RE = re.compile(r"(\d*)\s*(~?[a-z])")


def lit(name: str) -> Literal:
    return Literal(LETTERS.index(name[-1]) + 1, not name.startswith("~"))


def pb(text: str) -> PBConstraint:
    """Build a normalized constraint from e.g. '10a + 5b + 2~d + e >= 15'"""
    left, right = text.split(">=")
    terms = []
    for part in left.split("+"):
        match = _TERM_RE.fullmatch(part.strip())
        assert match, f"bad term {part!r}"
        coef = int(match.group(1)) if match.group(1) else 1
        terms.append((coef, lit(match.group(2))))
    return PBConstraint.of(terms, int(right))


def variables_of(*constraints: PBConstraint) -> List[int]:
    return sorted({var for c in constraints for var in c.terms})


def assignments(variables: Sequence[int]) -> Iterator[Dict[int, bool]]:
    for values in itertools.product((False, True), repeat=len(variables)):
        yield dict(zip(variables, values))


def entails(premises: Iterable[PBConstraint], conclusion: PBConstraint) -> bool:
    premises = list(premises)
    for assignment in assignments(variables_of(conclusion, *premises)):
        if all(evaluate(p, assignment) for p in premises) and not evaluate(conclusion, assignment):
            return False
    return True


def equivalent(first: PBConstraint, second: PBConstraint) -> bool:
    return entails([first], second) and entails([second], first)


def brute_force_satisfiable(formula: Sequence[PBConstraint], num_variables: int) -> bool:
    variables = list(range(1, num_variables + 1))
    return any(all(evaluate(c, a) for c in formula) for a in assignments(variables))


def random_constraint(rng, num_variables: int, max_coef: int, size=None, saturated=False) -> PBConstraint:
    """Random normalized constraint with degree between 0 and the coefficient sum"""
    size = size if size is not None else rng.randint(1, num_variables)
    chosen = rng.sample(range(1, num_variables + 1), size)
    terms = {var: (rng.randint(1, max_coef), rng.random() < 0.5) for var in chosen}
    total = sum(coef for coef, _ in terms.values())
    constraint = PBConstraint(terms, rng.randint(0, total))
    return saturate(constraint) if saturated else constraint
