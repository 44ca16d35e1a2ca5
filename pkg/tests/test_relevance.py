"""
Tests for irrelevant literal detection and removal
"""

import random

import pytest

from pbsift.constraint import Literal, PBConstraint, slack
from pbsift.errors import LiteralNotPresentError, OracleCapacityExceededError
from pbsift.relevance import (
    DetectorConfig,
    EliminationStrategy,
    RelevanceVerdict,
    Window,
    choose_removal,
    detect_all,
    eliminate,
    exact_is_irrelevant,
    incomplete_is_irrelevant,
    irrelevance_window,
    is_irrelevant_by_definition,
    modular_reachable,
    remove_by_weakening,
    remove_simple,
    remove_slack_based,
)
from pbsift.rules import saturate

from .helpers import equivalent, lit, pb, random_constraint

EXAMPLE_1 = "10a + 5b + 5c + 2d + e + f >= 15"
EXAMPLE_3 = "12a + 6b + 6c + 2d + 2e >= 18"
DIAMOND = "6a + 6b + 3d + 3e + 2f >= 6"
NABLA = "17a + 17b + 8c + 4d + 2e >= 21"


def staircase(k: int) -> PBConstraint:
    return PBConstraint.of([(k, Literal(1))] + [(1, Literal(i)) for i in range(2, k + 1)], k)


class TestDetectorConfig:
    """Test cases for DetectorConfig"""

    def test_defaults(self):
        """Test the default modulus and literal bound"""
        config = DetectorConfig()
        assert config.moduli == (4547,)
        assert config.max_literals == 500

    def test_rejects_small_modulus(self):
        """Test that moduli must be at least 2"""
        with pytest.raises(ValueError):
            DetectorConfig(moduli=(1,))
        with pytest.raises(ValueError):
            DetectorConfig(moduli=())


class TestWindow:
    """Test cases for irrelevance_window"""

    def test_windows(self):
        """Test window bounds"""
        assert irrelevance_window(pb(EXAMPLE_3), lit("e")) == Window(16, 17)
        assert irrelevance_window(pb(EXAMPLE_1), lit("d")) == Window(13, 14)

    def test_coefficient_equal_to_degree_contains_zero(self):
        """Test that a = d gives [0, d - 1]"""
        window = irrelevance_window(pb("3a + b + c >= 3"), lit("a"))
        assert window == Window(0, 2)
        assert 0 in window

    def test_missing_literal(self):
        """Test window of an absent literal"""
        with pytest.raises(LiteralNotPresentError):
            irrelevance_window(pb("a + b >= 1"), lit("c"))


class TestExactOracle:
    """Test cases for exact_is_irrelevant"""

    @pytest.mark.parametrize(
        "text, name, expected",
        [
            (EXAMPLE_1, "d", True),
            ("3a + 3b + c >= 3", "c", True),
            ("6a + 5b + c >= 6", "c", False),
        ],
    )
    def test_examples(self, text, name, expected):
        """Test exact irrelevance examples"""
        assert exact_is_irrelevant(pb(text), lit(name)) is expected

    def test_budget(self):
        """Test that the table size is bounded"""
        with pytest.raises(OracleCapacityExceededError):
            exact_is_irrelevant(pb(EXAMPLE_1), lit("d"), budget=10)

    def test_agrees_with_definition(self):
        """Test the subset-sum oracle against enumeration of models"""
        rng = random.Random(23)
        for _ in range(300):
            constraint = random_constraint(rng, 7, 15)
            for _, literal in constraint:
                assert exact_is_irrelevant(constraint, literal) == is_irrelevant_by_definition(constraint, literal)

    def test_smaller_coefficients_follow(self):
        """Test that an irrelevant literal makes every smaller one irrelevant"""
        rng = random.Random(29)
        for _ in range(300):
            constraint = random_constraint(rng, 10, 30, saturated=True)
            for coef, literal in constraint:
                if not exact_is_irrelevant(constraint, literal):
                    continue
                for other_coef, other in constraint:
                    if other_coef <= coef:
                        assert exact_is_irrelevant(constraint, other)


class TestModularReachable:
    """Test cases for modular_reachable"""

    def test_examples(self):
        """Test residues of {12, 6, 6, 2}"""
        assert modular_reachable([12, 6, 6, 2], 5) == frozenset(range(5))
        assert modular_reachable([12, 6, 6, 2], 6) == frozenset({0, 2})
        assert modular_reachable([], 7) == frozenset({0})

    def test_large_modulus(self):
        """Test a bitset with 10**5 residues"""
        reachable = modular_reachable([3, 10**12 + 5], 100003)
        assert reachable == frozenset({0, 3, (10**12 + 5) % 100003, (10**12 + 8) % 100003})


class TestIncompleteDetector:
    """Test cases for incomplete_is_irrelevant"""

    def test_modulus_five_misses(self):
        """Test that p = 5 cannot prove e irrelevant"""
        verdict = incomplete_is_irrelevant(pb(EXAMPLE_3), lit("e"), DetectorConfig(moduli=(5,)))
        assert verdict is RelevanceVerdict.NOT_PROVEN

    def test_modulus_six_proves(self):
        """Test that p = 6 proves e irrelevant"""
        verdict = incomplete_is_irrelevant(pb(EXAMPLE_3), lit("e"), DetectorConfig(moduli=(6,)))
        assert verdict is RelevanceVerdict.PROVEN_IRRELEVANT

    @pytest.mark.parametrize("modulus", [2, 3, 4547])
    def test_clause_never_proven(self, modulus):
        """Test a clause literal under any modulus"""
        verdict = incomplete_is_irrelevant(pb("a + b >= 1"), lit("a"), DetectorConfig(moduli=(modulus,)))
        assert verdict is RelevanceVerdict.NOT_PROVEN

    def test_any_modulus_in_list_can_rule_out(self):
        """Test that the moduli combine"""
        verdict = incomplete_is_irrelevant(pb(EXAMPLE_3), lit("e"), DetectorConfig(moduli=(5, 6)))
        assert verdict is RelevanceVerdict.PROVEN_IRRELEVANT

    def test_long_window_skips_modulus(self):
        """Test that a window at least p long is never proven with p alone"""
        verdict = incomplete_is_irrelevant(pb("4a + 4b + c >= 4"), lit("a"), DetectorConfig(moduli=(3,)))
        assert verdict is RelevanceVerdict.NOT_PROVEN


class TestDetectAll:
    """Test cases for detect_all"""

    def test_example_three(self):
        """Test that p = 6 proves d and e with two checks"""
        report = detect_all(pb(EXAMPLE_3), DetectorConfig(moduli=(6,)))
        assert report.irrelevant == [lit("d"), lit("e")]
        assert report.checks == 2
        assert report.checked == [lit("d"), lit("b")]
        for name in "abc":
            assert report.verdict(lit(name)) is RelevanceVerdict.NOT_PROVEN

    def test_example_one_with_oracle(self):
        """Test that the oracle finds d, e and f"""
        report = detect_all(pb(EXAMPLE_1), oracle=True)
        assert report.irrelevant == [lit("d"), lit("e"), lit("f")]
        for name in "abc":
            assert report.verdict(lit(name)) is RelevanceVerdict.RELEVANT
        assert report.checks == 3

    @pytest.mark.parametrize("k", [2, 3, 10, 50])
    def test_staircase(self, k):
        """Test k x1 + x2 + ... + xk >= k"""
        report = detect_all(staircase(k), oracle=True)
        assert report.irrelevant == [Literal(i) for i in range(2, k + 1)]
        assert report.verdict(Literal(1)) is RelevanceVerdict.RELEVANT

    def test_skips_long_constraints(self):
        """Test the literal bound"""
        report = detect_all(pb("a + b + c >= 2"), DetectorConfig(max_literals=2))
        assert report.skipped
        assert report.verdicts == {}
        assert report.checks == 0

    def test_saturates_first(self):
        """Test an unsaturated input"""
        report = detect_all(pb("10a + 4b + 4c + d >= 8"), oracle=True)
        assert report.irrelevant == [lit("d")]

    def test_clauses_and_cardinality_have_no_irrelevant_literals(self):
        """Test cardinality constraints with 1 <= degree <= size"""
        rng = random.Random(31)
        for _ in range(100):
            size = rng.randint(1, 12)
            degree = rng.randint(1, size)
            constraint = PBConstraint({v: (1, rng.random() < 0.5) for v in range(1, size + 1)}, degree)
            assert detect_all(constraint, oracle=True).irrelevant == []
            assert detect_all(constraint).irrelevant == []

    def test_more_moduli_never_prove_less(self):
        """Test monotonicity in the list of moduli"""
        rng = random.Random(37)
        for _ in range(300):
            constraint = random_constraint(rng, 10, 40, saturated=True)
            first, second = rng.randint(2, 30), rng.randint(2, 30)
            fewer = set(detect_all(constraint, DetectorConfig(moduli=(first,))).irrelevant)
            more = set(detect_all(constraint, DetectorConfig(moduli=(first, second))).irrelevant)
            assert fewer <= more


class TestRemoval:
    """Test cases for the removal strategies"""

    def test_weakening(self):
        """Test removal by weakening"""
        diamond = remove_by_weakening(pb(DIAMOND), [lit("f")])
        assert diamond == pb("4a + 4b + 3d + 3e >= 4")
        assert slack(diamond) == 10
        nabla = remove_by_weakening(pb(NABLA), [lit("e")])
        assert nabla == pb("17a + 17b + 8c + 4d >= 19")
        assert slack(nabla) == 27

    def test_simple(self):
        """Test simple removal"""
        nabla = remove_simple(pb(NABLA), [lit("e")])
        assert nabla == pb("17a + 17b + 8c + 4d >= 21")
        assert slack(nabla) == 25
        diamond = remove_simple(pb(DIAMOND), [lit("f")])
        assert diamond == pb("6a + 6b + 3d + 3e >= 6")
        assert slack(diamond) == 12

    def test_slack_based(self):
        """Test that the smaller slack wins"""
        assert remove_slack_based(pb(DIAMOND), [lit("f")]) == pb("4a + 4b + 3d + 3e >= 4")
        assert remove_slack_based(pb(NABLA), [lit("e")]) == pb("17a + 17b + 8c + 4d >= 21")
        assert choose_removal(pb(DIAMOND), [lit("f")])[0] is EliminationStrategy.WEAKEN
        assert choose_removal(pb(NABLA), [lit("e")])[0] is EliminationStrategy.SIMPLE

    def test_empty_set(self):
        """Test removing nothing"""
        unsaturated = pb("6a + b >= 2")
        assert remove_by_weakening(unsaturated, []) == saturate(unsaturated)
        assert remove_simple(unsaturated, []) == unsaturated
        assert remove_slack_based(unsaturated, []) == saturate(unsaturated)

    def test_missing_literal(self):
        """Test removal of an absent literal"""
        with pytest.raises(LiteralNotPresentError):
            remove_simple(pb(DIAMOND), [lit("c")])
        with pytest.raises(LiteralNotPresentError):
            remove_by_weakening(pb(DIAMOND), [lit("~f")])

    def test_eliminate_off_is_identity(self):
        """Test the disabled strategy"""
        assert eliminate(pb(DIAMOND), [lit("f")], EliminationStrategy.OFF) == (EliminationStrategy.OFF, pb(DIAMOND))

    def test_removals_preserve_equivalence(self):
        """Test both removals against truth tables on oracle-certified sets"""
        rng = random.Random(41)
        for _ in range(150):
            constraint = random_constraint(rng, 7, 20, saturated=True)
            irrelevant = detect_all(constraint, oracle=True).irrelevant
            assert equivalent(remove_by_weakening(constraint, irrelevant), constraint)
            assert equivalent(remove_simple(constraint, irrelevant), constraint)
