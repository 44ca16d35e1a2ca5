"""
Tests for the CDCL solver
"""

import pytest

from pbsift.analysis import AnalysisMode, ConflictAnalysisConfig
from pbsift.constraint import Literal, PBConstraint, evaluate
from pbsift.generators import generate_vertexcover_complete
from pbsift.relevance import EliminationStrategy
from pbsift.solver import PBSolver, SolverLimits, SolveStatus, luby, solve
from pbsift.trace import Rule, replay

from .helpers import brute_force_satisfiable, entails, pb

ALL_CONFIGS = [
    ConflictAnalysisConfig(mode, elimination) for mode in AnalysisMode for elimination in EliminationStrategy
]


def config_id(config):
    return f"{config.mode.value}-{config.elimination.value}"


class TestSolverLimits:
    """Test cases for SolverLimits"""

    def test_defaults(self):
        """Test no limits and no restarts by default"""
        limits = SolverLimits()
        assert limits.max_conflicts is None
        assert limits.time_limit is None
        assert not limits.luby
        assert limits.decay == 0.95

    def test_validation(self):
        """Test that invalid limits are rejected"""
        with pytest.raises(ValueError):
            SolverLimits(max_conflicts=-1)
        with pytest.raises(ValueError):
            SolverLimits(decay=0)


class TestPropagate:
    """Test cases for PBSolver.propagate"""

    def test_propagates_large_coefficients(self):
        """Test 2a + b + c >= 2 with a false"""
        solver = PBSolver([pb("2a + b + c >= 2")])
        solver._decide(1)
        assert solver.propagate() is None
        assert solver.value(Literal(2)) is True
        assert solver.value(Literal(3)) is True
        assert solver.stats.propagations == 2

    def test_clause_conflict(self):
        """Test a + b >= 1 with both false"""
        solver = PBSolver([pb("a + b >= 1")])
        solver._decide(1)
        solver._decide(2)
        assert solver.propagate() == 0

    def test_general_constraint_conflict(self):
        """Test a constraint falsified down to slack -13"""
        solver = PBSolver([pb("17a + 17b + 8c + 4d + 2e + 2f >= 23")])
        for var, value in [(3, True), (6, True), (1, False), (2, False), (4, False), (5, False)]:
            solver._assign(Literal(var, value), None)
        assert solver._slack[0] == -13
        assert solver.propagate() == 0

    def test_trail_records_reasons(self):
        """Test trail levels and reasons after propagation"""
        solver = PBSolver([pb("a + b + c >= 1"), pb("~c + d >= 1")])
        solver._decide(1)
        solver._decide(2)
        assert solver.propagate() is None
        trail = solver.trail()
        assert [entry[0] for entry in trail] == [Literal(1, False), Literal(2, False), Literal(3), Literal(4)]
        levels = [level for _, level, _ in trail]
        assert levels == sorted(levels) == [1, 2, 2, 2]
        for literal, _, reason in trail:
            if reason is not None:
                assert reason.coefficient(literal) > 0


class TestActivity:
    """Test cases for the variable activity heuristic"""

    def test_empty_bump(self):
        """Test that bumping nothing changes nothing"""
        solver = PBSolver([pb("a + b + c >= 1")])
        solver.bump_activity([])
        assert solver.activity == {1: 0.0, 2: 0.0, 3: 0.0}

    def test_repeated_bumps_do_not_decrease(self):
        """Test monotone activities without decay"""
        solver = PBSolver([pb("a + b + c >= 1")])
        previous = dict(solver.activity)
        for variables in ([1], [1, 2], [3], [1]):
            solver.bump_activity(variables)
            assert all(solver.activity[var] >= previous[var] for var in previous)
            previous = dict(solver.activity)

    def test_decay(self):
        """Test that k decays make new bumps 0.95**-k times larger"""
        solver = PBSolver([pb("a + b >= 1")])
        solver.bump_activity([1])
        for _ in range(5):
            solver.decay_activity()
        solver.bump_activity([2])
        assert solver.activity[2] / solver.activity[1] == pytest.approx(0.95**-5)

    def test_rescale(self):
        """Test that activities are rescaled above 1e100"""
        solver = PBSolver([pb("a + b >= 1")])
        solver.bump_activity([2])
        solver._var_inc = 1e101
        solver.bump_activity([1])
        assert solver.activity[1] == pytest.approx(10.0)
        assert solver.activity[2] == pytest.approx(1e-100)

    def test_ties_go_to_lowest_index_false(self):
        """Test the decisions on a + b + c >= 1"""
        result = solve([pb("a + b + c >= 1")])
        assert result.model == {1: False, 2: False, 3: True}
        assert result.stats.decisions == 2
        assert result.stats.propagations == 1


class TestLuby:
    """Test cases for the restart sequence"""

    def test_prefix(self):
        """Test the first fifteen elements"""
        assert [luby(i) for i in range(1, 16)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


class TestSolve:
    """Test cases for solve"""

    def test_unsat_units(self):
        """Test {a >= 1, ~a >= 1}"""
        result = solve([pb("a >= 1"), pb("~a >= 1")])
        assert result.status is SolveStatus.UNSAT
        assert result.exit_code == 20
        assert result.model is None

    def test_sat_clause(self):
        """Test {a + b >= 1} gives a verified model"""
        formula = [pb("a + b >= 1")]
        result = solve(formula)
        assert result.status is SolveStatus.SAT
        assert result.exit_code == 10
        assert all(evaluate(c, result.model) for c in formula)

    def test_model_covers_declared_variables(self):
        """Test that unused declared variables get a value"""
        result = solve([pb("a >= 1")], num_variables=3)
        assert result.model == {1: True, 2: False, 3: False}

    def test_conflict_limit(self):
        """Test that max_conflicts=0 stops at the first conflict"""
        result = solve(generate_vertexcover_complete(3), limits=SolverLimits(max_conflicts=0))
        assert result.status is SolveStatus.UNKNOWN
        assert result.exit_code == 0
        assert result.reason == "conflict limit"

    @pytest.mark.parametrize("n", [3, 4, 6, 8])
    @pytest.mark.parametrize("config", ALL_CONFIGS, ids=config_id)
    def test_vertexcover_unsat(self, n, config):
        """Test vertex cover on complete graphs in every configuration"""
        result = solve(generate_vertexcover_complete(n), config, record_trace=True)
        assert result.status is SolveStatus.UNSAT
        assert result.stats.irrelevant_literals_removed <= result.stats.irrelevant_literals_detected
        assert result.stats.cancellations == result.trace.count(Rule.CANCEL)
        assert replay(result.trace) == len(result.trace)
        if config.elimination is EliminationStrategy.OFF:
            assert result.stats.checks_performed == 0

    @pytest.mark.parametrize("n", [3, 4])
    def test_vertexcover_unsat_by_enumeration(self, n):
        """Test the instances against brute force"""
        assert not brute_force_satisfiable(generate_vertexcover_complete(n), n)

    def test_large_enough_cover_is_sat(self):
        """Test that a cover of n - 1 vertices is found"""
        formula = generate_vertexcover_complete(5, k=4)
        result = solve(formula, ConflictAnalysisConfig(elimination=EliminationStrategy.SLACK))
        assert result.status is SolveStatus.SAT
        assert sum(result.model.values()) == 4

    def test_luby_restarts(self):
        """Test that restarts happen and keep the answer"""
        limits = SolverLimits(luby=True, restart_base=1)
        result = solve(generate_vertexcover_complete(6), limits=limits)
        assert result.status is SolveStatus.UNSAT
        assert result.stats.restarts >= 1

    def test_trace_steps_are_entailed(self):
        """Test every recorded step against truth tables of its operands"""
        config = ConflictAnalysisConfig(AnalysisMode.DIVISION, EliminationStrategy.WEAKEN)
        trace = solve(generate_vertexcover_complete(4), config, record_trace=True).trace
        assert trace.count(Rule.INPUT) == 7
        for step in trace:
            if step.operands:
                assert entails([trace[operand].result for operand in step.operands], step.result)

    def test_stats_to_dict(self):
        """Test that stats export every counter"""
        stats = solve(generate_vertexcover_complete(4)).stats.to_dict()
        assert stats["conflicts"] >= 1
        assert stats["learned"] >= 1
        assert "cancellations" in stats
        assert "elapsed" in stats


# b and c follow from a; d and e from b and c
SHORTENED_BY_ELIMINATION = [
    pb("~b + a >= 1"),
    pb("~c + a >= 1"),
    pb("2d + 2c + b + e >= 3"),
    pb("~d + c >= 1"),
]


class TestEliminationDuringSearch:
    """Irrelevant literals met by the solver and what removing them changes"""

    @pytest.mark.parametrize("n", [5, 7, 9, 11])
    def test_first_vertexcover_conflict_learns_staircase(self, n):
        """Test that k x1 + ~x2 + ... + ~xk >= k is learned on K_n for odd n, k = (n - 1) / 2"""
        k = (n - 1) // 2
        formula = generate_vertexcover_complete(n)
        solver = PBSolver(formula, limits=SolverLimits(max_conflicts=1))
        assert solver.solve().status is SolveStatus.UNKNOWN
        learned = solver._constraints[len(formula)]
        assert learned == PBConstraint.of([(k, Literal(1))] + [(1, Literal(i, False)) for i in range(2, k + 1)], k)
        assert solver.stats.cancellations == k + 1

    @pytest.mark.parametrize("n", [5, 7, 9, 11])
    def test_first_vertexcover_conflict_with_elimination(self, n):
        """Test that ~x2 ... ~xk are removed and x1 alone is learned"""
        k = (n - 1) // 2
        formula = generate_vertexcover_complete(n)
        config = ConflictAnalysisConfig(elimination=EliminationStrategy.SLACK)
        solver = PBSolver(formula, config, SolverLimits(max_conflicts=1))
        assert solver.solve().status is SolveStatus.UNKNOWN
        assert solver._constraints[len(formula)] == PBConstraint.of([(k, Literal(1))], k)
        assert solver.stats.cancellations == k + 1
        assert solver.stats.irrelevant_literals_detected == k - 1
        assert solver.stats.irrelevant_literals_removed == k - 1
        assert solver.stats.constraints_with_irrelevant == 1

    def test_division_without_elimination(self):
        """Test the run where e stays in the rounded reason"""
        config = ConflictAnalysisConfig(AnalysisMode.DIVISION)
        result = solve(SHORTENED_BY_ELIMINATION, config, record_trace=True)
        assert result.status is SolveStatus.SAT
        assert result.stats.conflicts == 2
        assert result.stats.cancellations == 4
        assert replay(result.trace) == len(result.trace)

    @pytest.mark.parametrize(
        "elimination", [EliminationStrategy.WEAKEN, EliminationStrategy.SIMPLE, EliminationStrategy.SLACK]
    )
    def test_division_with_elimination_needs_fewer_cancellations(self, elimination):
        """Test that removing b before dividing learns c >= 1 after one cancellation"""
        config = ConflictAnalysisConfig(AnalysisMode.DIVISION, elimination)
        result = solve(SHORTENED_BY_ELIMINATION, config, record_trace=True)
        assert result.status is SolveStatus.SAT
        assert result.stats.conflicts == 1
        assert result.stats.cancellations == 1
        assert result.stats.irrelevant_literals_removed == 1
        assert replay(result.trace) == len(result.trace)
        assert all(evaluate(c, result.model) for c in SHORTENED_BY_ELIMINATION)
