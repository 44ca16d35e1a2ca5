"""
pbsift - cutting-planes reasoning and irrelevant literal detection for
pseudo-Boolean constraints
"""

__version__ = "0.1.0"

from .analysis import AnalysisMode, ConflictAnalysisConfig, ConflictAnalyzer, SolverStats
from .constraint import Literal, PBConstraint, RawConstraint, Relation, normalize
from .relevance import DetectorConfig, EliminationStrategy, RelevanceReport, RelevanceVerdict, detect_all
from .solver import PBSolver, SolveResult, SolverLimits, SolveStatus, solve
from .trace import DerivationTrace, Rule

__all__ = [
    "AnalysisMode",
    "ConflictAnalysisConfig",
    "ConflictAnalyzer",
    "DerivationTrace",
    "DetectorConfig",
    "EliminationStrategy",
    "Literal",
    "PBConstraint",
    "PBSolver",
    "RawConstraint",
    "Relation",
    "RelevanceReport",
    "RelevanceVerdict",
    "Rule",
    "SolveResult",
    "SolveStatus",
    "SolverLimits",
    "SolverStats",
    "detect_all",
    "normalize",
    "solve",
]
