"""Effective-resistance sparsification as a pre-processing step for maxcut QUBO solvers."""
from .experiment import ExperimentReport, reports_to_csv, run_pipeline, sweep_q
from .graph import (
    WeightedGraph,
    complement,
    cut_weight,
    generate_instance,
    load_instance,
    save_instance,
)
from .qubo import QuboInstance, communication_cost, compile_qubo, qubo_objective
from .resistance import ResistanceProfile, effective_resistances
from .solvers import SolveResult, solve_exact, solve_tabu
from .sparsifier import SparsifyConfig, resolve_q, sparsify

__all__ = [
    "ExperimentReport", "QuboInstance", "ResistanceProfile", "SolveResult", "SparsifyConfig",
    "WeightedGraph", "communication_cost", "compile_qubo", "complement", "cut_weight",
    "effective_resistances", "generate_instance", "load_instance", "qubo_objective",
    "reports_to_csv", "resolve_q", "run_pipeline", "save_instance", "solve_exact", "solve_tabu",
    "sparsify", "sweep_q",
]
