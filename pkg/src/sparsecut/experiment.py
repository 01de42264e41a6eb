"""Sparsify-then-solve pipeline, q sweeps and CSV reporting."""
from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field

import numpy as np

from .graph import WeightedGraph, cut_weight
from .qubo import communication_cost, compile_qubo
from .resistance import ResistanceProfile, effective_resistances
from .solvers import DEFAULT_BUDGET_ITERS, EXACT_MAX_DIMENSION, solve_exact, solve_tabu
from .sparsifier import SparsifyConfig, config_q, sparsify

SOLVERS = ("exact", "tabu", "remote")

CSV_HEADER = (
    "dataset", "n", "m", "q", "mean_sparse_edges", "reduction", "reference",
    "mean_objective", "ratio", "trials", "seed", "resistance_secs", "sample_secs", "solve_secs",
)
TIMING_COLUMNS = ("resistance_secs", "sample_secs", "solve_secs")


class TrialError(RuntimeError):
    def __init__(self, trial: int, exc: Exception):
        self.trial = trial
        super().__init__(f"trial {trial}: {type(exc).__name__}: {exc}")


@dataclass(frozen=True)
class Reference:
    value: float
    kind: str  # "exact" or "heuristic"


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    sparse_edges: int
    triplets: int
    objective: float
    ratio: float
    sample_secs: float
    solve_secs: float
    request_bytes: int | None = None


@dataclass
class ExperimentReport:
    dataset: str
    n: int
    m: int
    q: int
    sparsified_edges: float
    reduction: float
    reference_value: float
    reference_kind: str
    objective: float
    ratio: float
    ratio_of_means: float
    trials: int
    seed: int
    resistance_secs: float
    sample_secs: float
    solve_secs: float
    solver: str = "tabu"
    records: list[TrialRecord] = field(default_factory=list)

    def csv_row(self) -> list[str]:
        vals = [
            self.dataset, self.n, self.m, self.q, self.sparsified_edges, self.reduction,
            self.reference_value, self.objective, self.ratio, self.trials, self.seed,
            self.resistance_secs, self.sample_secs, self.solve_secs,
        ]
        return [repr(v) if isinstance(v, float) else str(v) for v in vals]


class _Solver:
    """Dispatches a QUBO to the chosen backend with a fixed iteration budget."""

    def __init__(self, name: str, budget_iters: int, server=None, value_format: str = "fixed"):
        if name not in SOLVERS:
            raise ValueError(f"unknown solver {name!r}; expected one of {SOLVERS}")
        if name == "remote" and server is None:
            raise ValueError("remote solver needs a server address")
        self.name = name
        self.budget_iters = budget_iters
        self.server = server
        self.value_format = value_format

    def __call__(self, q, seed: int):
        if self.name == "exact":
            return solve_exact(q).assignment, None
        if self.name == "tabu":
            return solve_tabu(q, budget_iters=self.budget_iters, seed=seed).assignment, None
        from .remote import submit

        rep = submit(self.server, q, self.budget_iters, value_format=self.value_format)
        return rep.assignment, rep.request_bytes


def reference_value(g: WeightedGraph, solver: str = "tabu", trials: int = 10, seed: int = 0,
                    budget_iters: int = DEFAULT_BUDGET_ITERS, server=None,
                    value_format: str = "fixed") -> Reference:
    """Best cut of the original graph.

    Exact enumeration when the graph is small enough, otherwise the best
    of ``trials`` heuristic runs (seeds ``seed + i``) under the same
    budget the sparsified runs get.
    """
    if g.node_count <= EXACT_MAX_DIMENSION:
        return Reference(cut_weight(g, solve_exact(compile_qubo(g)).assignment), "exact")
    if solver == "exact":
        solver = "tabu"
    run = _Solver(solver, budget_iters, server, value_format)
    q = compile_qubo(g)
    best = max(cut_weight(g, run(q, seed + i)[0]) for i in range(trials))
    return Reference(best, "heuristic")


def run_pipeline(g: WeightedGraph, cfg: SparsifyConfig, solver: str = "tabu", trials: int = 10,
                 budget_iters: int = DEFAULT_BUDGET_ITERS, server=None, dataset: str = "",
                 reference: Reference | None = None, profile: ResistanceProfile | None = None,
                 prob_rule: str = "resistance", value_format: str = "fixed") -> ExperimentReport:
    """Sparsify, compile, solve and score ``trials`` times.

    Trial ``i`` samples and solves with seed ``cfg.seed + i``. Solutions
    are always scored with :func:`cut_weight` on the original graph.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if g.edge_count == 0:
        raise ValueError("graph has no edges")
    run = _Solver(solver, budget_iters, server, value_format)
    res_secs = 0.0
    if profile is None:
        t0 = time.perf_counter()
        profile = effective_resistances(g, prob_rule)
        res_secs = time.perf_counter() - t0
    if reference is None:
        reference = reference_value(g, solver, trials, cfg.seed, budget_iters, server, value_format)
    q = config_q(cfg, g)

    records = []
    for i in range(trials):
        seed = cfg.seed + i
        try:
            t0 = time.perf_counter()
            sparse = sparsify(g, profile, cfg.with_seed(seed))
            qubo = compile_qubo(sparse)
            t1 = time.perf_counter()
            bits, nbytes = run(qubo, seed)
            t2 = time.perf_counter()
            off_diag = qubo.off_diagonal_count()
            assert off_diag == sparse.edge_count
            assert communication_cost(qubo) - off_diag == int(np.count_nonzero(sparse.degrees()))
            obj = cut_weight(g, bits)
        except Exception as exc:
            raise TrialError(i, exc) from exc
        records.append(TrialRecord(seed, sparse.edge_count, communication_cost(qubo), obj,
                                   obj / reference.value if reference.value else 1.0,
                                   t1 - t0, t2 - t1, nbytes))

    mean_edges = float(np.mean([r.sparse_edges for r in records]))
    mean_obj = float(np.mean([r.objective for r in records]))
    return ExperimentReport(
        dataset=dataset,
        n=g.node_count,
        m=g.edge_count,
        q=q,
        sparsified_edges=mean_edges,
        reduction=float(np.mean([1.0 - r.sparse_edges / g.edge_count for r in records])),
        reference_value=reference.value,
        reference_kind=reference.kind,
        objective=mean_obj,
        ratio=float(np.mean([r.ratio for r in records])),
        ratio_of_means=mean_obj / reference.value if reference.value else 1.0,
        trials=trials,
        seed=cfg.seed,
        resistance_secs=res_secs,
        sample_secs=float(np.mean([r.sample_secs for r in records])),
        solve_secs=float(np.mean([r.solve_secs for r in records])),
        solver=solver,
        records=records,
    )


def sweep_q(g: WeightedGraph, q_values, solver: str = "tabu", trials: int = 10, seed: int = 0,
            budget_iters: int = DEFAULT_BUDGET_ITERS, server=None, dataset: str = "",
            prob_rule: str = "resistance", value_format: str = "fixed") -> list[ExperimentReport]:
    """One :func:`run_pipeline` report per explicit ``q``.

    The resistance profile and the reference value are computed once and
    shared by every point of the sweep.
    """
    q_values = [int(v) for v in q_values]
    if not q_values:
        raise ValueError("q_values must be nonempty")
    if any(b <= a for a, b in zip(q_values, q_values[1:])):
        raise ValueError("q_values must be strictly ascending")
    t0 = time.perf_counter()
    profile = effective_resistances(g, prob_rule)
    res_secs = time.perf_counter() - t0
    ref = reference_value(g, solver, trials, seed, budget_iters, server, value_format)
    reports = []
    for qv in q_values:
        rep = run_pipeline(g, SparsifyConfig(q=qv, seed=seed), solver, trials, budget_iters,
                           server, dataset, ref, profile, prob_rule, value_format)
        rep.resistance_secs = res_secs
        reports.append(rep)
    return reports


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rep in reports:
        writer.writerow(rep.csv_row())
    return buf.getvalue()
