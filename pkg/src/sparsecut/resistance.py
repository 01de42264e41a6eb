"""Effective resistances of graph edges via the Laplacian pseudoinverse."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import WeightedGraph

PROB_RULES = ("resistance", "leverage")

# eigenvalues below this fraction of the largest are treated as zero
PINV_CUTOFF = 1e-10


class ResistanceError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class ResistanceProfile:
    """Per-edge effective resistances and the derived sampling distribution.

    Both arrays follow the edge order of the graph they were computed on.
    """

    resistances: np.ndarray
    probabilities: np.ndarray
    rule: str = "resistance"

    def __len__(self):
        return int(self.resistances.size)


def laplacian_pinv(g: WeightedGraph) -> np.ndarray:
    lap = g.laplacian()
    try:
        evals, evecs = np.linalg.eigh(lap)
    except np.linalg.LinAlgError as exc:
        raise ResistanceError(f"Laplacian eigendecomposition failed: {exc}") from exc
    if not np.all(np.isfinite(evals)):
        raise ResistanceError("Laplacian eigendecomposition produced non-finite values")
    top = evals.max() if evals.size else 0.0
    keep = evals > PINV_CUTOFF * top if top > 0 else np.zeros_like(evals, dtype=bool)
    inv = np.zeros_like(evals)
    inv[keep] = 1.0 / evals[keep]
    return (evecs * inv) @ evecs.T


def effective_resistances(g: WeightedGraph, rule: str = "resistance") -> ResistanceProfile:
    """Effective resistance of every edge, treating weight ``w`` as conductance.

    ``rule="resistance"`` samples edges with probability proportional to
    ``R_e``; ``rule="leverage"`` uses ``w_e * R_e`` instead (the usual
    spectral-sparsifier distribution, kept for comparison).
    """
    if rule not in PROB_RULES:
        raise ValueError(f"unknown probability rule {rule!r}")
    if g.edge_count == 0:
        raise ValueError("graph has no edges")
    lp = laplacian_pinv(g)
    d = np.diag(lp)
    r = d[g.u] + d[g.v] - 2.0 * lp[g.u, g.v]
    if not np.all(np.isfinite(r)) or np.any(r <= 0):
        raise ResistanceError("non-positive or non-finite effective resistance encountered")
    mass = r if rule == "resistance" else g.w * r
    p = mass / mass.sum()
    r.flags.writeable = False
    p.flags.writeable = False
    return ResistanceProfile(r, p, rule)


def dump_csv(g: WeightedGraph, profile: ResistanceProfile) -> str:
    """CSV listing ``u,v,w,R_e,p_e`` per edge (0-indexed endpoints)."""
    lines = ["u,v,w,R_e,p_e"]
    for a, b, wt, r, p in zip(g.u, g.v, g.w, profile.resistances, profile.probabilities):
        lines.append(f"{a},{b},{float(wt)!r},{float(r)!r},{float(p)!r}")
    return "\n".join(lines) + "\n"
